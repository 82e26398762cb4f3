#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "perco/graph.hpp"
#include "perco/rules.hpp"

namespace perco::oracle {

// Brute-force references. Deliberately slow and simple, sharing nothing
// with the engine beyond the GraphSample type, so that agreement is
// meaningful.

// One labelled graph on n <= 6 vertices encoded as C(n,2) edge bits, plus
// an initial-set bitmask.
struct ExhaustiveCase {
    std::uint32_t n = 0;
    std::uint64_t graph_code = 0;   // < 2^C(n,2)
    std::uint32_t initial_mask = 0; // < 2^n
};

// Decodes graph_code: bit index of pair (u,v), u<v, in lexicographic order.
GraphSample graph_from_code(std::uint32_t n, std::uint64_t graph_code);

std::vector<Vertex> mask_to_set(std::uint32_t n, std::uint32_t mask);

// Naive full-rescan percolation: loop over all vertices, activate any that
// meet the rule, restart until a pass changes nothing. Returns the sorted
// stable set.
std::vector<Vertex> mc_reference_percolation(const GraphSample& g,
                                             std::span<const Vertex> initial,
                                             const ActivationRule& rule);

// Exact E[A*] for G(n,p), n <= 6, initial sets of size a0 uniform at
// random: total enumeration of all 2^C(n,2) graphs weighted by
// p^m (1-p)^(C(n,2)-m) and all C(n,a0) initial sets. Throws for n > 6.
double exact_expected_final_size(std::uint32_t n, double p, std::uint32_t a0,
                                 const ActivationRule& rule);

// P{ Bin(t,p) >= max(Bin(n-1-t,p), 1) } by double summation over the full
// joint support; n <= 20. Reference for analytics::pi_plus_exact.
double exact_pi_plus_enumeration(std::uint32_t n, std::uint32_t t, double p);

// Cross-validation sweep used by the oracle-check subcommand and the
// acceptance suite: for every n in 1..max_n, every graph and every initial
// set, the engine, the generation fixed point and the naive reference must
// produce identical final sets under the majority rule; non-majority rules
// are spot-checked on a seeded sample of cases.
struct Mismatch {
    ExhaustiveCase which;
    std::string detail;
};

struct ExhaustiveReport {
    std::uint64_t cases_checked = 0;
    std::uint64_t sampled_rule_cases = 0;
    std::vector<Mismatch> mismatches;  // capped at 16
    bool pass() const { return mismatches.empty(); }
};

ExhaustiveReport run_exhaustive_check(std::uint32_t max_n, unsigned threads = 0);

}  // namespace perco::oracle
