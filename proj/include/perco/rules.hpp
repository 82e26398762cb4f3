#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perco/graph.hpp"

namespace perco {

// Activation threshold family. Majority asks for marks >= max(deg/2, 1),
// Proportional(alpha) for marks >= max(alpha*deg, 1), Classical(r) for
// marks >= r independent of degree. With strict=true the degree comparison
// becomes strict (marks > deg/2, resp. > alpha*deg); Classical ignores it.
struct ActivationRule {
    enum class Kind { Majority, Proportional, Classical };

    Kind kind = Kind::Majority;
    double alpha = 0.5;        // Proportional only, in (0,1)
    std::uint32_t r = 2;       // Classical only, >= 1
    bool strict = false;

    static ActivationRule majority(bool strict = false);
    static ActivationRule proportional(double alpha, bool strict = false);
    static ActivationRule classical(std::uint32_t r);

    std::string describe() const;
};

// Smallest integer mark count that activates a vertex of the given degree.
// The alpha*deg comparison is exact: alpha is decomposed into its binary
// mantissa and the ceiling is taken over 128-bit integers, so ties at
// exactly alpha*deg are classified without floating-point rounding.
std::uint64_t threshold_marks(const ActivationRule& rule, std::uint64_t degree);

// Initially active set: either a uniform random subset of fixed size, or
// each vertex independently active with probability q.
struct InitialSpec {
    enum class Mode { FixedSize, BernoulliEach };

    Mode mode = Mode::FixedSize;
    std::uint64_t a0 = 0;   // FixedSize
    double q = 0.0;         // BernoulliEach
    std::uint64_t seed = 0;

    static InitialSpec fixed_size(std::uint64_t a0, std::uint64_t seed);
    static InitialSpec bernoulli(double q, std::uint64_t seed);
};

// Sorted list of initially active vertices. FixedSize uses a seeded partial
// Fisher-Yates over 0..n-1.
std::vector<Vertex> draw_initial(const InitialSpec& init, std::uint32_t n);

}  // namespace perco
