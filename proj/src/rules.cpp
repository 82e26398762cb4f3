#include "perco/rules.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "perco/rng.hpp"

namespace perco {

ActivationRule ActivationRule::majority(bool strict) {
    ActivationRule r;
    r.kind = Kind::Majority;
    r.strict = strict;
    return r;
}

ActivationRule ActivationRule::proportional(double alpha, bool strict) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("ActivationRule: alpha must lie in (0,1)");
    ActivationRule r;
    r.kind = Kind::Proportional;
    r.alpha = alpha;
    r.strict = strict;
    return r;
}

ActivationRule ActivationRule::classical(std::uint32_t r_) {
    if (r_ == 0) throw std::invalid_argument("ActivationRule: r must be >= 1");
    ActivationRule r;
    r.kind = Kind::Classical;
    r.r = r_;
    return r;
}

std::string ActivationRule::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Majority: os << (strict ? "majority(strict)" : "majority"); break;
        case Kind::Proportional:
            os << "proportional(alpha=" << alpha << (strict ? ",strict)" : ")");
            break;
        case Kind::Classical: os << "classical(r=" << r << ")"; break;
    }
    return os.str();
}

namespace {

// Smallest integer m with m >= alpha*deg (or m > alpha*deg when strict),
// computed exactly: alpha = mant * 2^(exp-53) with a 53-bit integer mant,
// so alpha*deg = (mant*deg) / 2^(53-exp) over 128-bit integers.
std::uint64_t proportional_threshold(double alpha, std::uint64_t deg, bool strict) {
    int exp2 = 0;
    const double mant = std::frexp(alpha, &exp2);  // [0.5, 1)
    const auto mant_bits = static_cast<unsigned __int128>(std::ldexp(mant, 53));
    const int shift = 53 - exp2;  // >= 53 for alpha < 1
    if (shift >= 120) return 1;   // alpha*deg < 1 for any 32-bit degree
    const unsigned __int128 num = mant_bits * deg;
    const unsigned __int128 q = num >> shift;
    const bool exact = (q << shift) == num;
    std::uint64_t thr;
    if (strict)
        thr = static_cast<std::uint64_t>(q) + 1;               // smallest m > alpha*deg
    else
        thr = static_cast<std::uint64_t>(q) + (exact ? 0 : 1); // ceil(alpha*deg)
    return thr;
}

}  // namespace

std::uint64_t threshold_marks(const ActivationRule& rule, std::uint64_t degree) {
    switch (rule.kind) {
        case ActivationRule::Kind::Classical:
            return rule.r;
        case ActivationRule::Kind::Majority: {
            const std::uint64_t half = rule.strict ? degree / 2 + 1 : (degree + 1) / 2;
            return std::max<std::uint64_t>(half, 1);
        }
        case ActivationRule::Kind::Proportional: {
            const std::uint64_t t = proportional_threshold(rule.alpha, degree, rule.strict);
            return std::max<std::uint64_t>(t, 1);
        }
    }
    return 1;  // unreachable
}

InitialSpec InitialSpec::fixed_size(std::uint64_t a0, std::uint64_t seed) {
    InitialSpec s;
    s.mode = Mode::FixedSize;
    s.a0 = a0;
    s.seed = seed;
    return s;
}

InitialSpec InitialSpec::bernoulli(double q, std::uint64_t seed) {
    if (!(q >= 0.0 && q <= 1.0))
        throw std::invalid_argument("InitialSpec: q must lie in [0,1]");
    InitialSpec s;
    s.mode = Mode::BernoulliEach;
    s.q = q;
    s.seed = seed;
    return s;
}

std::vector<Vertex> draw_initial(const InitialSpec& init, std::uint32_t n) {
    std::mt19937_64 rng(init.seed);
    std::vector<Vertex> out;
    if (init.mode == InitialSpec::Mode::FixedSize) {
        if (init.a0 > n) throw std::invalid_argument("draw_initial: a0 exceeds n");
        std::vector<Vertex> pool(n);
        for (Vertex v = 0; v < n; ++v) pool[v] = v;
        const auto a0 = static_cast<std::uint32_t>(init.a0);
        for (std::uint32_t i = 0; i < a0; ++i) {
            const auto j = i + bounded_u64(rng, n - i);
            std::swap(pool[i], pool[j]);
        }
        out.assign(pool.begin(), pool.begin() + a0);
        std::sort(out.begin(), out.end());
    } else {
        if (!(init.q >= 0.0 && init.q <= 1.0))
            throw std::invalid_argument("draw_initial: q must lie in [0,1]");
        for (Vertex v = 0; v < n; ++v)
            if (canonical_unit(rng) < init.q) out.push_back(v);
    }
    return out;
}

}  // namespace perco
