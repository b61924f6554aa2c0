#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace mave {

// Exact arbitrary-precision rational. All symbolic modules use this type;
// no floating point enters before numsim.
using Rational = mpq_class;

inline Rational rat(long n, long d = 1) {
    Rational q(n, d);
    q.canonicalize();
    return q;
}

// Parses "p", "-p", "p/q". Throws ValidationError on malformed input.
Rational rational_from_string(std::string_view s);

// Canonical text form: "p" or "p/q".
std::string to_string(const Rational& q);

double to_double(const Rational& q);

// splitmix64; used to derive independent per-(case, sample) streams.
std::uint64_t split_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

// Small-height random rationals n/d with n in [-9, 9], d in [1, 4].
class RationalSampler {
public:
    explicit RationalSampler(std::uint64_t seed) : rng_(seed) {}

    Rational draw();
    Rational draw_nonzero();

private:
    std::mt19937_64 rng_;
};

} // namespace mave
