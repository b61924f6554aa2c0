#include "mave/rational.hpp"

#include "mave/errors.hpp"

namespace mave {

Rational rational_from_string(std::string_view s) {
    if (s.empty())
        throw ValidationError("empty rational literal");
    mpq_class q;
    if (q.set_str(std::string(s), 10) != 0)
        throw ValidationError("malformed rational literal: '" + std::string(s) + "'");
    if (q.get_den() == 0)
        throw ValidationError("zero denominator in rational literal: '" + std::string(s) + "'");
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) {
    return q.get_str();
}

double to_double(const Rational& q) {
    return q.get_d();
}

std::uint64_t split_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = base + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

Rational RationalSampler::draw() {
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 4);
    return rat(num(rng_), den(rng_));
}

Rational RationalSampler::draw_nonzero() {
    for (;;) {
        Rational q = draw();
        if (q != 0)
            return q;
    }
}

} // namespace mave
