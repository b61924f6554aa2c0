#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mave/rational.hpp"

namespace mave {

enum class Field : std::uint8_t { U = 0, V = 1 };
enum class Axis : std::uint8_t { T = 0, Z1 = 1, Z2 = 2 };

// Multi-index (n_t, n_1, n_2) of derivative counts. Ordered lexicographically.
struct MultiIndex {
    std::uint16_t t = 0;
    std::uint16_t z1 = 0;
    std::uint16_t z2 = 0;

    auto operator<=>(const MultiIndex&) const = default;

    int total() const { return int(t) + int(z1) + int(z2); }

    MultiIndex bumped(Axis ax, int by = 1) const {
        MultiIndex m = *this;
        switch (ax) {
            case Axis::T: m.t = std::uint16_t(m.t + by); break;
            case Axis::Z1: m.z1 = std::uint16_t(m.z1 + by); break;
            case Axis::Z2: m.z2 = std::uint16_t(m.z2 + by); break;
        }
        return m;
    }

    int component(Axis ax) const {
        switch (ax) {
            case Axis::T: return t;
            case Axis::Z1: return z1;
            default: return z2;
        }
    }

    bool covers(const MultiIndex& o) const { return t >= o.t && z1 >= o.z1 && z2 >= o.z2; }

    MultiIndex minus(const MultiIndex& o) const {
        return MultiIndex{std::uint16_t(t - o.t), std::uint16_t(z1 - o.z1), std::uint16_t(z2 - o.z2)};
    }

    MultiIndex plus(const MultiIndex& o) const {
        return MultiIndex{std::uint16_t(t + o.t), std::uint16_t(z1 + o.z1), std::uint16_t(z2 + o.z2)};
    }

    std::string str() const;
};

// A derivative coordinate of one of the two dependent fields. (U, (0,0,0))
// is u itself. Total order is lexicographic on (field, n_t, n_1, n_2).
struct JetCoordinate {
    Field field = Field::U;
    MultiIndex order;

    auto operator<=>(const JetCoordinate&) const = default;

    std::string name() const;
};

// The fixed parameter-symbol set of a polynomial ring instance. Two
// polynomials interoperate only when their rings carry the same symbols.
class Ring {
public:
    explicit Ring(std::vector<std::string> params);

    // The ring used throughout the verification suite: parameters {lambda, s0}.
    static const std::shared_ptr<const Ring>& standard();

    int index_of(std::string_view name) const; // -1 when absent
    const std::string& param_name(std::size_t i) const { return params_[i]; }
    std::size_t param_count() const { return params_.size(); }

    bool operator==(const Ring& o) const { return params_ == o.params_; }

private:
    std::vector<std::string> params_;
};

// One product of jet coordinates, explicit z powers and parameter powers with
// an exact rational coefficient. Stored maps contain no zero exponents.
struct Monomial {
    Rational coeff;
    std::vector<std::pair<JetCoordinate, std::uint32_t>> jets; // sorted by coordinate
    std::array<std::uint32_t, 2> z{0, 0};
    std::vector<std::pair<std::uint16_t, std::uint32_t>> params; // sorted by index

    int jet_degree(Field f) const;
    int jet_degree() const;

    static int compare_key(const Monomial& a, const Monomial& b);
};

// Exact differential polynomial over jet coordinates of u and v, explicit
// z1, z2 and the ring's formal parameters. Canonical form is unique: terms
// sorted, merged, nonzero; zero is the empty term list.
class JetPolynomial {
public:
    JetPolynomial() : ring_(Ring::standard()) {}
    explicit JetPolynomial(std::shared_ptr<const Ring> ring) : ring_(std::move(ring)) {}

    static JetPolynomial constant(const Rational& c,
                                  std::shared_ptr<const Ring> ring = Ring::standard());
    static JetPolynomial coordinate(const JetCoordinate& jc,
                                    std::shared_ptr<const Ring> ring = Ring::standard());
    static JetPolynomial zvar(int which, // 1 or 2
                              std::shared_ptr<const Ring> ring = Ring::standard());
    static JetPolynomial parameter(std::string_view name,
                                   std::shared_ptr<const Ring> ring = Ring::standard());

    const std::shared_ptr<const Ring>& ring() const { return ring_; }
    const std::vector<Monomial>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    // The value of a constant polynomial (zero or a single bare coefficient).
    Rational constant_value() const;

    bool operator==(const JetPolynomial& o) const;

    JetPolynomial operator-() const;
    JetPolynomial& operator+=(const JetPolynomial& o);
    JetPolynomial& operator-=(const JetPolynomial& o);
    friend JetPolynomial operator+(JetPolynomial a, const JetPolynomial& b) { return a += b; }
    friend JetPolynomial operator-(JetPolynomial a, const JetPolynomial& b) { return a -= b; }
    friend JetPolynomial operator*(const JetPolynomial& a, const JetPolynomial& b);
    JetPolynomial& operator*=(const JetPolynomial& o) { return *this = *this * o; }
    friend JetPolynomial operator*(const Rational& c, const JetPolynomial& p);
    friend JetPolynomial operator*(const JetPolynomial& p, const Rational& c) { return c * p; }
    JetPolynomial pow(unsigned e) const;

    // Total derivative along one independent variable: Leibniz over jet
    // coordinates, d z_i / d z_i = 1, parameters are constants.
    JetPolynomial total_derivative(Axis ax) const;
    JetPolynomial total_derivative(const MultiIndex& word) const;

    // Partial derivative with respect to a single jet coordinate.
    JetPolynomial partial(const JetCoordinate& jc) const;

    bool contains(const JetCoordinate& jc) const;
    // Distinct coordinates of the given field appearing anywhere.
    std::vector<JetCoordinate> coordinates(Field f) const;
    std::vector<JetCoordinate> coordinates() const;
    bool has_z() const;
    bool has_params() const;
    int max_t_order(Field f) const;

    // Coefficient of lambda^k, with lambda removed.
    JetPolynomial lambda_component(unsigned k) const;
    unsigned lambda_degree() const;

    std::string str() const;
    // Parses the deterministic text form produced by str().
    static JetPolynomial parse(std::string_view text,
                               std::shared_ptr<const Ring> ring = Ring::standard());

    // Replaces every occurrence of each rule key (and, with prolong, of every
    // derivative prolongation of it) until a fixpoint. Throws CycleError when
    // a rule's right side reintroduces its own key.
    JetPolynomial substitute(const struct Substitution& s) const;
    JetPolynomial substitute_jet(const JetCoordinate& key, const JetPolynomial& value,
                                 bool prolong) const;

private:
    std::shared_ptr<const Ring> ring_;
    std::vector<Monomial> terms_;

    void check_ring(const JetPolynomial& o) const;
    static void normalize(std::vector<Monomial>& ts);
    friend class LocalOperator;
};

struct Substitution {
    struct JetRule {
        JetCoordinate key;
        JetPolynomial value;
    };
    struct ParamRule {
        std::string name;
        JetPolynomial value;
    };
    std::vector<JetRule> jets;
    std::vector<ParamRule> params;
    bool prolong = false;
};

// Convenience builders over the standard ring.
namespace jets {
JetPolynomial u(int t, int z1, int z2);
JetPolynomial v(int t, int z1, int z2);
JetPolynomial z1();
JetPolynomial z2();
JetPolynomial lam();
JetPolynomial s0();
JetPolynomial num(long n, long d = 1);
JetCoordinate uc(int t, int z1, int z2);
JetCoordinate vc(int t, int z1, int z2);
} // namespace jets

} // namespace mave
