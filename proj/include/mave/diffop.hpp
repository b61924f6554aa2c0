#pragma once

#include <map>
#include <utility>
#include <vector>

#include "mave/jetpoly.hpp"

namespace mave {

// Finite sum of total-derivative words with jet-polynomial coefficients,
// coefficients to the left: sum_alpha p_alpha * D^alpha. Canonical: no zero
// coefficients.
class LocalOperator {
public:
    LocalOperator() : ring_(Ring::standard()) {}
    explicit LocalOperator(std::shared_ptr<const Ring> ring) : ring_(std::move(ring)) {}

    static LocalOperator identity(std::shared_ptr<const Ring> ring = Ring::standard());
    static LocalOperator derivative(const MultiIndex& word,
                                    std::shared_ptr<const Ring> ring = Ring::standard());
    static LocalOperator derivative(Axis ax,
                                    std::shared_ptr<const Ring> ring = Ring::standard());
    // Multiplication operator by p (the zero-word term).
    static LocalOperator multiplication(const JetPolynomial& p);
    static LocalOperator term(const JetPolynomial& coeff, const MultiIndex& word);

    const std::shared_ptr<const Ring>& ring() const { return ring_; }
    const std::map<MultiIndex, JetPolynomial>& terms() const { return terms_; }
    JetPolynomial coefficient(const MultiIndex& word) const;

    bool is_zero() const { return terms_.empty(); }
    // Free of jet coordinates and explicit z (formal parameters allowed).
    bool is_constant_coefficient() const;
    int max_order() const;

    bool operator==(const LocalOperator& o) const;

    LocalOperator operator-() const;
    LocalOperator& operator+=(const LocalOperator& o);
    LocalOperator& operator-=(const LocalOperator& o);
    friend LocalOperator operator+(LocalOperator a, const LocalOperator& b) { return a += b; }
    friend LocalOperator operator-(LocalOperator a, const LocalOperator& b) { return a -= b; }
    friend LocalOperator operator*(const Rational& c, const LocalOperator& op);
    friend LocalOperator operator*(const JetPolynomial& p, const LocalOperator& op);

    JetPolynomial apply(const JetPolynomial& q) const;
    // Leibniz expansion of the derivative words across coefficients.
    LocalOperator compose(const LocalOperator& o) const;
    // (p D^alpha)* = (-1)^|alpha| D^alpha o p, expanded to canonical form.
    LocalOperator adjoint() const;

    // Coefficient-wise transformation (e.g. on-shell reduction of an operator).
    template <typename F>
    LocalOperator map_coefficients(F&& f) const {
        LocalOperator r(ring_);
        for (const auto& [w, p] : terms_)
            r.add_term(f(p), w);
        return r;
    }

    std::string str() const;

private:
    std::shared_ptr<const Ring> ring_;
    std::map<MultiIndex, JetPolynomial> terms_;

    void add_term(const JetPolynomial& coeff, const MultiIndex& word);
};

LocalOperator commutator(const LocalOperator& a, const LocalOperator& b);

// Directional derivative c1*D1 + c2*D2.
LocalOperator nabla(const Rational& c1, const Rational& c2,
                    std::shared_ptr<const Ring> ring = Ring::standard());

// Writes op = nabla_d o quotient + remainder with the remainder free of the
// pivot axis (the first nonzero direction component). The decomposition is
// unique, which makes nonlocal normal forms canonical.
struct LeftDivision {
    LocalOperator quotient;
    LocalOperator remainder;
};
LeftDivision left_divide_nabla(const LocalOperator& op, const Rational& d1, const Rational& d2);

// One formally inverted directional derivative applied to a local operator:
// nabla_d^{-1} o inner. Direction is stored with its first nonzero component
// scaled to 1; inner is kept in left-division normal form (no part of it is
// exactly divisible by nabla_d on the left).
struct NonlocalTerm {
    Rational dir1, dir2;
    LocalOperator inner;
};

// Local operator plus at most one layer of nonlocal terms. All constructors
// and operations normalize eagerly; nesting never exceeds depth 1.
class LinearDiffOperator {
public:
    LinearDiffOperator() : ring_(Ring::standard()) {}
    explicit LinearDiffOperator(std::shared_ptr<const Ring> ring) : ring_(std::move(ring)) {}
    LinearDiffOperator(LocalOperator local); // implicit: locals embed

    static LinearDiffOperator nabla_inverse(const Rational& d1, const Rational& d2,
                                            const LocalOperator& inner);

    const LocalOperator& local() const { return local_; }
    const std::vector<NonlocalTerm>& nonlocal() const { return nonlocal_; }
    const std::shared_ptr<const Ring>& ring() const { return ring_; }

    bool is_local() const { return nonlocal_.empty(); }
    bool is_zero() const { return local_.is_zero() && nonlocal_.empty(); }
    bool operator==(const LinearDiffOperator& o) const;

    LinearDiffOperator operator-() const;
    LinearDiffOperator& operator+=(const LinearDiffOperator& o);
    LinearDiffOperator& operator-=(const LinearDiffOperator& o);
    friend LinearDiffOperator operator+(LinearDiffOperator a, const LinearDiffOperator& b) {
        return a += b;
    }
    friend LinearDiffOperator operator-(LinearDiffOperator a, const LinearDiffOperator& b) {
        return a -= b;
    }
    friend LinearDiffOperator operator*(const Rational& c, const LinearDiffOperator& op);

    // Exact application; defined for local operators only.
    JetPolynomial apply(const JetPolynomial& q) const;

    // Composition within the minimal nonlocal calculus: nabla_d^{-1} commutes
    // with constant-coefficient operators; depth-1 is enforced.
    LinearDiffOperator compose(const LinearDiffOperator& o) const;

    // Requires constant-coefficient inner operators: (nabla^{-1})* = -nabla^{-1}.
    LinearDiffOperator adjoint() const;

    std::string str() const;

private:
    std::shared_ptr<const Ring> ring_;
    LocalOperator local_;
    std::vector<NonlocalTerm> nonlocal_;

    void normalize();
};

LinearDiffOperator commutator(const LinearDiffOperator& a, const LinearDiffOperator& b);

struct OperatorEquality {
    bool equal;
    LinearDiffOperator residual;
};
OperatorEquality operator_equal(const LinearDiffOperator& a, const LinearDiffOperator& b);

// 2x2 matrix of operators (K, J0, J1, J1', R, R').
class OperatorMatrix {
public:
    OperatorMatrix() = default;
    OperatorMatrix(LinearDiffOperator a11, LinearDiffOperator a12, LinearDiffOperator a21,
                   LinearDiffOperator a22);

    const LinearDiffOperator& at(int i, int j) const { return e_[i][j]; }
    LinearDiffOperator& at(int i, int j) { return e_[i][j]; }

    bool is_local() const;
    bool operator==(const OperatorMatrix& o) const;

    OperatorMatrix compose(const OperatorMatrix& o) const;
    OperatorMatrix operator-(const OperatorMatrix& o) const;

    static OperatorMatrix identity(std::shared_ptr<const Ring> ring = Ring::standard());

    std::string str() const;

private:
    std::array<std::array<LinearDiffOperator, 2>, 2> e_;
};

// J* = -J entry-wise, i.e. adjoint(J_ji) == -J_ij. Throws
// UnsupportedOperationError when an entry's adjoint is outside the calculus.
bool is_skew_adjoint(const OperatorMatrix& J);

} // namespace mave
