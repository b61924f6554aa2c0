#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "mave/diffop.hpp"
#include "mave/jetpoly.hpp"
#include "mave/rational.hpp"

namespace mave {

enum class CoeffCase { Generic, C1Zero, C2Zero, C3Zero };

std::string to_string(CoeffCase c);
CoeffCase coeff_case_from_string(const std::string& s);

// The nine constants of the symplectic Monge-Ampere family with a case tag.
struct MACoefficients {
    std::array<Rational, 9> c{}; // c[0] = c1, ..., c[8] = c9
    CoeffCase kase = CoeffCase::Generic;

    const Rational& c1() const { return c[0]; }
    const Rational& c2() const { return c[1]; }
    const Rational& c3() const { return c[2]; }
    const Rational& c4() const { return c[3]; }
    const Rational& c5() const { return c[4]; }
    const Rational& c6() const { return c[5]; }
    const Rational& c7() const { return c[6]; }
    const Rational& c8() const { return c[7]; }
    const Rational& c9() const { return c[8]; }

    void validate() const; // case invariants; throws ValidationError
    bool is_integrable() const;

    std::string to_json() const;
    static MACoefficients from_json(const std::string& text);
    std::string str() const;
};

// Coefficients of the general symplectic Monge-Ampere equation (3x3 Hessian
// minors); epsilon multiplies the full Hessian determinant.
struct GeneralMACoefficients {
    Rational eps, h1, h2, h3, g1, g2, g3, s1, s2, s3, tau1, tau2, tau3, nu;

    // Left side of the hydrodynamic-integrability condition.
    Rational integrability_residual() const;
};

// Identification of the evolutionary family inside the general equation
// (t plays the role of z3; epsilon = 0, h3 = c3).
GeneralMACoefficients to_general(const MACoefficients& c);

// Direct residual of the evolutionary integrability condition:
// c2(c1c7 - c2c6 + c3c4) - c1(c1c8 + c3c5) + c3^2.
Rational intcon_residual(const MACoefficients& c);

// Direct evaluation cross-checked against the general-equation route.
// Throws InternalConsistencyError when the two disagree.
Rational integrability_residual(const MACoefficients& c);

// Everything derived from one coefficient vector: the two-component right
// side, the symmetry-condition operator and the helper operators.
struct ModelBundle {
    MACoefficients coeffs;
    JetPolynomial rhs_one;    // v_t expression (= f with u_t -> v)
    LocalOperator symmetry_op;
    LocalOperator nabla_c;
    LocalOperator L12_1, L12_2, L12_t;
};

ModelBundle build_model(const MACoefficients& c);

// u_t -> v identification, prolonged to all derivatives.
JetPolynomial embed_ut(const JetPolynomial& p);

// No t-derivatives remain on u or v: u_t -> v, v_t -> rhs, to a fixpoint.
JetPolynomial on_shell_reduce(const JetPolynomial& p, const ModelBundle& m);
LocalOperator on_shell_reduce(const LocalOperator& op, const ModelBundle& m);

enum class C9Mode { Free, Zero };

// Draws random small rationals and solves the case's integrability relation
// for one pivot coefficient (c7 generic/c3zero, c6 for c1=0, c8 for c2=0).
MACoefficients sample_integrable(CoeffCase kase, std::uint64_t seed, C9Mode c9 = C9Mode::Free);

// c = (1,1,1,-1,1,1,3,1,-1): satisfies the integrability condition and both
// bi-Hamiltonian constraints; used as the golden regression instance.
MACoefficients canonical_instance();

// The involution z1 <-> -z2, t -> -t on coefficients and jet expressions.
MACoefficients discrete_transform(const MACoefficients& c);
JetPolynomial discrete_transform(const JetPolynomial& p);
LocalOperator discrete_transform(const LocalOperator& op);

} // namespace mave
