#pragma once

#include <optional>
#include <string>

#include "mave/diffop.hpp"
#include "mave/factorization.hpp"
#include "mave/ma_family.hpp"

namespace mave {

// First Hamiltonian structure: symplectic operator K (Poisson brackets of the
// Dirac constraints), its inverse J0, the density H1, the degenerate
// Lagrangian L2 and the momentum pi_u.
struct HamiltonianStructure {
    OperatorMatrix K;
    OperatorMatrix J0;
    JetPolynomial H1;
    JetPolynomial L2;
    JetPolynomial pi_u;
};

HamiltonianStructure build_first_structure(const MACoefficients& c);

enum class SecondVariant { J1, J1Prime, J1Special };

std::string to_string(SecondVariant v);
// Second structures applicable to a case: J1 for generic and c2 = 0,
// J1' for generic and c1 = 0, the diagonal special form for c3 = 0.
std::vector<SecondVariant> compatible_second_variants(CoeffCase kase);
// Recursion-matrix variant whose composition with J0 yields the structure.
FactorVariant recursion_variant_for(const MACoefficients& c, SecondVariant v);

// The "Hamiltonian" constraint: the value c9 must take for the variant.
Rational second_constraint_c9(const MACoefficients& c, SecondVariant v);

struct SecondStructure {
    SecondVariant variant;
    MACoefficients coeffs;
    Rational c9_required;
    OperatorMatrix J;
    JetPolynomial H0; // contains explicit z1, z2 and the parameter s0
};

// Builds J_second and H0 from the published displays. s0 defaults to the
// ring parameter; passing a rational fixes the integration constant.
// Throws ConstraintError (with the expected value) when c9 violates the
// variant's constraint and enforce_constraint is true.
SecondStructure build_second_structure(const MACoefficients& c, SecondVariant v,
                                       std::optional<Rational> s0 = std::nullopt,
                                       bool enforce_constraint = true);

struct FlowResult {
    bool ok;
    JetPolynomial r1, r2; // row residuals, after clearing where nonlocal
};

// Checks J (delta_u H, delta_v H)^T = (v, v_t)^T exactly; rows with nonlocal
// entries are verified after left-composing with nabla_c.
FlowResult verify_flow(const OperatorMatrix& J, const JetPolynomial& H, const ModelBundle& m);

struct RJ0Result {
    bool ok;
    bool skew_ok;     // J_second skew-adjoint (J1/J1' families)
    bool rel_ok;      // J1^22 = (B1 + nabla^{-1} c3^2 D2^2)/c1 for J1
};

// R o J0 = J_second, entry-wise exact equality after normalization.
RJ0Result verify_RJ0(const MACoefficients& c, SecondVariant v);

// Closed-form solution of {intcon, c9, c9'} with free (c1, c2, c3, c5, c6, c8).
MACoefficients tri_solve(const Rational& c1, const Rational& c2, const Rational& c3,
                         const Rational& c5, const Rational& c6, const Rational& c8);

enum class SkewStatus { Pass, Fail, Unsupported };
SkewStatus skew_adjoint_status(const OperatorMatrix& J);

} // namespace mave
