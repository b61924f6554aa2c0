#pragma once

#include <array>
#include <string>

#include "mave/diffop.hpp"
#include "mave/ma_family.hpp"

namespace mave {

// The six published skew-factor sets. C2ZeroAlt is the alternative c2 = 0
// choice; it factorizes and gives a Lax pair but no recursion matrix.
enum class FactorVariant { Generic1, Generic2, C1Zero, C2Zero, C2ZeroAlt, C3Zero };

std::string to_string(FactorVariant v);
std::array<FactorVariant, 6> all_factor_variants();
// Variants whose skew-factorized form reproduces the symmetry condition for
// the given case.
std::vector<FactorVariant> compatible_variants(CoeffCase kase);

// A1 B2 - A2 B1 factorization data; A's are first order with constant
// coefficients, B's carry the L-operators.
struct SkewFactorSet {
    FactorVariant variant;
    MACoefficients coeffs;
    LocalOperator A1, A2, B1, B2;
};

// Builds the operators verbatim from the published displays. Throws
// VariantError when the variant is incompatible with the coefficient case.
SkewFactorSet build_factors(const MACoefficients& c, FactorVariant variant);

struct SkewIdentityResult {
    bool ok;
    Rational mu;            // A1B2 - A2B1 = mu * symmetry_op on shell
    LocalOperator residual; // nonzero iff !ok
};
// Determines the unique scalar mu and checks the identity after on-shell
// reduction. Requires the integrability condition.
SkewIdentityResult verify_skew_identity(const SkewFactorSet& s);

struct CommutatorResult {
    bool ok;
    // [A1,A2], [A1,B2]-[A2,B1] (u_t -> v form), [B1,B2] on shell
    std::array<LocalOperator, 3> residuals;
};
CommutatorResult verify_commutators(const SkewFactorSet& s);

struct LaxResult {
    bool ok;
    // [X1,X2] split by lambda degree: 2 raw, 1 raw, 0 on shell
    std::array<LocalOperator, 3> residuals;
};
// X1 = lambda A1 + B1, X2 = lambda A2 + B2 commute on solutions.
LaxResult verify_lax(const SkewFactorSet& s);

// Algebraic relations between the Generic1 and Generic2 sets:
// A1'' = -A2', A2'' = -A1', c2 B1' + c1 B2'' = c3 A1', c2 B2' + c1 B1'' = c3 A2'.
bool cross_relations(const MACoefficients& c);

// The z1 <-> -z2 discrete symmetry maps the Generic1 set at transformed
// coefficients onto the Generic2 set.
bool discrete_symmetry_consistent(const MACoefficients& c);

// The 2x2 recursion operator of the variant, nonlocal entries carried as
// nabla_c^{-1} compositions. C2ZeroAlt has none (VariantError).
OperatorMatrix recursion_matrix(const MACoefficients& c, FactorVariant variant);

// Re-assembles the recursion rows from (A_i, B_i) by eliminating psi~ and
// phi~ and checks them against recursion_matrix after clearing nabla_c.
bool recursion_consistency(const MACoefficients& c, FactorVariant variant);

} // namespace mave
