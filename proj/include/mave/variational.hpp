#pragma once

#include <array>

#include "mave/diffop.hpp"
#include "mave/jetpoly.hpp"

namespace mave {

// Frechet derivative (linearization) of F along the given field:
// D_F = sum_coords (dF/d w_alpha) D^alpha.
LocalOperator frechet(const JetPolynomial& F, Field wrt);
std::array<LocalOperator, 2> frechet_both(const JetPolynomial& F);

// The four Helmholtz expressions for F = -u_tt + f(u_t1, u_t2, u11, u12, u22):
// the coefficients of D_t, D_1, D_2 and the operator-free term of D*_F - D_F.
struct HelmholtzResult {
    std::array<JetPolynomial, 4> residuals;
    bool self_adjoint;
};
HelmholtzResult helmholtz_residuals(const JetPolynomial& F);

// Euler (variational-derivative) operator E_w(h) = sum (-1)^|a| D^a(dh/dw_a).
JetPolynomial euler_variational(const JetPolynomial& h, Field wrt);

// L[u] = int_0^1 u F[lambda u] dlambda, evaluated exactly; requires
// helmholtz_residuals(F) to pass.
JetPolynomial homotopy_lagrangian(const JetPolynomial& F);

// True iff both Euler expressions vanish.
bool is_total_divergence(const JetPolynomial& h);

// Alternating form over differentials of jet coordinates; degree 2 or 3.
// Terms keep strictly increasing factor lists with sign normalization.
class WedgeForm {
public:
    struct Term {
        JetPolynomial coeff;
        std::vector<JetCoordinate> factors;
    };

    WedgeForm() = default;
    explicit WedgeForm(std::vector<Term> raw);

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool operator==(const WedgeForm& o) const;

    WedgeForm operator+(const WedgeForm& o) const;

    // Vertical differential: d(p du_A ^ du_B) = sum_w (dp/dw) du_w ^ du_A ^ du_B.
    WedgeForm vertical_differential() const;

    std::string str() const;

private:
    std::vector<Term> terms_;
};

// omega = 1/2 du^i ^ K_ij du^j for a local operator matrix K.
WedgeForm symplectic_form(const OperatorMatrix& K);

struct ClosureResult {
    bool closed;   // normal form reached zero
    bool stuck;    // reduction halted on a nonzero form (report INCONCLUSIVE)
    WedgeForm residual;
    int steps;
};

// Checks d(omega) = 0 modulo total spatial divergence via the rewrite
// du_{A+e_i} ^ eta = -du_A ^ D_i(eta), searching moves smallest-factor-first
// and never revisiting a form. Requires K local and skew-adjoint.
ClosureResult symplectic_closure(const OperatorMatrix& K);

} // namespace mave
