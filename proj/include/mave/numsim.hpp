#pragma once

#include <complex>
#include <functional>
#include <map>
#include <vector>

#include "mave/factorization.hpp"
#include "mave/ma_family.hpp"

namespace mave {

using RealField = std::vector<double>;
using Spectrum = std::vector<std::complex<double>>;

struct GridSpec {
    int n1 = 64;
    int n2 = 64;
};

// Doubly periodic grid on [0, 2pi)^2 with real-to-complex FFTW transforms,
// integer wavenumber tables and a precomputed 2/3 dealiasing mask.
class SpectralGrid {
public:
    SpectralGrid(int n1, int n2); // powers of two required
    ~SpectralGrid();
    SpectralGrid(const SpectralGrid&) = delete;
    SpectralGrid& operator=(const SpectralGrid&) = delete;

    int n1() const { return n1_; }
    int n2() const { return n2_; }
    std::size_t size() const { return std::size_t(n1_) * n2_; }
    std::size_t spec_size() const { return std::size_t(n1_) * nc_; }

    int k1(int i1) const { return i1 <= n1_ / 2 ? i1 : i1 - n1_; }
    int k2(int i2) const { return i2; } // r2c layout: 0..n2/2

    Spectrum fft(const RealField& f) const;
    RealField ifft(const Spectrum& s) const; // normalized
    void dealias(Spectrum& s) const;

    // Inverse transform of (i k1)^d1 (i k2)^d2 * s.
    RealField derivative(const Spectrum& s, int d1, int d2) const;

    double z1(int i1) const { return 2.0 * M_PI * i1 / n1_; }
    double z2(int i2) const { return 2.0 * M_PI * i2 / n2_; }

private:
    int n1_, n2_, nc_;
    std::vector<char> mask_;
    void* plan_fwd_;
    void* plan_bwd_;
    mutable RealField rbuf_;
    mutable Spectrum cbuf_;
};

struct FieldState {
    RealField u, v;
    double t = 0.0;
};

struct SymmetryFields {
    RealField phi, psi;
};

struct FourierMode {
    int k1 = 0;
    int k2 = 0;
    double amplitude = 0.0;
    double phase = 0.0;
};

struct EvolveOptions {
    double dt = 1e-3;
    int steps = 100;
    int monitor_every = 10;
    double cfl_threshold = 0.5;
    bool strict_conservation = false; // require c9 = 0
};

double max_abs(const RealField& f);

// Pseudo-spectral integrator for the two-component evolutionary system with
// classical RK4 time stepping.
class Simulator {
public:
    Simulator(GridSpec spec, const MACoefficients& coeffs);

    const SpectralGrid& grid() const { return grid_; }
    const MACoefficients& coeffs() const { return coeffs_; }

    FieldState make_state(const std::vector<FourierMode>& u_modes,
                          const std::vector<FourierMode>& v_modes,
                          double u_const = 0.0, double v_const = 0.0) const;

    // (du, dv) of the evolutionary system at the given fields.
    void rhs(const RealField& u, const RealField& v, RealField& du, RealField& dv) const;

    using Monitor = std::function<void(const FieldState&)>;
    // Throws BlowUpError on NaN/overflow, ValidationError on the CFL bound.
    FieldState evolve(FieldState s, const EvolveOptions& o, const Monitor& monitor = {}) const;

    // Carrier and symmetry fields advance in lockstep through shared RK4
    // stages; (phi, psi) follow the linearized system.
    std::pair<FieldState, SymmetryFields> evolve_linearized(FieldState s, SymmetryFields sym,
                                                            const EvolveOptions& o) const;

    // Exact spectral quadrature of a z-free, parameter-free density of
    // spatial jets. Throws DomainError otherwise.
    double functional_eval(const JetPolynomial& density, const FieldState& s) const;

    // Spectral inversion of nabla_c: divide by i(c1 k1 + c2 k2), project the
    // symbol's kernel to zero. Reports the kernel energy fraction if asked.
    RealField invert_nabla_c(const RealField& f, double* kernel_energy = nullptr) const;

    // (phi~, psi~) from the explicit recursion relations of the variant
    // (Generic1 or C3Zero), nabla_c^{-1} realized spectrally. kernel_energy,
    // when given, receives the largest kernel-energy fraction seen by the
    // inversions (the precondition asks for it to be small).
    SymmetryFields recursion_apply(const FieldState& s, const SymmetryFields& sym,
                                   FactorVariant variant,
                                   double* kernel_energy = nullptr) const;

    // Residual infinity-norms of the defining relations A_i(phi~) = B_i(phi),
    // D_t replaced by the on-shell time derivatives (psi, psi~).
    std::pair<double, double> recursion_residual(const FieldState& s, const SymmetryFields& sym,
                                                 const SymmetryFields& tilde,
                                                 FactorVariant variant) const;

private:
    SpectralGrid grid_;
    MACoefficients coeffs_;
    std::array<double, 9> c_;

    struct JetCache {
        std::map<JetCoordinate, RealField> grids;
    };
    RealField kernel_part(const RealField& f) const;
    const RealField& jet_grid(JetCache& cache, const Spectrum& uh, const Spectrum& vh,
                              const JetCoordinate& jc) const;
    RealField eval_poly(JetCache& cache, const Spectrum& uh, const Spectrum& vh,
                        const JetPolynomial& p) const;
    RealField apply_local(JetCache& cache, const Spectrum& uh, const Spectrum& vh,
                          const LocalOperator& op, const Spectrum& target,
                          const Spectrum* target_dt) const;
    void rhs_linearized(const RealField& u, const RealField& v, const RealField& phi,
                        const RealField& psi, RealField& dphi, RealField& dpsi) const;
};

} // namespace mave
