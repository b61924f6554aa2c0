#include "mave/numsim.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <fftw3.h>

#include "mave/errors.hpp"

namespace mave {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

bool power_of_two(int n) {
    return n > 0 && (n & (n - 1)) == 0;
}

} // namespace

SpectralGrid::SpectralGrid(int n1, int n2) : n1_(n1), n2_(n2), nc_(n2 / 2 + 1) {
    if (!power_of_two(n1) || !power_of_two(n2))
        throw ValidationError("grid sizes must be powers of two");
    rbuf_.assign(size(), 0.0);
    cbuf_.assign(spec_size(), {0.0, 0.0});
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan_fwd_ = fftw_plan_dft_r2c_2d(n1_, n2_, rbuf_.data(),
                                         reinterpret_cast<fftw_complex*>(cbuf_.data()),
                                         FFTW_ESTIMATE);
        plan_bwd_ = fftw_plan_dft_c2r_2d(n1_, n2_,
                                         reinterpret_cast<fftw_complex*>(cbuf_.data()),
                                         rbuf_.data(), FFTW_ESTIMATE);
    }
    // 2/3-rule mask
    mask_.assign(spec_size(), 1);
    for (int i1 = 0; i1 < n1_; ++i1)
        for (int i2 = 0; i2 < nc_; ++i2)
            if (std::abs(k1(i1)) > n1_ / 3 || k2(i2) > n2_ / 3)
                mask_[std::size_t(i1) * nc_ + i2] = 0;
}

SpectralGrid::~SpectralGrid() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

Spectrum SpectralGrid::fft(const RealField& f) const {
    rbuf_ = f;
    fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_fwd_), rbuf_.data(),
                         reinterpret_cast<fftw_complex*>(cbuf_.data()));
    return cbuf_;
}

RealField SpectralGrid::ifft(const Spectrum& s) const {
    cbuf_ = s;
    fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_bwd_),
                         reinterpret_cast<fftw_complex*>(cbuf_.data()), rbuf_.data());
    RealField out = rbuf_;
    const double inv = 1.0 / double(size());
    for (double& x : out)
        x *= inv;
    return out;
}

void SpectralGrid::dealias(Spectrum& s) const {
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!mask_[i])
            s[i] = 0.0;
}

RealField SpectralGrid::derivative(const Spectrum& s, int d1, int d2) const {
    Spectrum w = s;
    for (int i1 = 0; i1 < n1_; ++i1) {
        for (int i2 = 0; i2 < nc_; ++i2) {
            std::complex<double> factor{1.0, 0.0};
            if (d1 + d2 > 0 && (i1 == n1_ / 2 || i2 == n2_ / 2)) {
                factor = 0.0; // unpaired Nyquist mode has no consistent derivative
            } else {
                const std::complex<double> m{0.0, double(k1(i1))};
                const std::complex<double> m2{0.0, double(k2(i2))};
                for (int a = 0; a < d1; ++a)
                    factor *= m;
                for (int a = 0; a < d2; ++a)
                    factor *= m2;
            }
            w[std::size_t(i1) * nc_ + i2] *= factor;
        }
    }
    return ifft(w);
}

double max_abs(const RealField& f) {
    double m = 0.0;
    for (double x : f)
        m = std::max(m, std::abs(x));
    return m;
}

// ---------------------------------------------------------------------------

Simulator::Simulator(GridSpec spec, const MACoefficients& coeffs)
    : grid_(spec.n1, spec.n2), coeffs_(coeffs) {
    coeffs_.validate();
    for (int i = 0; i < 9; ++i)
        c_[i] = to_double(coeffs_.c[i]);
}

FieldState Simulator::make_state(const std::vector<FourierMode>& u_modes,
                                 const std::vector<FourierMode>& v_modes, double u_const,
                                 double v_const) const {
    FieldState s;
    s.u.assign(grid_.size(), u_const);
    s.v.assign(grid_.size(), v_const);
    auto add = [&](RealField& f, const std::vector<FourierMode>& modes) {
        for (int i1 = 0; i1 < grid_.n1(); ++i1)
            for (int i2 = 0; i2 < grid_.n2(); ++i2)
                for (const FourierMode& m : modes)
                    f[std::size_t(i1) * grid_.n2() + i2] +=
                        m.amplitude *
                        std::cos(m.k1 * grid_.z1(i1) + m.k2 * grid_.z2(i2) + m.phase);
    };
    add(s.u, u_modes);
    add(s.v, v_modes);
    return s;
}

void Simulator::rhs(const RealField& u, const RealField& v, RealField& du, RealField& dv) const {
    Spectrum uh = grid_.fft(u);
    Spectrum vh = grid_.fft(v);
    grid_.dealias(uh);
    grid_.dealias(vh);
    const RealField u11 = grid_.derivative(uh, 2, 0);
    const RealField u12 = grid_.derivative(uh, 1, 1);
    const RealField u22 = grid_.derivative(uh, 0, 2);
    const RealField v1 = grid_.derivative(vh, 1, 0);
    const RealField v2 = grid_.derivative(vh, 0, 1);
    const RealField vg = grid_.ifft(vh);

    const double c1 = c_[0], c2 = c_[1], c3 = c_[2], c4 = c_[3], c5 = c_[4], c6 = c_[5],
                 c7 = c_[6], c8 = c_[7], c9 = c_[8];
    du.resize(grid_.size());
    dv.resize(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const double ncu1 = c1 * u11[i] + c2 * u12[i];
        const double ncu2 = c1 * u12[i] + c2 * u22[i];
        du[i] = vg[i];
        dv[i] = v1[i] * ncu2 - v2[i] * ncu1 + c3 * (u11[i] * u22[i] - u12[i] * u12[i]) +
                c4 * v1[i] + c5 * v2[i] + c6 * u11[i] + c7 * u12[i] + c8 * u22[i] + c9;
    }
}

void Simulator::rhs_linearized(const RealField& u, const RealField& v, const RealField& phi,
                               const RealField& psi, RealField& dphi, RealField& dpsi) const {
    Spectrum uh = grid_.fft(u);
    Spectrum vh = grid_.fft(v);
    Spectrum ph = grid_.fft(phi);
    Spectrum sh = grid_.fft(psi);
    grid_.dealias(uh);
    grid_.dealias(vh);
    grid_.dealias(ph);
    grid_.dealias(sh);
    const RealField u11 = grid_.derivative(uh, 2, 0);
    const RealField u12 = grid_.derivative(uh, 1, 1);
    const RealField u22 = grid_.derivative(uh, 0, 2);
    const RealField v1 = grid_.derivative(vh, 1, 0);
    const RealField v2 = grid_.derivative(vh, 0, 1);
    const RealField p11 = grid_.derivative(ph, 2, 0);
    const RealField p12 = grid_.derivative(ph, 1, 1);
    const RealField p22 = grid_.derivative(ph, 0, 2);
    const RealField s1 = grid_.derivative(sh, 1, 0);
    const RealField s2 = grid_.derivative(sh, 0, 1);
    const RealField sg = grid_.ifft(sh);

    const double c1 = c_[0], c2 = c_[1], c3 = c_[2], c4 = c_[3], c5 = c_[4], c6 = c_[5],
                 c7 = c_[6], c8 = c_[7];
    dphi.resize(grid_.size());
    dpsi.resize(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const double ncu1 = c1 * u11[i] + c2 * u12[i];
        const double ncu2 = c1 * u12[i] + c2 * u22[i];
        const double ncp1 = c1 * p11[i] + c2 * p12[i];
        const double ncp2 = c1 * p12[i] + c2 * p22[i];
        dphi[i] = sg[i];
        dpsi[i] = ncu2 * s1[i] + v1[i] * ncp2 - ncu1 * s2[i] - v2[i] * ncp1 +
                  c3 * (u22[i] * p11[i] + u11[i] * p22[i] - 2.0 * u12[i] * p12[i]) +
                  c4 * s1[i] + c5 * s2[i] + c6 * p11[i] + c7 * p12[i] + c8 * p22[i];
    }
}

namespace {

void check_finite(const RealField& f, double t) {
    for (double x : f)
        if (!std::isfinite(x) || std::abs(x) > 1e12)
            throw BlowUpError("simulation blew up; last valid time " + std::to_string(t), t);
}

void axpy(RealField& y, double a, const RealField& x) {
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] += a * x[i];
}

} // namespace

FieldState Simulator::evolve(FieldState s, const EvolveOptions& o, const Monitor& monitor) const {
    if (o.strict_conservation && coeffs_.c9() != 0)
        throw ValidationError(
            "strict conservation checks on the torus require c9 = 0 (a constant source "
            "shifts the mean of v linearly)");
    // CFL-style advective bound
    {
        Spectrum uh = grid_.fft(s.u);
        const RealField u11 = grid_.derivative(uh, 2, 0);
        const RealField u12 = grid_.derivative(uh, 1, 1);
        const RealField u22 = grid_.derivative(uh, 0, 2);
        double speed = std::abs(c_[3]) + std::abs(c_[4]);
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            const double a1 = std::abs(c_[0] * u11[i] + c_[1] * u12[i]);
            const double a2 = std::abs(c_[0] * u12[i] + c_[1] * u22[i]);
            speed = std::max(speed, a1 + a2 + std::abs(c_[3]) + std::abs(c_[4]));
        }
        const double kmax = std::max(grid_.n1(), grid_.n2()) / 2.0;
        if (o.dt * speed * kmax > o.cfl_threshold)
            throw ValidationError("time step violates the advective stability bound: dt*speed*kmax = " +
                                  std::to_string(o.dt * speed * kmax) + " > " +
                                  std::to_string(o.cfl_threshold));
    }

    RealField k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
    RealField tu, tv;
    if (monitor)
        monitor(s);
    for (int step = 0; step < o.steps; ++step) {
        const double dt = o.dt;
        rhs(s.u, s.v, k1u, k1v);
        tu = s.u;
        tv = s.v;
        axpy(tu, dt / 2, k1u);
        axpy(tv, dt / 2, k1v);
        rhs(tu, tv, k2u, k2v);
        tu = s.u;
        tv = s.v;
        axpy(tu, dt / 2, k2u);
        axpy(tv, dt / 2, k2v);
        rhs(tu, tv, k3u, k3v);
        tu = s.u;
        tv = s.v;
        axpy(tu, dt, k3u);
        axpy(tv, dt, k3v);
        rhs(tu, tv, k4u, k4v);
        for (std::size_t i = 0; i < s.u.size(); ++i) {
            s.u[i] += dt / 6 * (k1u[i] + 2 * k2u[i] + 2 * k3u[i] + k4u[i]);
            s.v[i] += dt / 6 * (k1v[i] + 2 * k2v[i] + 2 * k3v[i] + k4v[i]);
        }
        const double t_before = s.t;
        s.t += dt;
        check_finite(s.u, t_before);
        check_finite(s.v, t_before);
        if (monitor && ((step + 1) % o.monitor_every == 0 || step + 1 == o.steps))
            monitor(s);
    }
    return s;
}

std::pair<FieldState, SymmetryFields> Simulator::evolve_linearized(FieldState s,
                                                                   SymmetryFields sym,
                                                                   const EvolveOptions& o) const {
    std::array<RealField*, 4> f{&s.u, &s.v, &sym.phi, &sym.psi};
    std::array<std::array<RealField, 4>, 4> k; // stage x field
    std::array<RealField, 4> tmp;

    auto full_rhs = [&](const std::array<RealField, 4>& in, std::array<RealField, 4>& out) {
        rhs(in[0], in[1], out[0], out[1]);
        rhs_linearized(in[0], in[1], in[2], in[3], out[2], out[3]);
    };

    for (int step = 0; step < o.steps; ++step) {
        const double dt = o.dt;
        std::array<RealField, 4> cur{*f[0], *f[1], *f[2], *f[3]};
        full_rhs(cur, k[0]);
        for (int j = 0; j < 4; ++j) {
            tmp[j] = cur[j];
            axpy(tmp[j], dt / 2, k[0][j]);
        }
        full_rhs(tmp, k[1]);
        for (int j = 0; j < 4; ++j) {
            tmp[j] = cur[j];
            axpy(tmp[j], dt / 2, k[1][j]);
        }
        full_rhs(tmp, k[2]);
        for (int j = 0; j < 4; ++j) {
            tmp[j] = cur[j];
            axpy(tmp[j], dt, k[2][j]);
        }
        full_rhs(tmp, k[3]);
        for (int j = 0; j < 4; ++j)
            for (std::size_t i = 0; i < f[j]->size(); ++i)
                (*f[j])[i] += dt / 6 *
                              (k[0][j][i] + 2 * k[1][j][i] + 2 * k[2][j][i] + k[3][j][i]);
        const double t_before = s.t;
        s.t += dt;
        for (int j = 0; j < 4; ++j)
            check_finite(*f[j], t_before);
    }
    return {std::move(s), std::move(sym)};
}

const RealField& Simulator::jet_grid(JetCache& cache, const Spectrum& uh, const Spectrum& vh,
                                     const JetCoordinate& jc) const {
    auto it = cache.grids.find(jc);
    if (it != cache.grids.end())
        return it->second;
    if (jc.order.t != 0)
        throw DomainError("cannot evaluate a t-derivative jet on the grid: " + jc.name());
    const Spectrum& base = jc.field == Field::U ? uh : vh;
    RealField g = grid_.derivative(base, jc.order.z1, jc.order.z2);
    return cache.grids.emplace(jc, std::move(g)).first->second;
}

RealField Simulator::eval_poly(JetCache& cache, const Spectrum& uh, const Spectrum& vh,
                               const JetPolynomial& p) const {
    RealField out(grid_.size(), 0.0);
    for (const Monomial& m : p.terms()) {
        if (m.z[0] > 0 || m.z[1] > 0)
            throw DomainError("density contains explicit z1/z2; not defined on the torus");
        if (!m.params.empty())
            throw DomainError("density contains formal parameters; cannot evaluate numerically");
        RealField term(grid_.size(), to_double(m.coeff));
        for (const auto& [jc, e] : m.jets) {
            const RealField& g = jet_grid(cache, uh, vh, jc);
            for (std::size_t i = 0; i < term.size(); ++i)
                for (std::uint32_t a = 0; a < e; ++a)
                    term[i] *= g[i];
        }
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] += term[i];
    }
    return out;
}

RealField Simulator::apply_local(JetCache& cache, const Spectrum& uh, const Spectrum& vh,
                                 const LocalOperator& op, const Spectrum& target,
                                 const Spectrum* target_dt) const {
    RealField out(grid_.size(), 0.0);
    for (const auto& [w, p] : op.terms()) {
        if (w.t > 1 || (w.t == 1 && !target_dt))
            throw DomainError("operator word " + w.str() + " needs an on-shell time derivative");
        const Spectrum& base = (w.t == 1) ? *target_dt : target;
        RealField dg = grid_.derivative(base, w.z1, w.z2);
        RealField cg = eval_poly(cache, uh, vh, p);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] += cg[i] * dg[i];
    }
    return out;
}

double Simulator::functional_eval(const JetPolynomial& density, const FieldState& s) const {
    Spectrum uh = grid_.fft(s.u);
    Spectrum vh = grid_.fft(s.v);
    JetCache cache;
    const RealField g = eval_poly(cache, uh, vh, density);
    double sum = 0.0;
    for (double x : g)
        sum += x;
    const double cell = (2.0 * M_PI / grid_.n1()) * (2.0 * M_PI / grid_.n2());
    return sum * cell;
}

RealField Simulator::invert_nabla_c(const RealField& f, double* kernel_energy) const {
    Spectrum fh = grid_.fft(f);
    const double d1 = c_[0], d2 = c_[1];
    double kern = 0.0, total = 0.0;
    for (int i1 = 0; i1 < grid_.n1(); ++i1) {
        for (int i2 = 0; i2 < grid_.n2() / 2 + 1; ++i2) {
            const std::size_t idx = std::size_t(i1) * (grid_.n2() / 2 + 1) + i2;
            const long k1 = grid_.k1(i1);
            const long k2 = grid_.k2(i2);
            // exact kernel test with the rational coefficients
            const bool in_kernel =
                coeffs_.c1() * Rational(k1) + coeffs_.c2() * Rational(k2) == 0;
            total += std::norm(fh[idx]);
            if (in_kernel) {
                kern += std::norm(fh[idx]);
                fh[idx] = 0.0;
            } else {
                const std::complex<double> sym{0.0, d1 * double(k1) + d2 * double(k2)};
                fh[idx] /= sym;
            }
        }
    }
    if (kernel_energy)
        *kernel_energy = total > 0 ? std::sqrt(kern / total) : 0.0;
    return grid_.ifft(fh);
}

RealField Simulator::kernel_part(const RealField& f) const {
    Spectrum fh = grid_.fft(f);
    for (int i1 = 0; i1 < grid_.n1(); ++i1) {
        for (int i2 = 0; i2 < grid_.n2() / 2 + 1; ++i2) {
            const std::size_t idx = std::size_t(i1) * (grid_.n2() / 2 + 1) + i2;
            const bool in_kernel = coeffs_.c1() * Rational(grid_.k1(i1)) +
                                       coeffs_.c2() * Rational(grid_.k2(i2)) ==
                                   0;
            if (!in_kernel)
                fh[idx] = 0.0;
        }
    }
    return grid_.ifft(fh);
}

SymmetryFields Simulator::recursion_apply(const FieldState& s, const SymmetryFields& sym,
                                          FactorVariant variant, double* kernel_energy) const {
    if (variant != FactorVariant::Generic1 && variant != FactorVariant::C3Zero)
        throw ValidationError("numeric recursion is implemented for the generic1 and c3zero "
                              "relations");
    if (kernel_energy)
        *kernel_energy = 0.0;
    const OperatorMatrix R = recursion_matrix(coeffs_, variant);
    Spectrum uh = grid_.fft(s.u);
    Spectrum vh = grid_.fft(s.v);
    grid_.dealias(uh);
    grid_.dealias(vh);
    Spectrum ph = grid_.fft(sym.phi);
    Spectrum sh = grid_.fft(sym.psi);
    grid_.dealias(ph);
    grid_.dealias(sh);
    JetCache cache;

    std::array<const Spectrum*, 2> tgt{&ph, &sh};
    std::array<RealField, 2> out;
    for (int i = 0; i < 2; ++i) {
        out[i].assign(grid_.size(), 0.0);
        for (int j = 0; j < 2; ++j) {
            const LinearDiffOperator& e = R.at(i, j);
            if (!e.local().is_zero()) {
                RealField part = apply_local(cache, uh, vh, e.local(), *tgt[j], nullptr);
                for (std::size_t x = 0; x < out[i].size(); ++x)
                    out[i][x] += part[x];
            }
            for (const NonlocalTerm& nt : e.nonlocal()) {
                if (nt.dir1 * coeffs_.c2() != nt.dir2 * coeffs_.c1())
                    throw DomainError("nonlocal direction is not proportional to nabla_c");
                RealField inner = apply_local(cache, uh, vh, nt.inner, *tgt[j], nullptr);
                // stored directions are normalized multiples of (c1, c2)
                double kfrac = 0.0;
                RealField inv = invert_nabla_c(inner, kernel_energy ? &kfrac : nullptr);
                if (kernel_energy)
                    *kernel_energy = std::max(*kernel_energy, kfrac);
                const double scale =
                    to_double(coeffs_.c1() != 0 ? coeffs_.c1() / nt.dir1 : coeffs_.c2() / nt.dir2);
                for (std::size_t x = 0; x < out[i].size(); ++x)
                    out[i][x] += scale * inv[x];
            }
        }
    }

    // The spectral inverse leaves the symbol's kernel undetermined; the first
    // defining relation A1 phi~ = B1 phi pins the kernel component of psi~
    // (phi~'s kernel component is pure gauge). Solve a1 psi~ = B1' phi
    // + b1 psi - alpha1 phi~ on the kernel subspace.
    {
        const SkewFactorSet fs = build_factors(coeffs_, variant);
        const JetPolynomial a1p = fs.A1.coefficient(MultiIndex{1, 0, 0});
        const double a1 = to_double(a1p.constant_value());
        LocalOperator alpha1 = fs.A1;
        alpha1 -= a1p.constant_value() * LocalOperator::derivative(MultiIndex{1, 0, 0});
        const JetPolynomial b1p = fs.B1.coefficient(MultiIndex{1, 0, 0});
        LocalOperator B1rest = fs.B1;
        if (!b1p.is_zero())
            B1rest -= b1p.constant_value() * LocalOperator::derivative(MultiIndex{1, 0, 0});

        RealField g = apply_local(cache, uh, vh, B1rest, ph, nullptr);
        if (!b1p.is_zero()) {
            const RealField psig = grid_.ifft(sh);
            const double b1 = to_double(b1p.constant_value());
            for (std::size_t x = 0; x < g.size(); ++x)
                g[x] += b1 * psig[x];
        }
        Spectrum tilde_ph = grid_.fft(out[0]);
        RealField a1phi = apply_local(cache, uh, vh, alpha1, tilde_ph, nullptr);
        for (std::size_t x = 0; x < g.size(); ++x)
            g[x] = (g[x] - a1phi[x]) / a1;
        const RealField pinned = kernel_part(g);
        const RealField stray = kernel_part(out[1]);
        for (std::size_t x = 0; x < out[1].size(); ++x)
            out[1][x] += pinned[x] - stray[x];
    }
    return SymmetryFields{std::move(out[0]), std::move(out[1])};
}

std::pair<double, double> Simulator::recursion_residual(const FieldState& s,
                                                        const SymmetryFields& sym,
                                                        const SymmetryFields& tilde,
                                                        FactorVariant variant) const {
    const SkewFactorSet fs = build_factors(coeffs_, variant);
    Spectrum uh = grid_.fft(s.u);
    Spectrum vh = grid_.fft(s.v);
    grid_.dealias(uh);
    grid_.dealias(vh);
    Spectrum ph = grid_.fft(sym.phi);
    Spectrum sh = grid_.fft(sym.psi);
    Spectrum th = grid_.fft(tilde.phi);
    Spectrum qh = grid_.fft(tilde.psi);
    JetCache cache;

    RealField r1 = apply_local(cache, uh, vh, fs.A1, th, &qh);
    RealField b1 = apply_local(cache, uh, vh, fs.B1, ph, &sh);
    RealField r2 = apply_local(cache, uh, vh, fs.A2, th, &qh);
    RealField b2 = apply_local(cache, uh, vh, fs.B2, ph, &sh);
    for (std::size_t i = 0; i < r1.size(); ++i) {
        r1[i] -= b1[i];
        r2[i] -= b2[i];
    }
    return {max_abs(r1), max_abs(r2)};
}

} // namespace mave
