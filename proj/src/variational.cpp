#include "mave/variational.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "mave/errors.hpp"

namespace mave {

LocalOperator frechet(const JetPolynomial& F, Field wrt) {
    LocalOperator op(F.ring());
    for (const JetCoordinate& jc : F.coordinates(wrt))
        op += LocalOperator::term(F.partial(jc), jc.order);
    return op;
}

std::array<LocalOperator, 2> frechet_both(const JetPolynomial& F) {
    return {frechet(F, Field::U), frechet(F, Field::V)};
}

HelmholtzResult helmholtz_residuals(const JetPolynomial& F) {
    using jets::uc;
    for (const JetCoordinate& jc : F.coordinates()) {
        if (jc.field != Field::U || jc.order.total() != 2)
            throw DomainError("helmholtz test expects second-order expressions in u only, got " +
                              jc.name());
    }
    const JetPolynomial f_t1 = F.partial(uc(1, 1, 0));
    const JetPolynomial f_t2 = F.partial(uc(1, 0, 1));
    const JetPolynomial f_11 = F.partial(uc(0, 2, 0));
    const JetPolynomial f_12 = F.partial(uc(0, 1, 1));
    const JetPolynomial f_22 = F.partial(uc(0, 0, 2));

    auto Dt = [](const JetPolynomial& p) { return p.total_derivative(Axis::T); };
    auto D1 = [](const JetPolynomial& p) { return p.total_derivative(Axis::Z1); };
    auto D2 = [](const JetPolynomial& p) { return p.total_derivative(Axis::Z2); };

    HelmholtzResult r;
    r.residuals[0] = D1(f_t1) + D2(f_t2);
    r.residuals[1] = Dt(f_t1) + rat(2) * D1(f_11) + D2(f_12);
    r.residuals[2] = Dt(f_t2) + rat(2) * D2(f_22) + D1(f_12);
    r.residuals[3] = Dt(D1(f_t1)) + Dt(D2(f_t2)) + D1(D1(f_11)) + D1(D2(f_12)) + D2(D2(f_22));
    r.self_adjoint = true;
    for (const auto& res : r.residuals)
        if (!res.is_zero())
            r.self_adjoint = false;
    return r;
}

JetPolynomial euler_variational(const JetPolynomial& h, Field wrt) {
    JetPolynomial r(h.ring());
    for (const JetCoordinate& jc : h.coordinates(wrt)) {
        JetPolynomial term = h.partial(jc).total_derivative(jc.order);
        if (jc.order.total() % 2 != 0)
            term = -term;
        r += term;
    }
    return r;
}

JetPolynomial homotopy_lagrangian(const JetPolynomial& F) {
    if (!F.coordinates(Field::V).empty())
        throw DomainError("homotopy formula handles one-component expressions in u");
    if (!helmholtz_residuals(F).self_adjoint)
        throw ValidationError("homotopy formula requires a self-adjoint (Lagrangian) expression");
    // u * F[lambda u] integrates to u * m / (deg_u(m) + 1) term by term.
    JetPolynomial L(F.ring());
    const JetPolynomial u0 = JetPolynomial::coordinate(jets::uc(0, 0, 0), F.ring());
    for (const Monomial& m : F.terms()) {
        JetPolynomial piece = JetPolynomial::constant(m.coeff, F.ring());
        for (const auto& [jc, e] : m.jets)
            piece *= JetPolynomial::coordinate(jc, F.ring()).pow(e);
        for (int zi = 0; zi < 2; ++zi)
            if (m.z[zi] > 0)
                piece *= JetPolynomial::zvar(zi + 1, F.ring()).pow(m.z[zi]);
        for (const auto& [pi, e] : m.params)
            piece *= JetPolynomial::parameter(F.ring()->param_name(pi), F.ring()).pow(e);
        const long d = m.jet_degree(Field::U);
        L += rat(1, d + 1) * (u0 * piece);
    }
    return L;
}

bool is_total_divergence(const JetPolynomial& h) {
    return euler_variational(h, Field::U).is_zero() && euler_variational(h, Field::V).is_zero();
}

// ---------------------------------------------------------------------------
// WedgeForm

namespace {

// Sorts factors, returns the permutation sign, or 0 for a repeated factor.
int sort_factors(std::vector<JetCoordinate>& f) {
    int sign = 1;
    for (std::size_t i = 1; i < f.size(); ++i) {
        for (std::size_t j = i; j > 0 && f[j] < f[j - 1]; --j) {
            std::swap(f[j], f[j - 1]);
            sign = -sign;
        }
    }
    for (std::size_t i = 1; i < f.size(); ++i)
        if (f[i] == f[i - 1])
            return 0;
    return sign;
}

} // namespace

WedgeForm::WedgeForm(std::vector<Term> raw) {
    for (auto& t : raw) {
        if (t.coeff.is_zero())
            continue;
        int sign = sort_factors(t.factors);
        if (sign == 0)
            continue;
        if (sign < 0)
            t.coeff = -t.coeff;
        terms_.push_back(std::move(t));
    }
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return a.factors < b.factors; });
    std::vector<Term> merged;
    for (auto& t : terms_) {
        if (!merged.empty() && merged.back().factors == t.factors) {
            merged.back().coeff += t.coeff;
            if (merged.back().coeff.is_zero())
                merged.pop_back();
        } else {
            merged.push_back(std::move(t));
        }
    }
    terms_ = std::move(merged);
}

bool WedgeForm::operator==(const WedgeForm& o) const {
    if (terms_.size() != o.terms_.size())
        return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].factors != o.terms_[i].factors || !(terms_[i].coeff == o.terms_[i].coeff))
            return false;
    return true;
}

WedgeForm WedgeForm::operator+(const WedgeForm& o) const {
    std::vector<Term> all = terms_;
    all.insert(all.end(), o.terms_.begin(), o.terms_.end());
    return WedgeForm(std::move(all));
}

WedgeForm WedgeForm::vertical_differential() const {
    std::vector<Term> out;
    for (const Term& t : terms_) {
        for (const JetCoordinate& w : t.coeff.coordinates()) {
            Term n;
            n.coeff = t.coeff.partial(w);
            n.factors.push_back(w);
            n.factors.insert(n.factors.end(), t.factors.begin(), t.factors.end());
            out.push_back(std::move(n));
        }
    }
    return WedgeForm(std::move(out));
}

std::string WedgeForm::str() const {
    if (terms_.empty())
        return "0";
    std::ostringstream os;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i)
            os << " + ";
        os << "(" << terms_[i].coeff.str() << ")";
        for (const auto& f : terms_[i].factors)
            os << "∧d" << f.name();
    }
    return os.str();
}

WedgeForm symplectic_form(const OperatorMatrix& K) {
    if (!K.is_local())
        throw ValidationError("symplectic form requires a local operator matrix");
    std::vector<WedgeForm::Term> terms;
    const Field fields[2] = {Field::U, Field::V};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (const auto& [word, p] : K.at(i, j).local().terms()) {
                WedgeForm::Term t;
                t.coeff = rat(1, 2) * p;
                t.factors = {JetCoordinate{fields[i], MultiIndex{}},
                             JetCoordinate{fields[j], word}};
                terms.push_back(std::move(t));
            }
        }
    }
    return WedgeForm(std::move(terms));
}

namespace {

Axis spatial_axes[2] = {Axis::Z1, Axis::Z2};

// One integration by parts: factor j of the term is du_{A+e_i}; the rewrite
// du_{A+e_i} ^ eta = -du_A ^ D_i(eta) produces the returned terms.
std::vector<WedgeForm::Term> ibp_rewrite(const WedgeForm::Term& t, std::size_t j, Axis ax) {
    const JetCoordinate lowered{t.factors[j].field, t.factors[j].order.bumped(ax, -1)};
    // sign from moving factor j to the front
    Rational sgn((j % 2 == 0) ? 1 : -1);
    std::vector<JetCoordinate> rest;
    for (std::size_t k = 0; k < t.factors.size(); ++k)
        if (k != j)
            rest.push_back(t.factors[k]);

    std::vector<WedgeForm::Term> out;
    {
        WedgeForm::Term n; // -D_i(p) du_A ^ rest
        n.coeff = Rational(-1) * sgn * t.coeff.total_derivative(ax);
        n.factors.push_back(lowered);
        n.factors.insert(n.factors.end(), rest.begin(), rest.end());
        out.push_back(std::move(n));
    }
    for (std::size_t m = 0; m < rest.size(); ++m) {
        WedgeForm::Term n; // -p du_A ^ (rest with factor m raised)
        n.coeff = Rational(-1) * sgn * t.coeff;
        n.factors.push_back(lowered);
        for (std::size_t k = 0; k < rest.size(); ++k) {
            JetCoordinate f = rest[k];
            if (k == m)
                f.order = f.order.bumped(ax);
            n.factors.push_back(f);
        }
        out.push_back(std::move(n));
    }
    return out;
}

std::string form_key(const WedgeForm& f) {
    return f.str();
}

} // namespace

ClosureResult symplectic_closure(const OperatorMatrix& K) {
    if (!K.is_local())
        throw ValidationError("symplectic closure requires a local K");
    if (!is_skew_adjoint(K))
        throw ValidationError("symplectic closure requires a skew-adjoint K");

    WedgeForm form = symplectic_form(K).vertical_differential();
    std::set<std::string> seen;
    seen.insert(form_key(form));

    const int max_steps = 4000;
    int steps = 0;
    while (!form.is_zero() && steps < max_steps) {
        bool committed = false;
        // Deterministic move order: terms in canonical order, factors from the
        // smallest, axes z1 then z2; commit the first move that produces a
        // form not seen before.
        for (std::size_t ti = 0; ti < form.terms().size() && !committed; ++ti) {
            const WedgeForm::Term& t = form.terms()[ti];
            for (std::size_t j = 0; j < t.factors.size() && !committed; ++j) {
                if (t.factors[j].order.t != 0)
                    continue; // no time integration by parts on a spatial slice
                for (Axis ax : spatial_axes) {
                    if (t.factors[j].order.component(ax) == 0)
                        continue;
                    std::vector<WedgeForm::Term> cand;
                    for (std::size_t k = 0; k < form.terms().size(); ++k)
                        if (k != ti)
                            cand.push_back(form.terms()[k]);
                    auto rewritten = ibp_rewrite(t, j, ax);
                    cand.insert(cand.end(), rewritten.begin(), rewritten.end());
                    WedgeForm next(std::move(cand));
                    std::string key = form_key(next);
                    if (seen.insert(key).second) {
                        form = std::move(next);
                        committed = true;
                        break;
                    }
                }
            }
        }
        ++steps;
        if (!committed)
            break;
    }

    ClosureResult r;
    r.closed = form.is_zero();
    r.stuck = !r.closed;
    r.residual = std::move(form);
    r.steps = steps;
    return r;
}

} // namespace mave
