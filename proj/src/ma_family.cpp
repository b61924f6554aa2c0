#include "mave/ma_family.hpp"

#include <sstream>

#include <json.hpp>

#include "mave/errors.hpp"

namespace mave {

using namespace jets;

std::string to_string(CoeffCase c) {
    switch (c) {
        case CoeffCase::Generic: return "generic";
        case CoeffCase::C1Zero: return "c1zero";
        case CoeffCase::C2Zero: return "c2zero";
        default: return "c3zero";
    }
}

CoeffCase coeff_case_from_string(const std::string& s) {
    if (s == "generic")
        return CoeffCase::Generic;
    if (s == "c1zero")
        return CoeffCase::C1Zero;
    if (s == "c2zero")
        return CoeffCase::C2Zero;
    if (s == "c3zero")
        return CoeffCase::C3Zero;
    throw ValidationError("unknown coefficient case '" + s + "'");
}

void MACoefficients::validate() const {
    switch (kase) {
        case CoeffCase::Generic:
            if (c1() == 0 || c2() == 0 || c3() == 0)
                throw ValidationError("generic case requires c1*c2*c3 != 0");
            break;
        case CoeffCase::C1Zero:
            if (c1() != 0 || c2() == 0)
                throw ValidationError("c1zero case requires c1 = 0 and c2 != 0");
            break;
        case CoeffCase::C2Zero:
            if (c2() != 0 || c1() == 0)
                throw ValidationError("c2zero case requires c2 = 0 and c1 != 0");
            break;
        case CoeffCase::C3Zero:
            if (c3() != 0 || c1() == 0 || c2() == 0)
                throw ValidationError("c3zero case requires c3 = 0 and c1*c2 != 0");
            break;
    }
}

bool MACoefficients::is_integrable() const {
    return integrability_residual(*this) == 0;
}

std::string MACoefficients::to_json() const {
    nlohmann::ordered_json j;
    for (int i = 0; i < 9; ++i)
        j["c" + std::to_string(i + 1)] = to_string(c[i]);
    j["case"] = to_string(kase);
    return j.dump();
}

MACoefficients MACoefficients::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed coefficient JSON: ") + e.what());
    }
    MACoefficients c;
    for (int i = 0; i < 9; ++i) {
        const std::string key = "c" + std::to_string(i + 1);
        if (!j.contains(key))
            throw ValidationError("coefficient JSON lacks '" + key + "'");
        c.c[i] = rational_from_string(j[key].get<std::string>());
    }
    if (!j.contains("case"))
        throw ValidationError("coefficient JSON lacks 'case'");
    c.kase = coeff_case_from_string(j["case"].get<std::string>());
    c.validate();
    return c;
}

std::string MACoefficients::str() const {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < 9; ++i)
        os << (i ? "," : "") << to_string(c[i]);
    os << ")";
    return os.str();
}

Rational GeneralMACoefficients::integrability_residual() const {
    Rational r = h1 * h1 * s1 * s1 + h2 * h2 * s2 * s2 + h3 * h3 * s3 * s3 + g1 * g1 * s2 * s3 +
                 g2 * g2 * s1 * s3 + g3 * g3 * s1 * s2;
    r -= 2 * (h1 * h2 * s1 * s2 + h1 * h3 * s1 * s3 + h2 * h3 * s2 * s3);
    r += 4 * eps * s1 * s2 * s3 + 4 * nu * h1 * h2 * h3;
    r += eps * tau1 * tau2 * tau3 - nu * g1 * g2 * g3 - eps * eps * nu * nu;
    r -= nu * (g1 * g1 * h1 + g2 * g2 * h2 + g3 * g3 * h3);
    r -= (g1 * tau1 + g2 * tau2 + g3 * tau3 + 2 * eps * nu) *
         (h1 * s1 + h2 * s2 + h3 * s3 - eps * nu);
    r += 2 * (g1 * h1 * s1 * tau1 + g2 * h2 * s2 * tau2 + g3 * h3 * s3 * tau3);
    r += tau1 * tau1 * h2 * h3 + tau2 * tau2 * h1 * h3 + tau3 * tau3 * h1 * h2;
    r -= eps * (tau1 * tau1 * s1 + tau2 * tau2 * s2 + tau3 * tau3 * s3);
    r += s1 * tau1 * g2 * g3 + s2 * tau2 * g1 * g3 + s3 * tau3 * g1 * g2;
    r -= g1 * h1 * tau2 * tau3 + g2 * h2 * tau1 * tau3 + g3 * h3 * tau1 * tau2;
    return r;
}

GeneralMACoefficients to_general(const MACoefficients& c) {
    GeneralMACoefficients g;
    g.eps = 0; // no full Hessian determinant in the evolutionary family
    g.h1 = 0;
    g.h2 = 0;
    g.h3 = c.c3(); // coefficient of the (z1, z2) Hessian minor
    g.g1 = -c.c1();
    g.g2 = c.c2();
    g.g3 = 0;
    g.s1 = c.c6();
    g.s2 = c.c8();
    g.s3 = -1;
    g.tau1 = c.c5();
    g.tau2 = c.c4();
    g.tau3 = c.c7();
    g.nu = c.c9();
    return g;
}

Rational intcon_residual(const MACoefficients& c) {
    return c.c2() * (c.c1() * c.c7() - c.c2() * c.c6() + c.c3() * c.c4()) -
           c.c1() * (c.c1() * c.c8() + c.c3() * c.c5()) + c.c3() * c.c3();
}

Rational integrability_residual(const MACoefficients& c) {
    const Rational direct = intcon_residual(c);
    const Rational mapped = to_general(c).integrability_residual();
    if (direct != mapped)
        throw InternalConsistencyError("integrability residual mismatch: direct " +
                                       to_string(direct) + " vs mapped " + to_string(mapped) +
                                       " for " + c.str());
    return direct;
}

namespace {

LocalOperator D(int t, int d1, int d2) {
    return LocalOperator::derivative(
        MultiIndex{std::uint16_t(t), std::uint16_t(d1), std::uint16_t(d2)});
}

} // namespace

ModelBundle build_model(const MACoefficients& c) {
    c.validate();
    ModelBundle m;
    m.coeffs = c;

    // v_t = v1*nabla_c(u2) - v2*nabla_c(u1) + c3(u11u22 - u12^2)
    //       + c4 v1 + c5 v2 + c6 u11 + c7 u12 + c8 u22 + c9
    const JetPolynomial ncu1 = c.c1() * u(0, 2, 0) + c.c2() * u(0, 1, 1);
    const JetPolynomial ncu2 = c.c1() * u(0, 1, 1) + c.c2() * u(0, 0, 2);
    m.rhs_one = v(0, 1, 0) * ncu2 - v(0, 0, 1) * ncu1 +
                c.c3() * (u(0, 2, 0) * u(0, 0, 2) - u(0, 1, 1).pow(2)) + c.c4() * v(0, 1, 0) +
                c.c5() * v(0, 0, 1) + c.c6() * u(0, 2, 0) + c.c7() * u(0, 1, 1) +
                c.c8() * u(0, 0, 2) + JetPolynomial::constant(c.c9());

    m.nabla_c = nabla(c.c1(), c.c2());
    m.L12_1 = u(0, 1, 1) * D(0, 1, 0) - u(0, 2, 0) * D(0, 0, 1);
    m.L12_2 = u(0, 0, 2) * D(0, 1, 0) - u(0, 1, 1) * D(0, 0, 1);
    m.L12_t = v(0, 0, 1) * D(0, 1, 0) - v(0, 1, 0) * D(0, 0, 1);

    // Symmetry-condition operator, assembled exactly as displayed and then
    // put in the two-field normal form (u_t -> v in coefficients).
    const LocalOperator Dt = D(1, 0, 0), D1 = D(0, 1, 0), D2 = D(0, 0, 1);
    LocalOperator sym = c.c1() * (Dt.compose(m.L12_1) - D1.compose(m.L12_t)) +
                        c.c2() * (Dt.compose(m.L12_2) - D2.compose(m.L12_t)) +
                        c.c3() * (D1.compose(m.L12_2) - D2.compose(m.L12_1)) -
                        Dt.compose(Dt) + c.c4() * D1.compose(Dt) + c.c5() * D2.compose(Dt) +
                        c.c6() * D1.compose(D1) + c.c7() * D1.compose(D2) +
                        c.c8() * D2.compose(D2);
    m.symmetry_op = sym.map_coefficients([](const JetPolynomial& p) { return embed_ut(p); });
    return m;
}

JetPolynomial embed_ut(const JetPolynomial& p) {
    return p.substitute_jet(uc(1, 0, 0), v(0, 0, 0), true);
}

JetPolynomial on_shell_reduce(const JetPolynomial& p, const ModelBundle& m) {
    Substitution s;
    s.jets.push_back({uc(1, 0, 0), v(0, 0, 0)});
    s.jets.push_back({vc(1, 0, 0), m.rhs_one});
    s.prolong = true;
    return p.substitute(s);
}

LocalOperator on_shell_reduce(const LocalOperator& op, const ModelBundle& m) {
    return op.map_coefficients([&](const JetPolynomial& p) { return on_shell_reduce(p, m); });
}

MACoefficients sample_integrable(CoeffCase kase, std::uint64_t seed, C9Mode c9mode) {
    RationalSampler rs(seed);
    MACoefficients c;
    c.kase = kase;
    for (int attempt = 0; attempt < 256; ++attempt) {
        switch (kase) {
            case CoeffCase::Generic: {
                c.c[0] = rs.draw_nonzero();
                c.c[1] = rs.draw_nonzero();
                c.c[2] = rs.draw_nonzero();
                c.c[3] = rs.draw();
                c.c[4] = rs.draw();
                c.c[5] = rs.draw();
                c.c[7] = rs.draw();
                // solve intcon for c7
                c.c[6] = (c.c1() * (c.c1() * c.c8() + c.c3() * c.c5()) - c.c3() * c.c3() +
                          c.c2() * c.c2() * c.c6() - c.c2() * c.c3() * c.c4()) /
                         (c.c1() * c.c2());
                break;
            }
            case CoeffCase::C1Zero: {
                c.c[0] = 0;
                c.c[1] = rs.draw_nonzero();
                c.c[2] = rs.draw_nonzero();
                c.c[3] = rs.draw();
                c.c[4] = rs.draw();
                c.c[6] = rs.draw();
                c.c[7] = rs.draw();
                // c2(c2c6 - c3c4) = c3^2  =>  c6
                c.c[5] = (c.c3() * c.c3() + c.c2() * c.c3() * c.c4()) / (c.c2() * c.c2());
                break;
            }
            case CoeffCase::C2Zero: {
                c.c[1] = 0;
                c.c[0] = rs.draw_nonzero();
                c.c[2] = rs.draw_nonzero();
                c.c[3] = rs.draw();
                c.c[4] = rs.draw();
                c.c[5] = rs.draw();
                c.c[6] = rs.draw();
                // c1(c1c8 + c3c5) = c3^2  =>  c8
                c.c[7] = (c.c3() * c.c3() - c.c1() * c.c3() * c.c5()) / (c.c1() * c.c1());
                break;
            }
            case CoeffCase::C3Zero: {
                c.c[2] = 0;
                c.c[0] = rs.draw_nonzero();
                c.c[1] = rs.draw_nonzero();
                c.c[3] = rs.draw();
                c.c[4] = rs.draw();
                c.c[5] = rs.draw();
                c.c[7] = rs.draw();
                // c1c2c7 = c1^2 c8 + c2^2 c6  =>  c7
                c.c[6] = (c.c1() * c.c1() * c.c8() + c.c2() * c.c2() * c.c6()) /
                         (c.c1() * c.c2());
                break;
            }
        }
        c.c[8] = (c9mode == C9Mode::Zero) ? Rational(0) : rs.draw();
        c.validate();
        if (integrability_residual(c) == 0)
            return c;
    }
    throw InternalConsistencyError("sampling failed to produce an integrable instance");
}

MACoefficients canonical_instance() {
    MACoefficients c;
    c.kase = CoeffCase::Generic;
    c.c = {rat(1), rat(1), rat(1), rat(-1), rat(1), rat(1), rat(3), rat(1), rat(-1)};
    return c;
}

MACoefficients discrete_transform(const MACoefficients& c) {
    MACoefficients r = c;
    r.c[0] = -c.c2();
    r.c[1] = -c.c1();
    r.c[3] = c.c5();
    r.c[4] = c.c4();
    r.c[5] = c.c8();
    r.c[7] = c.c6();
    switch (c.kase) {
        case CoeffCase::C1Zero: r.kase = CoeffCase::C2Zero; break;
        case CoeffCase::C2Zero: r.kase = CoeffCase::C1Zero; break;
        default: break;
    }
    return r;
}

JetPolynomial discrete_transform(const JetPolynomial& p) {
    // z1 -> -z2, z2 -> -z1, t -> -t; v = u_t picks up the extra t sign.
    JetPolynomial r(p.ring());
    for (const Monomial& m : p.terms()) {
        JetPolynomial piece = JetPolynomial::constant(m.coeff, p.ring());
        for (const auto& [jc, e] : m.jets) {
            MultiIndex sw{jc.order.t, jc.order.z2, jc.order.z1};
            int sgn = jc.order.total() + (jc.field == Field::V ? 1 : 0);
            JetPolynomial f = JetPolynomial::coordinate(JetCoordinate{jc.field, sw}, p.ring());
            if (sgn % 2 != 0)
                f = -f;
            piece *= f.pow(e);
        }
        if (m.z[0] > 0)
            piece *= (-JetPolynomial::zvar(2, p.ring())).pow(m.z[0]);
        if (m.z[1] > 0)
            piece *= (-JetPolynomial::zvar(1, p.ring())).pow(m.z[1]);
        for (const auto& [pi, e] : m.params)
            piece *= JetPolynomial::parameter(p.ring()->param_name(pi), p.ring()).pow(e);
        r += piece;
    }
    return r;
}

LocalOperator discrete_transform(const LocalOperator& op) {
    LocalOperator r(op.ring());
    for (const auto& [w, p] : op.terms()) {
        MultiIndex sw{w.t, w.z2, w.z1};
        JetPolynomial q = discrete_transform(p);
        if (w.total() % 2 != 0)
            q = -q;
        r += LocalOperator::term(q, sw);
    }
    return r;
}

} // namespace mave
