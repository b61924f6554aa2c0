#include "mave/factorization.hpp"

#include "mave/errors.hpp"

namespace mave {

using namespace jets;

namespace {

LocalOperator D(int t, int d1, int d2) {
    return LocalOperator::derivative(
        MultiIndex{std::uint16_t(t), std::uint16_t(d1), std::uint16_t(d2)});
}

const MultiIndex kDt{1, 0, 0};
const MultiIndex kD1{0, 1, 0};
const MultiIndex kD2{0, 0, 1};

LocalOperator embed_op(const LocalOperator& op) {
    return op.map_coefficients([](const JetPolynomial& p) { return embed_ut(p); });
}

} // namespace

std::string to_string(FactorVariant v) {
    switch (v) {
        case FactorVariant::Generic1: return "generic1";
        case FactorVariant::Generic2: return "generic2";
        case FactorVariant::C1Zero: return "c1zero";
        case FactorVariant::C2Zero: return "c2zero";
        case FactorVariant::C2ZeroAlt: return "c2zero-alt";
        default: return "c3zero";
    }
}

std::array<FactorVariant, 6> all_factor_variants() {
    return {FactorVariant::Generic1, FactorVariant::Generic2, FactorVariant::C1Zero,
            FactorVariant::C2Zero,   FactorVariant::C2ZeroAlt, FactorVariant::C3Zero};
}

std::vector<FactorVariant> compatible_variants(CoeffCase kase) {
    switch (kase) {
        case CoeffCase::Generic: return {FactorVariant::Generic1, FactorVariant::Generic2};
        case CoeffCase::C1Zero: return {FactorVariant::C1Zero};
        case CoeffCase::C2Zero: return {FactorVariant::C2Zero, FactorVariant::C2ZeroAlt};
        default: return {FactorVariant::C3Zero};
    }
}

SkewFactorSet build_factors(const MACoefficients& c, FactorVariant variant) {
    c.validate();
    const Rational &c1 = c.c1(), &c2 = c.c2(), &c3 = c.c3(), &c4 = c.c4(), &c5 = c.c5(),
                   &c6 = c.c6(), &c7 = c.c7(), &c8 = c.c8();
    const LocalOperator L1 = u(0, 1, 1) * D(0, 1, 0) - u(0, 2, 0) * D(0, 0, 1);
    const LocalOperator L2 = u(0, 0, 2) * D(0, 1, 0) - u(0, 1, 1) * D(0, 0, 1);
    const LocalOperator Lt = v(0, 0, 1) * D(0, 1, 0) - v(0, 1, 0) * D(0, 0, 1);
    const LocalOperator Dt = D(1, 0, 0), D1 = D(0, 1, 0), D2 = D(0, 0, 1);

    SkewFactorSet s;
    s.variant = variant;
    s.coeffs = c;
    switch (variant) {
        case FactorVariant::Generic1:
            // at c1 = 0 these operators become linearly dependent
            if (c.kase != CoeffCase::Generic)
                throw VariantError("generic1 factors need the generic case (c1 c2 c3 != 0)");
            s.A1 = c1 * Dt - c3 * D2;
            s.A2 = -(c2 * Dt + c3 * D1);
            s.B1 = c1 * (c3 * L2 - c1 * Lt) + c1 * c6 * D1 +
                   (c1 * c7 - c2 * c6 + c3 * c4) * D2;
            s.B2 = c1 * (c3 * L1 + c2 * Lt) + (c3 * c4 - c2 * c6) * D1 - c1 * c8 * D2 -
                   c3 * Dt;
            break;
        case FactorVariant::Generic2:
            if (c.kase != CoeffCase::Generic)
                throw VariantError("generic2 factors need the generic case (c1 c2 c3 != 0)");
            s.A1 = c2 * Dt + c3 * D1;
            s.A2 = c3 * D2 - c1 * Dt;
            s.B1 = -(c2 * (c3 * L1 + c2 * Lt)) + (c2 * c7 - c1 * c8 - c3 * c5) * D1 +
                   c2 * c8 * D2;
            s.B2 = c2 * (c1 * Lt - c3 * L2) - c2 * c6 * D1 - (c1 * c8 + c3 * c5) * D2 +
                   c3 * Dt;
            break;
        case FactorVariant::C1Zero:
            if (c.kase != CoeffCase::C1Zero || c3 == 0)
                throw VariantError("c1zero factors need c1 = 0, c2 != 0 and c3 != 0");
            s.A1 = c2 * Dt + c3 * D1;
            s.A2 = c3 * D2;
            s.B1 = -(c2 * (c3 * L1 + c2 * Lt)) + (c2 * c7 - c3 * c5) * D1 + c2 * c8 * D2;
            s.B2 = c3 * Dt - c2 * c3 * L2 - c2 * c6 * D1 - c3 * c5 * D2;
            break;
        case FactorVariant::C2Zero:
            if (c.kase != CoeffCase::C2Zero || c3 == 0)
                throw VariantError("c2zero factors need c2 = 0, c1 != 0 and c3 != 0");
            s.A1 = c1 * Dt - c3 * D2;
            s.A2 = -(c3 * D1);
            s.B1 = c1 * (c3 * L2 - c1 * Lt) + c1 * c6 * D1 + (c1 * c7 + c3 * c4) * D2;
            s.B2 = c1 * c3 * L1 + c3 * c4 * D1 - c1 * c8 * D2 - c3 * Dt;
            break;
        case FactorVariant::C2ZeroAlt:
            if (c.kase != CoeffCase::C2Zero || c3 == 0)
                throw VariantError("c2zero-alt factors need c2 = 0, c1 != 0 and c3 != 0");
            s.A1 = c1 * D1;
            s.A2 = c3 * D2 - c1 * Dt;
            s.B1 = (c1 * c1) * L1 + (c1 * c5 - c3) * D2 - c1 * Dt;
            s.B2 = c1 * (c3 * L2 - c1 * Lt + c4 * Dt + c6 * D1 + c7 * D2);
            break;
        case FactorVariant::C3Zero:
            if (c.kase != CoeffCase::C3Zero)
                throw VariantError("c3zero factors need c3 = 0 and c1 c2 != 0");
            s.A1 = c1 * Dt;
            s.A2 = nabla(c1, c2);
            s.B1 = c1 * c2 * Lt - c2 * c6 * D1 - c1 * c8 * D2;
            s.B2 = c2 * (c1 * L1 + c2 * L2 + c4 * D1 + c5 * D2 - Dt);
            break;
    }
    return s;
}

SkewIdentityResult verify_skew_identity(const SkewFactorSet& s) {
    const ModelBundle m = build_model(s.coeffs);
    if (m.symmetry_op.is_zero())
        throw ValidationError("degenerate coefficients: zero symmetry operator");
    LocalOperator P = s.A1.compose(s.B2) - s.A2.compose(s.B1);
    P = on_shell_reduce(P, m);

    SkewIdentityResult r;
    const JetPolynomial ptt = P.coefficient(kDt.plus(kDt));
    // symmetry_op carries -D_t^2, so mu is read off the D_t^2 words
    r.mu = ptt.is_constant() ? Rational(-ptt.constant_value()) : Rational(0);
    r.residual = P - r.mu * m.symmetry_op;
    r.ok = !r.residual.is_zero() ? false : r.mu != 0;
    return r;
}

CommutatorResult verify_commutators(const SkewFactorSet& s) {
    const ModelBundle m = build_model(s.coeffs);
    CommutatorResult r;
    r.residuals[0] = commutator(s.A1, s.A2);
    r.residuals[1] = embed_op(commutator(s.A1, s.B2) - commutator(s.A2, s.B1));
    r.residuals[2] = on_shell_reduce(commutator(s.B1, s.B2), m);
    r.ok = r.residuals[0].is_zero() && r.residuals[1].is_zero() && r.residuals[2].is_zero();
    return r;
}

LaxResult verify_lax(const SkewFactorSet& s) {
    const ModelBundle m = build_model(s.coeffs);
    const JetPolynomial lambda = lam();
    const LocalOperator X1 = lambda * s.A1 + s.B1;
    const LocalOperator X2 = lambda * s.A2 + s.B2;
    const LocalOperator C = commutator(X1, X2);

    LaxResult r;
    for (unsigned k = 0; k < 3; ++k) {
        LocalOperator comp(C.ring());
        for (const auto& [w, p] : C.terms())
            comp += LocalOperator::term(p.lambda_component(k), w);
        r.residuals[k] = comp;
    }
    r.residuals[1] = embed_op(r.residuals[1]);
    r.residuals[0] = on_shell_reduce(r.residuals[0], m);
    r.ok = r.residuals[0].is_zero() && r.residuals[1].is_zero() && r.residuals[2].is_zero();
    return r;
}

bool cross_relations(const MACoefficients& c) {
    if (c.kase != CoeffCase::Generic)
        throw VariantError("cross relations are defined for the generic case");
    const SkewFactorSet s1 = build_factors(c, FactorVariant::Generic1);
    const SkewFactorSet s2 = build_factors(c, FactorVariant::Generic2);
    const Rational &c1 = c.c1(), &c2 = c.c2(), &c3 = c.c3();
    return s2.A1 == -s1.A2 && s2.A2 == -s1.A1 &&
           c2 * s1.B1 + c1 * s2.B2 == c3 * s1.A1 &&
           c2 * s1.B2 + c1 * s2.B1 == c3 * s1.A2;
}

bool discrete_symmetry_consistent(const MACoefficients& c) {
    const MACoefficients tc = discrete_transform(c);
    const SkewFactorSet from = build_factors(tc, FactorVariant::Generic1);
    const SkewFactorSet expect = build_factors(c, FactorVariant::Generic2);
    return discrete_transform(from.A1) == expect.A1 &&
           discrete_transform(from.A2) == expect.A2 &&
           discrete_transform(from.B1) == expect.B1 &&
           discrete_transform(from.B2) == expect.B2;
}

OperatorMatrix recursion_matrix(const MACoefficients& c, FactorVariant variant) {
    c.validate();
    const Rational &c1 = c.c1(), &c2 = c.c2(), &c3 = c.c3(), &c4 = c.c4(), &c5 = c.c5(),
                   &c6 = c.c6(), &c7 = c.c7(), &c8 = c.c8();
    const LocalOperator L1 = u(0, 1, 1) * D(0, 1, 0) - u(0, 2, 0) * D(0, 0, 1);
    const LocalOperator L2 = u(0, 0, 2) * D(0, 1, 0) - u(0, 1, 1) * D(0, 0, 1);
    const LocalOperator Lt = v(0, 0, 1) * D(0, 1, 0) - v(0, 1, 0) * D(0, 0, 1);
    const LocalOperator D1 = D(0, 1, 0), D2 = D(0, 0, 1);
    const JetPolynomial ncu1 = c1 * u(0, 2, 0) + c2 * u(0, 1, 1);
    const JetPolynomial ncu2 = c1 * u(0, 1, 1) + c2 * u(0, 0, 2);

    auto Ninv = [&](const Rational& d1, const Rational& d2, const LocalOperator& inner) {
        return LinearDiffOperator::nabla_inverse(d1, d2, inner);
    };

    switch (variant) {
        case FactorVariant::Generic1: {
            if (c.kase != CoeffCase::Generic)
                throw VariantError("generic1 recursion matrix needs the generic case");
            LocalOperator P = c1 * (ncu1 * D2 - ncu2 * D1 - c4 * D1 - c5 * D2) + c3 * D2;
            LocalOperator Q = c1 * (c3 * (u(0, 0, 2) * D(0, 2, 0) + u(0, 2, 0) * D(0, 0, 2) -
                                          rat(2) * u(0, 1, 1) * D(0, 1, 1)) +
                                    c6 * D(0, 2, 0) + c7 * D(0, 1, 1) + c8 * D(0, 0, 2));
            return OperatorMatrix(
                Ninv(c1, c2, P), Ninv(c1, c2, c1 * LocalOperator::identity()),
                LinearDiffOperator(c1 * (v(0, 1, 0) * D2 - v(0, 0, 1) * D1)) + Ninv(c1, c2, Q),
                Ninv(c1, c2, c3 * D2));
        }
        case FactorVariant::Generic2: {
            if (c.kase != CoeffCase::Generic)
                throw VariantError("generic2 recursion matrix needs the generic case");
            LocalOperator G = c1 * L1 + c2 * L2 + (c4 + c3 / c2) * D1 + c5 * D2;
            LocalOperator loc21 = -(c3 * L1 + c2 * Lt) +
                                  ((c2 * c7 - c1 * c8 - c3 * c5) / c2) * D1 + c8 * D2;
            return OperatorMatrix(Ninv(c1, c2, rat(-1) * c2 * G),
                                  Ninv(c1, c2, c2 * LocalOperator::identity()),
                                  LinearDiffOperator(loc21) + Ninv(c1, c2, c3 * D1.compose(G)),
                                  Ninv(c1, c2, rat(-1) * c3 * D1));
        }
        case FactorVariant::C1Zero: {
            if (c.kase != CoeffCase::C1Zero || c3 == 0)
                throw VariantError("c1zero recursion matrix needs c1 = 0, c2 != 0, c3 != 0");
            LocalOperator W = L2 + (c6 / c3) * D1;
            return OperatorMatrix(
                Ninv(rat(0), rat(1), rat(-1) * c2 * W) +
                    LinearDiffOperator(rat(-1) * c5 * LocalOperator::identity()),
                Ninv(rat(0), rat(1), LocalOperator::identity()),
                LinearDiffOperator(-(c3 * L1 + c2 * Lt) + c7 * D1 + c8 * D2) +
                    Ninv(rat(0), rat(1), c3 * D1.compose(W)),
                Ninv(rat(0), rat(1), rat(-1) * (c3 / c2) * D1));
        }
        case FactorVariant::C2Zero: {
            if (c.kase != CoeffCase::C2Zero || c3 == 0)
                throw VariantError("c2zero recursion matrix needs c2 = 0, c1 != 0, c3 != 0");
            LocalOperator hess = c3 * (u(0, 0, 2) * D(0, 2, 0) + u(0, 2, 0) * D(0, 0, 2) -
                                       rat(2) * u(0, 1, 1) * D(0, 1, 1)) +
                                 c8 * D(0, 0, 2);
            // R11's D2 and constant parts: ((c1c5 - c3)/c1) D2 and -c4, the
            // specialization of the generic matrix at c2 = 0 (confirmed by
            // re-assembling the rows from the factor operators).
            return OperatorMatrix(
                Ninv(rat(1), rat(0),
                     rat(-1) * (c1 * L1 + ((c1 * c5 - c3) / c1) * D2)) +
                    LinearDiffOperator(rat(-1) * c4 * LocalOperator::identity()),
                Ninv(rat(1), rat(0), LocalOperator::identity()),
                LinearDiffOperator(rat(-1) * c1 * Lt + c6 * D1 + c7 * D2) +
                    Ninv(rat(1), rat(0), hess),
                Ninv(rat(1), rat(0), (c3 / c1) * D2));
        }
        case FactorVariant::C3Zero: {
            if (c.kase != CoeffCase::C3Zero)
                throw VariantError("c3zero recursion matrix needs c3 = 0 and c1 c2 != 0");
            LocalOperator P = c2 * (ncu2 * D1 - ncu1 * D2 + c4 * D1 + c5 * D2);
            LocalOperator loc21 =
                c2 * (v(0, 0, 1) * D1 - v(0, 1, 0) * D2) - (c2 * c6 / c1) * D1 - c8 * D2;
            return OperatorMatrix(Ninv(c1, c2, P),
                                  Ninv(c1, c2, rat(-1) * c2 * LocalOperator::identity()),
                                  LinearDiffOperator(loc21), LinearDiffOperator());
        }
        default:
            throw VariantError(
                "no recursion matrix is built from the alternative c2 = 0 factors");
    }
}

bool recursion_consistency(const MACoefficients& c, FactorVariant variant) {
    const SkewFactorSet s = build_factors(c, variant);
    const OperatorMatrix R = recursion_matrix(c, variant);
    const ModelBundle m = build_model(c);

    auto split_t = [](const LocalOperator& op) {
        const JetPolynomial tc = op.coefficient(kDt);
        if (!tc.is_constant())
            throw InternalConsistencyError("factor operator has a non-constant D_t part");
        LocalOperator rest = op - tc.constant_value() * LocalOperator::derivative(kDt);
        return std::pair<Rational, LocalOperator>(tc.constant_value(), rest);
    };
    const auto [a1, alpha1] = split_t(s.A1);
    const auto [a2, alpha2] = split_t(s.A2);
    const auto [b1, B1p] = split_t(s.B1);
    const auto [b2, B2p] = split_t(s.B2);

    // a2 alpha1 - a1 alpha2 must be a multiple of nabla_c
    const LocalOperator g = a2 * alpha1 - a1 * alpha2;
    Rational gamma;
    if (c.c1() != 0)
        gamma = g.coefficient(kD1).constant_value() / c.c1();
    else
        gamma = g.coefficient(kD2).constant_value() / c.c2();
    if (gamma == 0 || !(g == gamma * m.nabla_c))
        return false;

    const LinearDiffOperator nab((gamma * m.nabla_c));
    const LinearDiffOperator mnab((Rational(-gamma) * m.nabla_c));

    // rows of R reassembled from the recursion relations A_i phi~ = B_i phi
    const bool row1 =
        operator_equal(nab.compose(R.at(0, 0)), LinearDiffOperator(a2 * B1p - a1 * B2p)).equal &&
        operator_equal(nab.compose(R.at(0, 1)),
                       LinearDiffOperator((a2 * b1 - a1 * b2) * LocalOperator::identity()))
            .equal;
    const bool row2 =
        operator_equal(mnab.compose(R.at(1, 0)),
                       LinearDiffOperator(alpha2.compose(B1p) - alpha1.compose(B2p)))
            .equal &&
        operator_equal(mnab.compose(R.at(1, 1)),
                       LinearDiffOperator(b1 * alpha2 - b2 * alpha1))
            .equal;
    return row1 && row2;
}

} // namespace mave
