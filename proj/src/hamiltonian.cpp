#include "mave/hamiltonian.hpp"

#include "mave/errors.hpp"
#include "mave/variational.hpp"

namespace mave {

using namespace jets;

namespace {

LocalOperator D(int t, int d1, int d2) {
    return LocalOperator::derivative(
        MultiIndex{std::uint16_t(t), std::uint16_t(d1), std::uint16_t(d2)});
}

JetPolynomial cpoly(const Rational& q) {
    return JetPolynomial::constant(q);
}

} // namespace

HamiltonianStructure build_first_structure(const MACoefficients& c) {
    c.validate();
    const Rational &c1 = c.c1(), &c2 = c.c2(), &c3 = c.c3(), &c4 = c.c4(), &c5 = c.c5(),
                   &c6 = c.c6(), &c7 = c.c7(), &c8 = c.c8(), &c9 = c.c9();
    const LocalOperator L1 = u(0, 1, 1) * D(0, 1, 0) - u(0, 2, 0) * D(0, 0, 1);
    const LocalOperator L2op = u(0, 0, 2) * D(0, 1, 0) - u(0, 1, 1) * D(0, 0, 1);
    const LocalOperator D1 = D(0, 1, 0), D2 = D(0, 0, 1);

    HamiltonianStructure h;
    const LocalOperator K11 = c1 * (u(0, 2, 0) * D2 - u(0, 1, 1) * D1) +
                              c2 * (u(0, 1, 1) * D2 - u(0, 0, 2) * D1) - c4 * D1 - c5 * D2;
    const LocalOperator one = LocalOperator::identity();
    h.K = OperatorMatrix(-K11, rat(-1) * one, one, LinearDiffOperator());
    h.J0 = OperatorMatrix(LinearDiffOperator(), one, rat(-1) * one,
                          c1 * L1 + c2 * L2op + c4 * D1 + c5 * D2);

    const JetPolynomial hess = u(0, 2, 0) * u(0, 0, 2) - u(0, 1, 1).pow(2);
    const JetPolynomial quad = c6 * u(0, 2, 0) + c7 * u(0, 1, 1) + c8 * u(0, 0, 2);
    h.H1 = rat(1, 2) * v(0, 0, 0).pow(2) - (c3 / 3) * u(0, 0, 0) * hess -
           rat(1, 2) * u(0, 0, 0) * quad - c9 * u(0, 0, 0);

    const JetPolynomial cubic = c1 * (u(0, 0, 1) * u(0, 2, 0) - u(0, 1, 0) * u(0, 1, 1)) +
                                c2 * (u(0, 0, 1) * u(0, 1, 1) - u(0, 1, 0) * u(0, 0, 2));
    const JetPolynomial lin = c4 * u(0, 1, 0) + c5 * u(0, 0, 1);
    h.L2 = u(1, 0, 0) * v(0, 0, 0) - rat(1, 2) * v(0, 0, 0).pow(2) +
           rat(1, 3) * u(1, 0, 0) * cubic - rat(1, 2) * u(1, 0, 0) * lin +
           (c3 / 3) * u(0, 0, 0) * hess + rat(1, 2) * u(0, 0, 0) * quad + c9 * u(0, 0, 0);
    h.pi_u = v(0, 0, 0) + rat(1, 3) * cubic - rat(1, 2) * lin;
    return h;
}

std::string to_string(SecondVariant v) {
    switch (v) {
        case SecondVariant::J1: return "J1";
        case SecondVariant::J1Prime: return "J1prime";
        default: return "J1special";
    }
}

std::vector<SecondVariant> compatible_second_variants(CoeffCase kase) {
    switch (kase) {
        case CoeffCase::Generic: return {SecondVariant::J1, SecondVariant::J1Prime};
        case CoeffCase::C1Zero: return {SecondVariant::J1Prime};
        case CoeffCase::C2Zero: return {SecondVariant::J1};
        default: return {SecondVariant::J1Special};
    }
}

FactorVariant recursion_variant_for(const MACoefficients& c, SecondVariant v) {
    switch (v) {
        case SecondVariant::J1:
            return c.kase == CoeffCase::C2Zero ? FactorVariant::C2Zero : FactorVariant::Generic1;
        case SecondVariant::J1Prime:
            return c.kase == CoeffCase::C1Zero ? FactorVariant::C1Zero : FactorVariant::Generic2;
        default:
            return FactorVariant::C3Zero;
    }
}

Rational second_constraint_c9(const MACoefficients& c, SecondVariant v) {
    const Rational &c1 = c.c1(), &c2 = c.c2(), &c3 = c.c3(), &c4 = c.c4(), &c5 = c.c5(),
                   &c6 = c.c6(), &c7 = c.c7(), &c8 = c.c8();
    switch (v) {
        case SecondVariant::J1:
            if (c1 == 0)
                throw VariantError("J1 requires c1 != 0");
            return (c6 * (c3 - c1 * c5) + c4 * (c1 * c7 - c2 * c6 + c3 * c4)) / (c1 * c1);
        case SecondVariant::J1Prime:
            if (c2 == 0)
                throw VariantError("J1' requires c2 != 0");
            return (c8 * (c2 * c4 + c3) + c5 * (c1 * c8 - c2 * c7 + c3 * c5)) / (c2 * c2);
        default:
            if (c.kase != CoeffCase::C3Zero)
                throw VariantError("the diagonal second structure requires c3 = 0");
            return (c1 * c4 * c8 - c2 * c5 * c6) / (c1 * c2);
    }
}

SecondStructure build_second_structure(const MACoefficients& c, SecondVariant variant,
                                       std::optional<Rational> s0, bool enforce_constraint) {
    c.validate();
    bool allowed = false;
    for (SecondVariant compat : compatible_second_variants(c.kase))
        allowed = allowed || compat == variant;
    if (!allowed)
        throw VariantError("second structure " + to_string(variant) + " is not defined for case " +
                           to_string(c.kase));

    SecondStructure out;
    out.variant = variant;
    out.coeffs = c;
    out.c9_required = second_constraint_c9(c, variant);
    if (enforce_constraint && c.c9() != out.c9_required)
        throw ConstraintError("c9 violates the " + to_string(variant) + " constraint: have " +
                                  to_string(c.c9()) + ", need " + to_string(out.c9_required),
                              to_string(out.c9_required));

    const Rational &c1 = c.c1(), &c2 = c.c2(), &c3 = c.c3(), &c4 = c.c4(), &c5 = c.c5(),
                   &c6 = c.c6(), &c7 = c.c7(), &c8 = c.c8();
    const LocalOperator L1 = u(0, 1, 1) * D(0, 1, 0) - u(0, 2, 0) * D(0, 0, 1);
    const LocalOperator L2op = u(0, 0, 2) * D(0, 1, 0) - u(0, 1, 1) * D(0, 0, 1);
    const LocalOperator Lt = v(0, 0, 1) * D(0, 1, 0) - v(0, 1, 0) * D(0, 0, 1);
    const LocalOperator D1 = D(0, 1, 0), D2 = D(0, 0, 1);
    const JetPolynomial nablau = c1 * u(0, 1, 0) + c2 * u(0, 0, 1);
    const JetPolynomial s0p = s0 ? cpoly(*s0) : JetPolynomial::parameter("s0");
    const JetPolynomial vv = v(0, 0, 0), uu = u(0, 0, 0);

    auto Ninv = [&](const LocalOperator& inner) {
        return LinearDiffOperator::nabla_inverse(c1, c2, inner);
    };

    switch (variant) {
        case SecondVariant::J1: {
            LocalOperator inner22 = c1 * (c6 * D(0, 2, 0) + c7 * D(0, 1, 1) + c8 * D(0, 0, 2)) +
                                    c3 * D2.compose(c4 * D1 + c5 * D2);
            out.J = OperatorMatrix(Ninv(rat(-1) * c1 * LocalOperator::identity()),
                                   Ninv(c3 * D2), Ninv(rat(-1) * c3 * D2),
                                   LinearDiffOperator(c3 * L2op - c1 * Lt) + Ninv(inner22));
            JetPolynomial b = (1 / c1) * nablau + (c4 / c1) * z2() +
                              ((c3 - c1 * c5) / (c1 * c1)) * z1() + s0p;
            out.H0 = vv * b - (c3 / (2 * c1 * c1)) * u(0, 0, 1) * nablau +
                     (c3 * c4 / (c1 * c1)) * uu;
            break;
        }
        case SecondVariant::J1Prime: {
            // B1 of the second factor set; the c1 = 0 particular case uses the
            // same expression with c1 set to zero.
            LocalOperator B1 = rat(-1) * c2 * (c3 * L1 + c2 * Lt) +
                               (c2 * c7 - c1 * c8 - c3 * c5) * D1 + c2 * c8 * D2;
            LinearDiffOperator J22 =
                (1 / c2) * (Ninv((c3 * c3) * D(0, 2, 0)) + LinearDiffOperator(B1));
            out.J = OperatorMatrix(Ninv(rat(-1) * c2 * LocalOperator::identity()),
                                   Ninv(rat(-1) * c3 * D1), Ninv(c3 * D1), J22);
            JetPolynomial b = (1 / c2) * (nablau - c5 * z1() + (c4 + c3 / c2) * z2()) + s0p;
            out.H0 = vv * b + (c3 / (2 * c2 * c2)) * (u(0, 1, 0) * nablau + 2 * c5 * uu);
            break;
        }
        default: {
            LocalOperator B1 = c1 * c2 * Lt - c2 * c6 * D1 - c1 * c8 * D2;
            out.J = OperatorMatrix(Ninv(c2 * LocalOperator::identity()), LinearDiffOperator(),
                                   LinearDiffOperator(), (1 / c1) * LinearDiffOperator(B1));
            JetPolynomial b = (1 / c2) * (-nablau + c5 * z1() - c4 * z2() + s0p);
            out.H0 = vv * b;
            break;
        }
    }
    return out;
}

namespace {

struct RowSplit {
    std::array<LocalOperator, 2> local;
    std::array<LocalOperator, 2> inner; // per column, single shared direction
    bool has_nonlocal = false;
    Rational d1, d2;
};

RowSplit split_row(const OperatorMatrix& J, int i) {
    RowSplit r;
    for (int j = 0; j < 2; ++j) {
        const LinearDiffOperator& e = J.at(i, j);
        r.local[j] = e.local();
        r.inner[j] = LocalOperator(e.ring());
        for (const NonlocalTerm& nt : e.nonlocal()) {
            if (!nt.inner.is_constant_coefficient())
                throw UnsupportedOperationError(
                    "flow check needs constant-coefficient nonlocal parts, got Ninv∘(" +
                    nt.inner.str() + ")");
            if (r.has_nonlocal && (nt.dir1 != r.d1 || nt.dir2 != r.d2))
                throw UnsupportedOperationError("mixed nonlocal directions in one row");
            r.has_nonlocal = true;
            r.d1 = nt.dir1;
            r.d2 = nt.dir2;
            r.inner[j] += nt.inner;
        }
    }
    return r;
}

} // namespace

// Row 1 is verified after clearing with nabla_c. Row 2's formal inverses are
// resolved through the row-1 relation instead of being cleared away:
// with row 1 reading Ninv[P1] = v - (local part), write the row-2 integrand as
// P2 = W(P1) + nabla_c(Q); W and Q come from scalar division and exact
// division by nabla_c in the constant-coefficient operator ring. Constant
// residuals survive this route (plain clearing would annihilate them).
FlowResult verify_flow(const OperatorMatrix& J, const JetPolynomial& H, const ModelBundle& m) {
    const JetPolynomial gu = euler_variational(H, Field::U);
    const JetPolynomial gv = euler_variational(H, Field::V);
    const std::array<JetPolynomial, 2> g{gu, gv};
    const std::array<JetPolynomial, 2> target{v(0, 0, 0), m.rhs_one};

    FlowResult res;
    std::array<JetPolynomial, 2> rr{JetPolynomial(H.ring()), JetPolynomial(H.ring())};

    const RowSplit row1 = split_row(J, 0);
    if (!row1.has_nonlocal) {
        rr[0] = row1.local[0].apply(gu) + row1.local[1].apply(gv) - target[0];
    } else {
        const LocalOperator nab = nabla(row1.d1, row1.d2);
        JetPolynomial lhs = row1.inner[0].apply(gu) + row1.inner[1].apply(gv);
        lhs += nab.apply(row1.local[0].apply(gu) + row1.local[1].apply(gv));
        rr[0] = lhs - nab.apply(target[0]);
    }

    const RowSplit row2 = split_row(J, 1);
    if (!row2.has_nonlocal) {
        rr[1] = row2.local[0].apply(gu) + row2.local[1].apply(gv) - target[1];
    } else {
        if (!row1.has_nonlocal || row1.d1 != row2.d1 || row1.d2 != row2.d2)
            throw UnsupportedOperationError(
                "second row's formal inverse cannot be resolved through the first row");
        // pick the scalar column of row 1's integrand
        int js = -1;
        for (int j = 0; j < 2; ++j) {
            const JetPolynomial n = row1.inner[j].coefficient(MultiIndex{});
            if (row1.inner[j].max_order() == 0 && !n.is_zero() && n.is_constant() &&
                row1.inner[j].terms().size() == 1)
                js = j;
        }
        if (js < 0)
            throw UnsupportedOperationError(
                "row-1 integrand has no invertible scalar column to substitute with");
        const Rational n1 = row1.inner[js].coefficient(MultiIndex{}).constant_value();
        const LocalOperator W = (1 / n1) * row2.inner[js];
        std::array<LocalOperator, 2> M;
        for (int j = 0; j < 2; ++j) {
            LeftDivision d =
                left_divide_nabla(row2.inner[j] - W.compose(row1.inner[j]), row2.d1, row2.d2);
            if (!d.remainder.is_zero())
                throw UnsupportedOperationError(
                    "row-2 integrand is not reducible through row 1 (division remainder " +
                    d.remainder.str() + ")");
            M[j] = d.quotient;
        }
        // Ninv[P1] = target1 - row1 locals
        const JetPolynomial inv_p1 =
            target[0] - row1.local[0].apply(gu) - row1.local[1].apply(gv);
        JetPolynomial val = row2.local[0].apply(gu) + row2.local[1].apply(gv);
        val += W.apply(inv_p1);
        val += M[0].apply(gu) + M[1].apply(gv);
        rr[1] = val - target[1];
    }

    res.r1 = rr[0];
    res.r2 = rr[1];
    res.ok = res.r1.is_zero() && res.r2.is_zero();
    return res;
}

RJ0Result verify_RJ0(const MACoefficients& c, SecondVariant v) {
    const FactorVariant rv = recursion_variant_for(c, v);
    const OperatorMatrix R = recursion_matrix(c, rv);
    const HamiltonianStructure h = build_first_structure(c);
    const SecondStructure s = build_second_structure(c, v, std::nullopt, false);

    RJ0Result r;
    r.ok = R.compose(h.J0) == s.J;
    r.skew_ok = true;
    r.rel_ok = true;
    if (v == SecondVariant::J1) {
        r.skew_ok = is_skew_adjoint(s.J);
        // J1^22 = (B1 + nabla^{-1} c3^2 D2^2) / c1 with B1 from the first set
        const SkewFactorSet fs = build_factors(c, rv);
        LinearDiffOperator rhs =
            (1 / c.c1()) *
            (LinearDiffOperator(fs.B1) +
             LinearDiffOperator::nabla_inverse(c.c1(), c.c2(),
                                               (c.c3() * c.c3()) * D(0, 0, 2)));
        r.rel_ok = operator_equal(s.J.at(1, 1), rhs).equal;
    }
    return r;
}

MACoefficients tri_solve(const Rational& c1, const Rational& c2, const Rational& c3,
                         const Rational& c5, const Rational& c6, const Rational& c8) {
    if (c1 == 0 || c2 == 0 || c3 == 0)
        throw ValidationError("tri-Hamiltonian closed form requires c1 c2 c3 != 0");
    MACoefficients c;
    c.kase = CoeffCase::Generic;
    c.c[0] = c1;
    c.c[1] = c2;
    c.c[2] = c3;
    c.c[4] = c5;
    c.c[5] = c6;
    c.c[7] = c8;
    c.c[3] = (c2 * c2 * c6 - c1 * c1 * c8 - c1 * c3 * c5) / (c2 * c3);
    c.c[6] = (2 * c1 * c1 * c8 + 2 * c1 * c3 * c5 - c3 * c3) / (c1 * c2);
    c.c[8] = ((c3 * c5 + c1 * c8) / (c1 * c2 * c2 * c3)) * (c3 * (c3 - c1 * c5) - c1 * c1 * c8) +
             c6 * c8 / c3;

    if (integrability_residual(c) != 0 ||
        c.c9() != second_constraint_c9(c, SecondVariant::J1) ||
        c.c9() != second_constraint_c9(c, SecondVariant::J1Prime))
        throw InternalConsistencyError("tri_solve output violates its defining constraints for " +
                                       c.str());
    return c;
}

SkewStatus skew_adjoint_status(const OperatorMatrix& J) {
    try {
        return is_skew_adjoint(J) ? SkewStatus::Pass : SkewStatus::Fail;
    } catch (const UnsupportedOperationError&) {
        return SkewStatus::Unsupported;
    }
}

} // namespace mave
