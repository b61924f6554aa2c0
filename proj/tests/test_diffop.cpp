#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mave/diffop.hpp"
#include "mave/errors.hpp"

using namespace mave;
using namespace mave::jets;

namespace {

LocalOperator D(int t, int d1, int d2) {
    return LocalOperator::derivative(
        MultiIndex{std::uint16_t(t), std::uint16_t(d1), std::uint16_t(d2)});
}

LocalOperator random_op(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nterms(1, 3);
    std::uniform_int_distribution<int> coef(-4, 4);
    std::uniform_int_distribution<int> ord(0, 1);
    std::uniform_int_distribution<int> pick(0, 2);
    LocalOperator op;
    for (int i = nterms(rng); i > 0; --i) {
        JetPolynomial c = num(coef(rng));
        if (pick(rng) == 0)
            c = c * u(0, ord(rng), ord(rng));
        else if (pick(rng) == 1)
            c = c * v(0, ord(rng), ord(rng));
        op += LocalOperator::term(
            c, MultiIndex{std::uint16_t(ord(rng)), std::uint16_t(ord(rng)),
                          std::uint16_t(ord(rng))});
    }
    return op;
}

JetPolynomial random_poly(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> coef(-4, 4);
    std::uniform_int_distribution<int> ord(0, 1);
    return num(coef(rng)) * u(0, ord(rng), ord(rng)) * v(0, 0, ord(rng)) +
           num(coef(rng)) * u(ord(rng), 0, ord(rng)) + num(coef(rng));
}

} // namespace

TEST_CASE("application of named operators") {
    // L12(1) = u12 D1 - u11 D2 applied to u
    LocalOperator L121 = u(0, 1, 1) * D(0, 1, 0) - u(0, 2, 0) * D(0, 0, 1);
    CHECK(L121.apply(u(0, 0, 0)) == u(0, 1, 1) * u(0, 1, 0) - u(0, 2, 0) * u(0, 0, 1));
    // (c1 Dt - c3 D2) z2 with c1 = c3 = 1
    LocalOperator A1 = D(1, 0, 0) - D(0, 0, 1);
    CHECK(A1.apply(z2()) == num(-1));
    // nabla_c u = c1 u1 + c2 u2
    CHECK(nabla(rat(2), rat(3)).apply(u(0, 0, 0)) == num(2) * u(0, 1, 0) + num(3) * u(0, 0, 1));
}

TEST_CASE("composition expands by Leibniz") {
    // D1 o (u2 D2) = u12 D2 + u2 D1D2
    LocalOperator lhs = D(0, 1, 0).compose(u(0, 0, 1) * D(0, 0, 1));
    LocalOperator rhs = u(0, 1, 1) * D(0, 0, 1) + u(0, 0, 1) * D(0, 1, 1);
    CHECK(lhs == rhs);
    // [D1, u1 D2] = u11 D2
    CHECK(commutator(D(0, 1, 0), u(0, 1, 0) * D(0, 0, 1)) == u(0, 2, 0) * D(0, 0, 1));
    // constant-coefficient operators commute
    CHECK(commutator(D(1, 0, 0) - D(0, 0, 1), num(-1) * (D(1, 0, 0) + D(0, 1, 0))).is_zero());
    CHECK(D(0, 1, 0).compose(D(0, 0, 1)) == D(0, 0, 1).compose(D(0, 1, 0)));
}

TEST_CASE("apply o compose = compose o apply (randomized)") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 30; ++i) {
        LocalOperator a = random_op(rng);
        LocalOperator b = random_op(rng);
        JetPolynomial p = random_poly(rng);
        CHECK(a.compose(b).apply(p) == a.apply(b.apply(p)));
    }
}

TEST_CASE("Jacobi identity (randomized)") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 15; ++i) {
        LocalOperator a = random_op(rng);
        LocalOperator b = random_op(rng);
        LocalOperator c = random_op(rng);
        LocalOperator j = commutator(commutator(a, b), c) + commutator(commutator(b, c), a) +
                          commutator(commutator(c, a), b);
        CHECK(j.is_zero());
    }
}

TEST_CASE("formal adjoint") {
    CHECK(D(0, 1, 0).adjoint() == -D(0, 1, 0));
    // L-operators are skew-adjoint: (u22 D1 - u12 D2)* = -(u22 D1 - u12 D2)
    LocalOperator L122 = u(0, 0, 2) * D(0, 1, 0) - u(0, 1, 1) * D(0, 0, 1);
    CHECK(L122.adjoint() == -L122);
    // multiplication operators are self-adjoint
    CHECK(LocalOperator::multiplication(u(0, 1, 0)).adjoint() ==
          LocalOperator::multiplication(u(0, 1, 0)));
    SUBCASE("involution (randomized)") {
        std::mt19937_64 rng(5);
        for (int i = 0; i < 25; ++i) {
            LocalOperator a = random_op(rng);
            CHECK(a.adjoint().adjoint() == a);
        }
    }
    SUBCASE("adjoint pairing <a* p, q> = <p, a q> modulo divergence") {
        // verified through: a*(p)·q - p·a(q) has zero Euler expressions; the
        // variational module tests this; here just the second-order example.
        LocalOperator a = u(0, 0, 1) * D(0, 2, 0);
        CHECK(a.adjoint() == D(0, 2, 0).compose(u(0, 0, 1) * LocalOperator::identity()));
    }
}

TEST_CASE("nonlocal normalization") {
    const Rational c1 = rat(2), c2 = rat(3);
    LocalOperator nab = nabla(c1, c2);
    SUBCASE("nabla o nabla^{-1} = identity") {
        LinearDiffOperator inv = LinearDiffOperator::nabla_inverse(c1, c2, LocalOperator::identity());
        LinearDiffOperator prod = LinearDiffOperator(nab).compose(inv);
        CHECK(prod == LinearDiffOperator(LocalOperator::identity()));
    }
    SUBCASE("nabla^{-1} o nabla = identity") {
        LinearDiffOperator op = LinearDiffOperator::nabla_inverse(c1, c2, nab);
        CHECK(op.is_local());
        CHECK(op == LinearDiffOperator(LocalOperator::identity()));
    }
    SUBCASE("direction scaling") {
        // nabla_{2c}^{-1} = (1/2) nabla_c^{-1}
        LinearDiffOperator a =
            LinearDiffOperator::nabla_inverse(rat(4), rat(6), LocalOperator::identity());
        LinearDiffOperator b = rat(1, 2) * LinearDiffOperator::nabla_inverse(
                                               rat(2), rat(3), LocalOperator::identity());
        CHECK(a == b);
    }
    SUBCASE("divisible part is extracted exactly once") {
        // inner = nabla o (u1 D2) + D2: quotient u1 D2 moves out, D2 stays in
        LocalOperator inner = nab.compose(u(0, 1, 0) * D(0, 0, 1)) + D(0, 0, 1);
        LinearDiffOperator op = LinearDiffOperator::nabla_inverse(c1, c2, inner);
        CHECK(op.local() == u(0, 1, 0) * D(0, 0, 1));
        REQUIRE(op.nonlocal().size() == 1);
        // remainder is pivot-free (no D1 words left)
        for (const auto& [w, p] : op.nonlocal()[0].inner.terms())
            CHECK(w.z1 == 0);
        // and recomposition with nabla recovers the inner operator
        LinearDiffOperator cleared = LinearDiffOperator(nab).compose(op);
        CHECK(cleared.is_local());
        CHECK(cleared.local() == inner);
    }
    SUBCASE("left-division is canonical: D2 not divisible by D1+D2") {
        LeftDivision d = left_divide_nabla(D(0, 0, 1), rat(1), rat(1));
        CHECK(d.quotient.is_zero());
        CHECK(d.remainder == D(0, 0, 1));
    }
}

TEST_CASE("nonlocal composition rules") {
    const Rational c1 = rat(1), c2 = rat(2);
    LinearDiffOperator inv = LinearDiffOperator::nabla_inverse(c1, c2, D(0, 0, 1));
    SUBCASE("right composition with any local operator") {
        LinearDiffOperator r = inv.compose(LinearDiffOperator(u(0, 2, 0) * D(0, 1, 0)));
        CHECK_FALSE(r.is_local());
    }
    SUBCASE("left composition requires constant coefficients") {
        LinearDiffOperator c = LinearDiffOperator(D(1, 0, 0)).compose(inv);
        CHECK_FALSE(c.is_local());
        CHECK_THROWS_AS(LinearDiffOperator(u(0, 1, 0) * D(0, 1, 0)).compose(inv),
                        NormalizationError);
    }
    SUBCASE("depth two is rejected") {
        CHECK_THROWS_AS(inv.compose(inv), NormalizationError);
    }
    SUBCASE("constants pass through and clearing still works") {
        LinearDiffOperator lhs = LinearDiffOperator(rat(5) * nabla(c1, c2)).compose(inv);
        CHECK(lhs.is_local());
        CHECK(lhs.local() == rat(5) * D(0, 0, 1));
    }
    SUBCASE("symbolic application of nonlocal operators is refused") {
        CHECK_THROWS_AS(inv.apply(u(0, 0, 0)), UnsupportedOperationError);
    }
}

TEST_CASE("nonlocal adjoint") {
    const Rational c1 = rat(1), c2 = rat(3);
    // (c3 nabla^{-1} D2)* = c3 nabla^{-1} D2 is NOT skew by itself; check the rule
    LinearDiffOperator op = LinearDiffOperator::nabla_inverse(c1, c2, rat(7) * D(0, 0, 1));
    // (nabla^{-1} o 7 D2)* = (7 D2)* o (-nabla^{-1}) = -7 (-D2) nabla^{-1} = 7 D2 nabla^{-1}
    CHECK(op.adjoint() == op);
    // involution
    CHECK(op.adjoint().adjoint() == op);
    // second-order constant inner stays put with a sign
    LinearDiffOperator op2 = LinearDiffOperator::nabla_inverse(c1, c2, D(0, 0, 2));
    CHECK(op2.adjoint() == -op2);
    // variable-coefficient inner is outside the calculus
    LinearDiffOperator bad =
        LinearDiffOperator::nabla_inverse(c1, c2, u(0, 0, 2) * D(0, 0, 1));
    CHECK_THROWS_AS(bad.adjoint(), UnsupportedOperationError);
}

TEST_CASE("operator equality") {
    LocalOperator a = u(0, 1, 1) * D(0, 1, 0);
    CHECK(operator_equal(a, a).equal);
    CHECK(operator_equal(LinearDiffOperator(D(0, 1, 0)).compose(D(0, 0, 1)),
                         LinearDiffOperator(D(0, 0, 1)).compose(D(0, 1, 0)))
              .equal);
    auto ne = operator_equal(a, LinearDiffOperator(D(0, 1, 0)));
    CHECK_FALSE(ne.equal);
    CHECK_FALSE(ne.residual.is_zero());
}

TEST_CASE("operator matrix") {
    OperatorMatrix id = OperatorMatrix::identity();
    OperatorMatrix m(D(0, 1, 0), LinearDiffOperator(), u(0, 1, 0) * D(0, 0, 1),
                     LocalOperator::identity());
    CHECK(m.compose(id) == m);
    CHECK(id.compose(m) == m);
    CHECK(m.is_local());
}

TEST_CASE("skew-adjoint matrix check") {
    // [[0, 1], [-1, 0]] is NOT skew-adjoint in the operator sense? It is:
    // adjoint of constants is themselves; need adjoint(J_ji) == -J_ij.
    OperatorMatrix m(LinearDiffOperator(), LocalOperator::identity(),
                     -LocalOperator::identity(), LinearDiffOperator());
    CHECK(is_skew_adjoint(m));
    OperatorMatrix d1(D(0, 1, 0), LinearDiffOperator(), LinearDiffOperator(), D(0, 0, 1));
    CHECK(is_skew_adjoint(d1));
    OperatorMatrix bad(LocalOperator::identity(), LinearDiffOperator(), LinearDiffOperator(),
                       LinearDiffOperator());
    CHECK_FALSE(is_skew_adjoint(bad));
}

TEST_CASE("operator printing") {
    LocalOperator op = u(0, 2, 0) * D(0, 1, 0) - u(0, 1, 1) * D(0, 0, 1);
    CHECK(op.str() == "u[0,2,0]*D[0,1,0] - u[0,1,1]*D[0,0,1]");
    LinearDiffOperator inv =
        LinearDiffOperator::nabla_inverse(rat(1), rat(1), rat(2) * D(0, 0, 1));
    CHECK(inv.str() == "Ninv(1,1)∘(2*D[0,0,1])");
}
