#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qtoda/laurent.hpp"
#include "qtoda/linalg.hpp"
#include "qtoda/multipoly.hpp"

using namespace qtoda;

namespace {

MultiPoly pv(int i) { return MultiPoly::variable(var_p(i)); }
MultiPoly qv(int i) { return MultiPoly::variable(var_q(i)); }

// Random small polynomial in p_0..p_2, q_1..q_2 for property checks.
MultiPoly random_poly(std::mt19937_64& rng, bool with_q = true) {
    std::uniform_int_distribution<int> nterms(1, 4), expo(0, 2), coef(-3, 3);
    MultiPoly f;
    for (int t = 0; t < nterms(rng); ++t) {
        Mono m;
        for (int i = 0; i < 3; ++i) {
            int e = expo(rng);
            if (e > 0) m.emplace_back(var_p(i), e);
        }
        if (with_q)
            for (int i = 1; i <= 2; ++i) {
                int e = expo(rng) / 2;
                if (e > 0) m.emplace_back(var_q(i), e);
            }
        int c = coef(rng);
        if (c != 0) f.add_term(m, c);
    }
    return f;
}

}  // namespace

TEST_CASE("rational helpers keep canonical form") {
    Rat r = rat_from_string("6/-4");
    CHECK(rat_to_string(r) == "-3/2");
    CHECK(r.get_den() > 0);
    Rat s = rat_from_string("10/5");
    CHECK(rat_to_string(s) == "2");
    CHECK_THROWS_AS(rat_from_string("abc"), std::invalid_argument);
}

TEST_CASE("difference of squares") {
    MultiPoly lhs = (pv(0) + pv(1)) * (pv(0) - pv(1));
    MultiPoly rhs = pv(0) * pv(0) - pv(1) * pv(1);
    CHECK(lhs == rhs);
}

TEST_CASE("weighted degree uses deg p = 1, deg q = 2") {
    MultiPoly f = qv(1) * pv(2);
    CHECK(f.weighted_degree() == 3);
    CHECK(MultiPoly::variable(var_hbar()).weighted_degree() == 1);
    CHECK(MultiPoly::variable(var_lambda()).weighted_degree() == 1);
}

TEST_CASE("partial derivative") {
    MultiPoly f = pv(0) * pv(1) + qv(1);
    CHECK(f.derivative(var_p(0)) == pv(1));
    CHECK(f.derivative(var_q(1)) == MultiPoly::constant(1));
    CHECK(f.derivative(var_p(2)).is_zero());
}

TEST_CASE("canonical text form and parse round trip") {
    MultiPoly f = pv(0).pow(2) * qv(1).scaled(Rat(3, 2)) + pv(1) - MultiPoly::constant(2);
    const std::string s = f.to_string();
    CHECK(s == "3/2*p_0^2*q_1 + p_1 - 2");
    CHECK(poly_parse(s) == f);
    CHECK(poly_parse("J_2") == -(pv(0) + pv(1)));
    CHECK(MultiPoly::zero().to_string() == "0");
}

TEST_CASE("to_string is insertion-order independent") {
    MultiPoly a, b;
    a.add_term({{var_p(0), 1}}, 1);
    a.add_term({{var_p(1), 2}}, 2);
    b.add_term({{var_p(1), 2}}, 2);
    b.add_term({{var_p(0), 1}}, 1);
    CHECK(a.to_string() == b.to_string());
    CHECK(a == b);
}

TEST_CASE("determinant by cofactor expansion") {
    // identity 3x3
    Mat<MultiPoly> id(3, 3);
    for (int i = 0; i < 3; ++i) id(i, i) = MultiPoly::constant(1);
    CHECK(det(id) == MultiPoly::constant(1));

    // [[lambda+p_0, q_1], [-1, lambda+p_1]]
    Mat<MultiPoly> m(2, 2);
    const MultiPoly l = MultiPoly::variable(var_lambda());
    m(0, 0) = l + pv(0);
    m(0, 1) = qv(1);
    m(1, 0) = MultiPoly::constant(-1);
    m(1, 1) = l + pv(1);
    const MultiPoly expect = l * l + (pv(0) + pv(1)) * l + pv(0) * pv(1) + qv(1);
    CHECK(det(m) == expect);

    // 3x3 Toda matrix, hand cofactor expansion
    Mat<MultiPoly> t(3, 3);
    t(0, 0) = l + pv(0);
    t(1, 1) = l + pv(1);
    t(2, 2) = l + pv(2);
    t(0, 1) = qv(1);
    t(1, 2) = qv(2);
    t(1, 0) = MultiPoly::constant(-1);
    t(2, 1) = MultiPoly::constant(-1);
    const MultiPoly expect3 =
        (l + pv(0)) * (l + pv(1)) * (l + pv(2)) + qv(1) * (l + pv(2)) + qv(2) * (l + pv(0));
    CHECK(det(t) == expect3);
}

TEST_CASE("det is multiplicative on random 3x3 rational matrices") {
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<int> coef(-4, 4);
    for (int rep = 0; rep < 10; ++rep) {
        Mat<Rat> a(3, 3), b(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                a(i, j) = coef(rng);
                b(i, j) = coef(rng);
            }
        CHECK(det(a * b) == det(a) * det(b));
    }
}

TEST_CASE("exact linear solve") {
    Mat<Rat> id(2, 2);
    id(0, 0) = 1;
    id(1, 1) = 1;
    const std::vector<Rat> b{1, 2};
    CHECK(solve_exact(id, b) == b);

    Mat<Rat> d(2, 2);
    d(0, 0) = 2;
    d(1, 1) = 4;
    const std::vector<Rat> x = solve_exact(d, {1, 1});
    CHECK(x[0] == Rat(1, 2));
    CHECK(x[1] == Rat(1, 4));

    Mat<Rat> sing(2, 2);
    sing(0, 0) = 1;
    sing(0, 1) = 1;
    sing(1, 0) = 2;
    sing(1, 1) = 2;
    CHECK_THROWS_AS(solve_exact(sing, {1, 1}), RankError);
    try {
        solve_exact(sing, {1, 1});
    } catch (const RankError& e) {
        CHECK(e.rank == 1);
    }
}

TEST_CASE("least squares of a consistent overdetermined system") {
    Mat<Cd> a(3, 2);
    a(0, 0) = 1;
    a(1, 1) = 1;
    a(2, 0) = 1;
    a(2, 1) = 1;
    // b = A * (2, 3)
    const std::vector<Cd> b{2.0, 3.0, 5.0};
    const LstSqResult r = lstsq_complex(a, b);
    CHECK(r.residual < 1e-12);
    CHECK(std::abs(r.x[0] - Cd(2.0)) < 1e-12);
    CHECK(std::abs(r.x[1] - Cd(3.0)) < 1e-12);
}

TEST_CASE("poisson bracket basics") {
    CHECK(poisson(pv(1), qv(1)) == qv(1));
    CHECK(poisson(qv(1), qv(2)).is_zero());
    // {p_0, q_1} = -q_1 (t_0 enters the exponent with a minus sign)
    CHECK(poisson(pv(0), qv(1)) == -qv(1));
}

TEST_CASE("poisson bracket is bilinear, antisymmetric, Leibniz, Jacobi") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 12; ++rep) {
        const MultiPoly f = random_poly(rng), g = random_poly(rng), h = random_poly(rng);
        CHECK((poisson(f, g) + poisson(g, f)).is_zero());
        CHECK(poisson(f + g, h) == poisson(f, h) + poisson(g, h));
        CHECK(poisson(f * g, h) == f * poisson(g, h) + poisson(f, h) * g);
        const MultiPoly jacobi =
            poisson(f, poisson(g, h)) + poisson(g, poisson(h, f)) + poisson(h, poisson(f, g));
        CHECK(jacobi.is_zero());
    }
}

TEST_CASE("laurent polynomials in h") {
    LaurentH a = LaurentH::h_power(-2);
    a += LaurentH::h_power(1, Rat(3, 2));
    CHECK(a.to_string() == "3/2*h + h^-2");
    CHECK(laurent_parse(a.to_string()) == a);
    CHECK((a - a).is_zero());
    LaurentH b = a * LaurentH::h_power(2);
    CHECK(b.min_exponent() == 0);
    CHECK(b.max_exponent() == 3);
    CHECK(LaurentH::h_power(2, Rat(4)).monomial_inverse() ==
          LaurentH::h_power(-2, Rat(1, 4)));
    CHECK(std::abs(a.eval(2.0) - (3.0 + 0.25)) < 1e-15);
}

TEST_CASE("substitute") {
    MultiPoly f = pv(0) * pv(0) + qv(1);
    MultiPoly g = f.substitute(var_p(0), pv(1) + MultiPoly::constant(1));
    MultiPoly expect = (pv(1) + MultiPoly::constant(1)).pow(2) + qv(1);
    CHECK(g == expect);
    CHECK(f.substitute(var_q(1), MultiPoly::zero()) == pv(0) * pv(0));
}

TEST_CASE("determinant size cap") {
    Mat<MultiPoly> big(13, 13);
    for (int i = 0; i < 13; ++i) big(i, i) = MultiPoly::constant(1);
    CHECK_THROWS_AS(det(big), ResourceError);
}
