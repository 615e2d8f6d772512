#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qtoda/toda.hpp"

using namespace qtoda;

namespace {
MultiPoly pv(int i) { return MultiPoly::variable(var_p(i)); }
MultiPoly qv(int i) { return MultiPoly::variable(var_q(i)); }
MultiPoly lv() { return MultiPoly::variable(var_lambda()); }
}  // namespace

TEST_CASE("delta for small n") {
    CHECK(build_delta(0) == lv() + pv(0));
    CHECK(build_delta(1) == lv() * lv() + (pv(0) + pv(1)) * lv() + pv(0) * pv(1) + qv(1));
    // n = 2 via the hand cofactor expansion
    const MultiPoly expect = (lv() + pv(0)) * (lv() + pv(1)) * (lv() + pv(2)) +
                             qv(1) * (lv() + pv(2)) + qv(2) * (lv() + pv(0));
    CHECK(build_delta(2) == expect);
    CHECK(build_delta(2).to_string() ==
          poly_parse("lambda^3 + (p_0+p_1+p_2)*lambda^2 + "
                     "(p_0*p_1+p_0*p_2+p_1*p_2+q_1+q_2)*lambda + "
                     "p_0*p_1*p_2 + q_1*p_2 + q_2*p_0")
              .to_string());
    CHECK_THROWS_AS(build_delta(9), InvalidInput);
}

TEST_CASE("conserved quantities") {
    for (int n = 0; n <= 4; ++n) {
        const auto d = conserved(n);
        REQUIRE(static_cast<int>(d.size()) == n + 1);
        MultiPoly d0;
        for (int i = 0; i <= n; ++i) d0 += pv(i);
        CHECK(d[0] == d0);
    }
    // D_1 = sum_{i>j} p_i p_j + sum q_i
    const auto d1 = conserved(2)[1];
    MultiPoly expect = pv(0) * pv(1) + pv(0) * pv(2) + pv(1) * pv(2) + qv(1) + qv(2);
    CHECK(d1 == expect);
    // D_2 for n = 2
    CHECK(conserved(2)[2] == pv(0) * pv(1) * pv(2) + qv(1) * pv(2) + qv(2) * pv(0));
}

TEST_CASE("setting q = 0 turns D_m into elementary symmetric polynomials") {
    for (int n = 1; n <= 4; ++n) {
        auto d = conserved(n);
        for (int m = 0; m <= n; ++m) {
            MultiPoly at0 = d[m];
            for (int i = 1; i <= n; ++i) at0 = at0.substitute(var_q(i), MultiPoly::zero());
            // e_{m+1} = coefficient of lambda^{n-m} in prod (lambda + p_i)
            MultiPoly prod = MultiPoly::constant(1);
            for (int i = 0; i <= n; ++i) prod *= lv() + pv(i);
            CHECK(at0 == prod.lambda_coefficient(n - m));
        }
    }
}

TEST_CASE("quantized conserved quantities") {
    const auto dq = quantized(2);
    // D_1-hat = sum_{i>j} h^2 d_i d_j + q_1 + q_2
    DiffOp expect(2);
    expect.add_term(OpKey{{0, 0}, {1, 1, 0}, 0}, 1);
    expect.add_term(OpKey{{0, 0}, {1, 0, 1}, 0}, 1);
    expect.add_term(OpKey{{0, 0}, {0, 1, 1}, 0}, 1);
    expect.add_term(OpKey{{1, 0}, {0, 0, 0}, 0}, 1);
    expect.add_term(OpKey{{0, 1}, {0, 0, 0}, 0}, 1);
    CHECK(dq[1] == expect);
    // ordering-independence for all n <= 6
    for (int n = 0; n <= 6; ++n) {
        const auto ds = conserved(n);
        for (const auto& d : ds) CHECK(quantize(d, n).ordering_independent);
    }
}

TEST_CASE("hamiltonian") {
    const DiffOp h1 = hamiltonian(1);
    DiffOp expect(1);
    expect.add_term(OpKey{{0}, {2, 0}, 0}, Rat(1, 2));
    expect.add_term(OpKey{{0}, {0, 2}, 0}, Rat(1, 2));
    expect.add_term(OpKey{{1}, {0, 0}, 0}, -1);
    CHECK(h1 == expect);
    CHECK(symbol(hamiltonian(2)) == hamiltonian_symbol(2));
    // n = 0: no potential
    DiffOp h0 = hamiltonian(0);
    DiffOp expect0(0);
    expect0.add_term(OpKey{{}, {2}, 0}, Rat(1, 2));
    CHECK(h0 == expect0);
}

TEST_CASE("theorem 1 for n = 0, 1, 2") {
    for (int n = 0; n <= 2; ++n) {
        const CheckReport rep = check_theorem1(n);
        CHECK(rep.pass);
        CHECK(rep.residual == 0.0);
    }
    // the simplest case by hand: [H, h d_0 + h d_1] = 0
    const DiffOp h = hamiltonian(1);
    const DiffOp d0 = DiffOp::h_del(1, 0) + DiffOp::h_del(1, 1);
    CHECK(commutator(h, d0).is_zero());
    CHECK_THROWS_AS(check_theorem1(9), InvalidInput);
}

TEST_CASE("poisson commutativity of the classical integrals") {
    const auto ds = conserved(2);
    CHECK(poisson(hamiltonian_symbol(2), ds[1]).is_zero());
    CHECK(poisson(ds[1], ds[2]).is_zero());
}

TEST_CASE("grading and continued fraction for n <= 4") {
    for (int n = 0; n <= 4; ++n) {
        const CheckReport rep = check_grading_and_fraction(n);
        CHECK(rep.pass);
    }
    // n = 1 numerator by hand: (lambda+p_0)(lambda+p_1) + q_1
    CHECK(build_delta(1) == (lv() + pv(0)) * (lv() + pv(1)) + qv(1));
    // homogeneity example: D_1 has weighted degree 2
    int deg = 0;
    CHECK(conserved(1)[1].is_weighted_homogeneous(&deg));
    CHECK(deg == 2);
}
