#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qtoda/toda.hpp"
#include "qtoda/weyl.hpp"

using namespace qtoda;

namespace {

DiffOp random_op(std::mt19937_64& rng, int n) {
    std::uniform_int_distribution<int> nterms(1, 3), expo(0, 2), coef(-3, 3), hexp(0, 1);
    DiffOp x(n);
    for (int t = 0; t < nterms(rng); ++t) {
        OpKey key;
        key.d.resize(n);
        key.a.resize(n + 1);
        for (int i = 0; i < n; ++i) key.d[i] = expo(rng) / 2;
        for (int i = 0; i <= n; ++i) key.a[i] = expo(rng);
        key.k = hexp(rng);
        int c = coef(rng);
        if (c != 0) x.add_term(key, c);
    }
    return x;
}

// h-leading slice: coefficient polynomial of the k = 1 part.
MultiPoly h_linear_part(const DiffOp& x) {
    MultiPoly out;
    for (const auto& [key, c] : x.terms()) {
        if (key.k != 1) continue;
        Mono m;
        for (int i = 0; i <= x.n(); ++i)
            if (key.a[i] > 0) m.emplace_back(var_p(i), key.a[i]);
        for (int i = 0; i < x.n(); ++i)
            if (key.d[i] > 0) m.emplace_back(var_q(i + 1), key.d[i]);
        std::sort(m.begin(), m.end());
        out.add_term(std::move(m), c);
    }
    return out;
}

}  // namespace

TEST_CASE("compose moves derivatives past q-monomials") {
    const int n = 1;
    DiffOp hd1 = DiffOp::h_del(n, 1);
    DiffOp hd0 = DiffOp::h_del(n, 0);
    DiffOp q1 = DiffOp::q_monomial(n, {1});

    // compose(h d_1, q_1) = q_1 h d_1 + h q_1
    DiffOp r = compose(hd1, q1);
    DiffOp expect = DiffOp(n);
    expect.add_term(OpKey{{1}, {0, 1}, 0}, 1);
    expect.add_term(OpKey{{1}, {0, 0}, 1}, 1);
    CHECK(r == expect);
    CHECK(r.to_string() == "h*q_1*d_1 + h*q_1");

    // compose(h d_0, q_1) = q_1 h d_0 - h q_1
    DiffOp r0 = compose(hd0, q1);
    DiffOp expect0 = DiffOp(n);
    expect0.add_term(OpKey{{1}, {1, 0}, 0}, 1);
    expect0.add_term(OpKey{{1}, {0, 0}, 1}, -1);
    CHECK(r0 == expect0);

    // unit
    DiffOp one = DiffOp::constant(n, 1);
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 5; ++rep) {
        DiffOp x = random_op(rng, n);
        CHECK(compose(x, one) == x);
        CHECK(compose(one, x) == x);
    }
}

TEST_CASE("commutators") {
    const int n = 1;
    CHECK(commutator(DiffOp::h_del(n, 1), DiffOp::h_del(n, 0)).is_zero());
    DiffOp c = commutator(DiffOp::h_del(n, 1), DiffOp::q_monomial(n, {1}));
    DiffOp expect = DiffOp(n);
    expect.add_term(OpKey{{1}, {0, 0}, 1}, 1);  // h q_1
    CHECK(c == expect);
}

TEST_CASE("compose is associative on random triples") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 8; ++rep) {
        const int n = 2;
        DiffOp x = random_op(rng, n), y = random_op(rng, n), z = random_op(rng, n);
        CHECK(compose(x, compose(y, z)) == compose(compose(x, y), z));
    }
}

TEST_CASE("symbol of compose example and multiplicativity") {
    const int n = 1;
    DiffOp r = compose(DiffOp::h_del(n, 1), DiffOp::q_monomial(n, {1}));
    CHECK(symbol(r) == MultiPoly::variable(var_q(1)) * MultiPoly::variable(var_p(1)));

    CHECK(symbol(hamiltonian(2)) == hamiltonian_symbol(2));

    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 8; ++rep) {
        DiffOp x = random_op(rng, 2), y = random_op(rng, 2);
        CHECK(symbol(compose(x, y)) == symbol(x) * symbol(y));
    }
}

TEST_CASE("h-leading part of a commutator is the Poisson bracket of symbols") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 8; ++rep) {
        const int n = 2;
        // symbols only (k = 0 terms) so that the h-expansion starts at h^1
        DiffOp x = random_op(rng, n), y = random_op(rng, n);
        DiffOp xs = quantize(symbol(x), n).op, ys = quantize(symbol(y), n).op;
        const DiffOp c = commutator(xs, ys);
        CHECK(h_linear_part(c) == poisson(symbol(xs), symbol(ys)));
    }
}

TEST_CASE("quantize and the ordering flag") {
    const int n = 2;
    // p_0 p_1 + q_1 -> h^2 d_0 d_1 + q_1, ordering-independent
    MultiPoly f = MultiPoly::variable(var_p(0)) * MultiPoly::variable(var_p(1)) +
                  MultiPoly::variable(var_q(1));
    QuantizeResult r = quantize(f, n);
    CHECK(r.ordering_independent);
    DiffOp expect(n);
    expect.add_term(OpKey{{0, 0}, {1, 1, 0}, 0}, 1);
    expect.add_term(OpKey{{1, 0}, {0, 0, 0}, 0}, 1);
    CHECK(r.op == expect);
    CHECK(symbol(r.op) == f);

    // p_1 q_1 is ordering-dependent
    MultiPoly g = MultiPoly::variable(var_p(1)) * MultiPoly::variable(var_q(1));
    CHECK_FALSE(quantize(g, n).ordering_independent);

    // D_2 for n = 2 is ordering-independent
    CHECK(quantize(conserved(2)[2], 2).ordering_independent);
}

TEST_CASE("apply acts through q-shifted derivatives") {
    const int n = 1;
    // apply(h d_0 + h d_1, q_1 * 1) = 0
    QSeries s(n, 3);
    s.add({1}, TPoly{{TMono{0, 0}, LaurentH(Rat(1))}});
    DiffOp sum = DiffOp::h_del(n, 0) + DiffOp::h_del(n, 1);
    CHECK(apply(sum, s).is_zero());

    // apply(h d_1, t_1) = h
    QSeries t1(n, 2);
    t1.add({0}, TPoly{{TMono{0, 1}, LaurentH(Rat(1))}});
    QSeries r = apply(DiffOp::h_del(n, 1), t1);
    QSeries expect(n, 2);
    expect.add({0}, TPoly{{TMono{0, 0}, LaurentH::h_power(1)}});
    r -= expect;
    CHECK(r.is_zero());
}

TEST_CASE("apply is a module action up to truncation") {
    std::mt19937_64 rng(23);
    const int n = 2;
    for (int rep = 0; rep < 6; ++rep) {
        DiffOp x = random_op(rng, n), y = random_op(rng, n);
        QSeries s(n, 6);
        std::uniform_int_distribution<int> expo(0, 1), coef(-2, 2);
        for (int d1 = 0; d1 <= 1; ++d1)
            for (int d2 = 0; d2 <= 1; ++d2) {
                TPoly f;
                TMono m{expo(rng), expo(rng), expo(rng)};
                f.emplace(m, LaurentH(Rat(coef(rng))));
                s.add({d1, d2}, f);
            }
        QSeries lhs = apply(compose(x, y), s);
        QSeries rhs = apply(x, apply(y, s));
        const int order = std::min(lhs.order(), rhs.order());
        lhs.set_order(order);
        rhs.set_order(order);
        lhs -= rhs;
        CHECK(lhs.is_zero());
    }
}

TEST_CASE("negative exponents are rejected") {
    DiffOp x(1);
    CHECK_THROWS_AS(x.add_term(OpKey{{-1}, {0, 0}, 0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(x.add_term(OpKey{{0}, {-1, 0}, 0}, 1), std::invalid_argument);
}
