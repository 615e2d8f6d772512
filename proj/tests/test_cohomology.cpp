#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qtoda/cohomology.hpp"
#include "qtoda/toda.hpp"

using namespace qtoda;

namespace {
MultiPoly pv(int i) { return MultiPoly::variable(var_p(i)); }
}  // namespace

TEST_CASE("classical ring for n = 1") {
    const FlagRing& ring = FlagRing::get(1);
    CHECK(ring.rank() == 2);
    CHECK(basis_label(ring.basis()[0]) == "1");
    CHECK(basis_label(ring.basis()[1]) == "p_1");
    // p_1 * p_1 = 0
    ClassRat sq = ring.class_of(pv(1) * pv(1));
    CHECK(is_zero(sq[0]));
    CHECK(is_zero(sq[1]));
}

TEST_CASE("classical ring dimensions") {
    const FlagRing& r2 = FlagRing::get(2);
    CHECK(r2.rank() == 6);
    CHECK(r2.graded_dims() == std::vector<int>{1, 2, 2, 1});
    const FlagRing& r3 = FlagRing::get(3);
    CHECK(r3.rank() == 24);
    CHECK(r3.graded_dims() == std::vector<int>{1, 3, 5, 6, 5, 3, 1});
    CHECK_THROWS_AS(FlagRing::get(0), InvalidInput);
}

TEST_CASE("sum of p_i^2 vanishes classically") {
    for (int n = 1; n <= 3; ++n) {
        const FlagRing& ring = FlagRing::get(n);
        MultiPoly s;
        for (int i = 0; i <= n; ++i) s += pv(i) * pv(i);
        for (const Rat& c : ring.class_of(s)) CHECK(is_zero(c));
    }
}

TEST_CASE("integration functional") {
    const FlagRing& r1 = FlagRing::get(1);
    CHECK(r1.integrate(r1.class_of(pv(1))) == 1);
    CHECK(r1.integrate(r1.class_of(MultiPoly::constant(1))) == 0);
    // n = 2 normalization: the positive-root product integrates to 3!
    const FlagRing& r2 = FlagRing::get(2);
    const MultiPoly vand = (pv(1) - pv(0)) * (pv(2) - pv(0)) * (pv(2) - pv(1));
    CHECK(r2.integrate(r2.class_of(vand)) == 6);
}

TEST_CASE("poincare pairing") {
    const FlagRing& r1 = FlagRing::get(1);
    CHECK(r1.pairing(r1.class_of(MultiPoly::constant(1)), r1.class_of(pv(1))) == 1);

    const FlagRing& r2 = FlagRing::get(2);
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> coef(-3, 3);
    for (int rep = 0; rep < 10; ++rep) {
        ClassRat a(6), b(6);
        for (int i = 0; i < 6; ++i) {
            a[i] = coef(rng);
            b[i] = coef(rng);
        }
        CHECK(r2.pairing(a, b) == r2.pairing(b, a));
    }
    // Gram matrix nondegenerate (Poincare duality)
    Mat<Rat> g = r2.gram();
    std::vector<std::vector<Rat>> rows(6, std::vector<Rat>(6));
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) rows[i][j] = g(i, j);
    CHECK(rref(std::move(rows)).rank() == 6);
}

TEST_CASE("quantum ring identities") {
    // n = 1: J_1 o J_1 = q_1 directly in the quotient model
    const QuantumRing& q1 = QuantumRing::get(1);
    ClassPolyQ prod = q1.quantum_product(poly_parse("J_1"), poly_parse("J_1"));
    CHECK(prod[0] == MultiPoly::variable(var_q(1)));
    CHECK(prod[1].is_zero());

    for (int n = 1; n <= 2; ++n) {
        const CheckReport rep = check_quantum_ring(n);
        CHECK(rep.pass);
    }
}

TEST_CASE("quantum table entries respect the grading") {
    const QuantumRing& ring = QuantumRing::get(2);
    const FlagRing& cl = ring.classical();
    for (int i = 0; i <= 2; ++i)
        for (int r = 0; r < 6; ++r)
            for (int c = 0; c < 6; ++c) {
                const MultiPoly& e = ring.mult_matrix(i)(r, c);
                for (const auto& [mono, coef] : e.terms()) {
                    // p-degree deficit is twice the q-degree
                    int qdeg = 0;
                    for (const auto& [v, ex] : mono) qdeg += ex;
                    CHECK(cl.basis_degree(c) + 1 - cl.basis_degree(r) == 2 * qdeg);
                }
            }
}

TEST_CASE("normal form respects grading") {
    const QuantumRing& ring = QuantumRing::get(2);
    const FlagRing& cl = ring.classical();
    // class of a weighted-homogeneous polynomial has matching-degree coords
    const MultiPoly f =
        pv(0) * pv(1) * pv(2) + MultiPoly::variable(var_q(1)) * pv(2).scaled(Rat(2));
    int deg = 0;
    REQUIRE(f.is_weighted_homogeneous(&deg));
    ClassPolyQ c = ring.class_of(f);
    for (int k = 0; k < 6; ++k)
        for (const auto& [mono, coef] : c[static_cast<std::size_t>(k)].terms()) {
            int qdeg = 0;
            for (const auto& [v, ex] : mono) qdeg += ex;
            CHECK(cl.basis_degree(k) + 2 * qdeg == deg);
        }
}

TEST_CASE("frobenius property of the quantum pairing") {
    const QuantumRing& ring = QuantumRing::get(2);
    const int nb = ring.rank();
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> pick(0, nb - 1);
    for (int rep = 0; rep < 20; ++rep) {
        const int a = pick(rng), b = pick(rng), c = pick(rng);
        ClassPolyQ ca(static_cast<std::size_t>(nb)), cb(static_cast<std::size_t>(nb)),
            cc(static_cast<std::size_t>(nb));
        ca[static_cast<std::size_t>(a)] = MultiPoly::constant(1);
        cb[static_cast<std::size_t>(b)] = MultiPoly::constant(1);
        cc[static_cast<std::size_t>(c)] = MultiPoly::constant(1);
        const ClassPolyQ ab = ring.quantum_product(ring.classical().basis_poly(a),
                                                   ring.classical().basis_poly(b));
        const ClassPolyQ bc = ring.quantum_product(ring.classical().basis_poly(b),
                                                   ring.classical().basis_poly(c));
        CHECK(ring.frobenius_pairing(ab, cc) == ring.frobenius_pairing(ca, bc));
    }
}

TEST_CASE("fiber points for n = 1") {
    const QuantumRing& ring = QuantumRing::get(1);
    auto pts = ring.fiber_points({Cd(1.0, 0.0)}, 5);
    REQUIRE(pts.size() == 2);
    // points (-1, 1) and (1, -1) in (p_0, p_1)
    CHECK(std::abs(pts[0].p[0] - Cd(-1, 0)) < 1e-10);
    CHECK(std::abs(pts[0].p[1] - Cd(1, 0)) < 1e-10);
    CHECK(std::abs(pts[1].p[0] - Cd(1, 0)) < 1e-10);
    CHECK(std::abs(pts[1].p[1] - Cd(-1, 0)) < 1e-10);

    // weighted homogeneity: q = t^4 scales p by t^2
    const double t = 1.3;
    auto scaled = ring.fiber_points({Cd(std::pow(t, 4.0), 0.0)}, 5);
    CHECK(std::abs(scaled[0].p[0] - Cd(-t * t, 0)) < 1e-9);
    CHECK(std::abs(scaled[1].p[0] - Cd(t * t, 0)) < 1e-9);
}

TEST_CASE("fiber points for n = 2 are distinct and on the variety") {
    const QuantumRing& ring = QuantumRing::get(2);
    const std::vector<Cd> q{Cd(0.7, 0.2), Cd(-0.4, 0.6)};
    auto pts = ring.fiber_points(q, 5);
    REQUIRE(pts.size() == 6);
    for (const auto& pt : pts) CHECK(pt.residual < 1e-9);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            double dist = 0;
            for (std::size_t k = 0; k < 3; ++k)
                dist = std::max(dist, std::abs(pts[i].p[k] - pts[j].p[k]));
            CHECK(dist > 1e-6);
        }
    CHECK_THROWS_AS(ring.fiber_points({Cd(0, 0), Cd(1, 0)}, 5), InvalidInput);
}

TEST_CASE("residue pairing") {
    const QuantumRing& r1 = QuantumRing::get(1);
    // A = B = 1 sums to zero over the two fiber points
    const std::vector<Cd> q{Cd(0.37, 0.21)};
    const Cd v = r1.residue_pairing(MultiPoly::constant(1), MultiPoly::constant(1), q);
    CHECK(std::abs(v) < 1e-12);
    // symmetry is exact
    const Cd ab = r1.residue_pairing(poly_parse("p_1"), poly_parse("1 + p_1"), q);
    const Cd ba = r1.residue_pairing(poly_parse("1 + p_1"), poly_parse("p_1"), q);
    CHECK(ab == ba);
    // matches the exact pairing over random q
    for (int n = 1; n <= 2; ++n) {
        const CheckReport rep = check_residue_pairing(n, 3, 999);
        CHECK(rep.pass);
        CHECK(rep.residual < 1e-8);
    }
    // an injected sign error is detected
    const CheckReport bad = check_residue_pairing(1, 1, 999, -QuantumRing::get(1).residue_sign());
    CHECK_FALSE(bad.pass);
}
