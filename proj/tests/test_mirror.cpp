#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qtoda/cohomology.hpp"
#include "qtoda/mirror.hpp"

using namespace qtoda;

TEST_CASE("graph cardinalities") {
    for (int n = 1; n <= 6; ++n) {
        const FlagGraph g = FlagGraph::build(n);
        CHECK(static_cast<int>(g.vertices.size()) == (n + 1) * (n + 2) / 2);
        CHECK(static_cast<int>(g.edges.size()) == n * (n + 1));
        CHECK(static_cast<int>(g.cells.size()) == n * (n + 1) / 2);
        int squares = 0, triangles = 0;
        for (const auto& [i, j] : g.cells) (i == j ? triangles : squares)++;
        CHECK(squares == n * (n - 1) / 2);
        CHECK(triangles == n);
    }
}

TEST_CASE("edge-cell incidence at n = 1 forces u_1 = v_1 = J_11") {
    const FlagGraph g = FlagGraph::build(1);
    REQUIRE(g.cells.size() == 1);
    const auto& u1 = g.edges[static_cast<std::size_t>(g.u_edge[1])];
    const auto& v1 = g.edges[static_cast<std::size_t>(g.v_edge[1])];
    CHECK(u1.left_cell == 0);
    CHECK(u1.right_cell == -1);
    CHECK(v1.left_cell == 0);
    CHECK(v1.right_cell == -1);
}

TEST_CASE("potential and gradient for n = 1") {
    const FlagGraph g = FlagGraph::build(1);
    const std::vector<int> free_vs = off_diagonal_vertices(g);
    REQUIRE(free_vs.size() == 1);
    // vertices (0,0), (1,0), (1,1); t_0 = 0, t_1 = log q
    const Cd q(0.49, 0.0), x(0.35, 0.4);
    std::vector<Cd> vals(3);
    vals[static_cast<std::size_t>(g.vertex(0, 0))] = 1.0;
    vals[static_cast<std::size_t>(g.vertex(1, 1))] = q;
    vals[static_cast<std::size_t>(g.vertex(1, 0))] = x;
    const Cd u = x, v = q / x;
    CHECK(std::abs(potential_value(g, vals) - (u + v)) < 1e-15);
    const auto grad = potential_gradient(g, vals, free_vs);
    CHECK(std::abs(grad[0] - (u - v)) < 1e-15);
}

TEST_CASE("gradient matches central finite differences") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> un(-0.6, 0.6);
    for (int n = 1; n <= 2; ++n) {
        const FlagGraph g = FlagGraph::build(n);
        const auto free_vs = off_diagonal_vertices(g);
        std::vector<Cd> vals(g.vertices.size());
        for (auto& v : vals) v = std::exp(Cd(un(rng), un(rng)));
        const auto grad = potential_gradient(g, vals, free_vs);
        const double h = 1e-6;
        for (std::size_t k = 0; k < free_vs.size(); ++k) {
            // derivative in T where exp T is the stored value
            auto shifted = [&](double eps) {
                std::vector<Cd> w = vals;
                w[static_cast<std::size_t>(free_vs[k])] *= std::exp(Cd(eps, 0));
                return potential_value(g, w);
            };
            const Cd fd = (shifted(h) - shifted(-h)) / (2.0 * h);
            CHECK(std::abs(fd - grad[k]) < 1e-7);
        }
    }
}

TEST_CASE("critical points for n = 1 at q = 0.49") {
    const auto pts = find_critical_points(1, {Cd(0.49, 0)}, 42);
    REQUIRE(pts.size() == 2);
    // u_1 = v_1 = +-0.7, F = +-1.4, p = (-+0.7, +-0.7), J_11 = +-sqrt(q)
    CHECK(std::abs(pts[0].p[0] - Cd(-0.7, 0)) < 1e-10);
    CHECK(std::abs(pts[0].p[1] - Cd(0.7, 0)) < 1e-10);
    CHECK(std::abs(pts[0].value - Cd(1.4, 0)) < 1e-10);
    CHECK(std::abs(pts[0].currents[0] - Cd(0.7, 0)) < 1e-10);
    CHECK(std::abs(pts[1].value - Cd(-1.4, 0)) < 1e-10);
    for (const auto& pt : pts) {
        CHECK(pt.grad_norm < 1e-10 * (1.0 + std::abs(pt.value)));
        CHECK(pt.current_residual < 1e-9);
    }
}

TEST_CASE("critical point counts and corollaries") {
    const std::vector<Cd> q2{Cd(0.5, 0.3), Cd(-0.2, 0.8)};
    CHECK(check_corollary1(2, q2, 11).pass);
    CHECK(check_corollary2(2, q2, 11).pass);

    const std::vector<Cd> q3{Cd(0.5, 0.3), Cd(-0.2, 0.8), Cd(1.1, -0.4)};
    const auto pts = find_critical_points(3, q3, 11);
    CHECK(pts.size() == 24);
}

TEST_CASE("weighted homogeneity: q -> t^4 q scales p by t^2") {
    const std::vector<Cd> q{Cd(0.3, 0.1)};
    const double t = 1.25;
    const std::vector<Cd> qs{q[0] * std::pow(t, 4.0)};
    auto a = find_critical_points(1, q, 3);
    auto b = find_critical_points(1, qs, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t i = 0; i < 2; ++i)
            CHECK(std::abs(a[k].p[i] * t * t - b[k].p[i]) < 1e-8);
}

TEST_CASE("deduplication is start-order independent") {
    const std::vector<Cd> q{Cd(0.4, 0.25), Cd(0.9, -0.6)};
    auto a = find_critical_points(2, q, 101);
    auto b = find_critical_points(2, q, 202);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t i = 0; i < a[k].p.size(); ++i)
            CHECK(std::abs(a[k].p[i] - b[k].p[i]) < 1e-9);
}

TEST_CASE("budget exhaustion carries the found count") {
    MirrorSettings tiny;
    tiny.starts_per_point = 1;
    tiny.max_iters = 2;
    try {
        find_critical_points(2, {Cd(0.4, 0.25), Cd(0.9, -0.6)}, 5, tiny);
        CHECK(false);
    } catch (const BudgetExhausted& e) {
        CHECK(e.found < 6);
    }
}

TEST_CASE("amplitude factorization") {
    for (int n = 1; n <= 3; ++n) {
        const CheckReport rep = amplitude_check(n);
        CHECK(rep.pass);
    }
    // n = 1 by hand: det(lambda + A) = lambda^2 + (v_1 - u_1) lambda
    Mat<MultiPoly> a(2, 2);
    a(0, 0) = -MultiPoly::variable(var_u(1)) + MultiPoly::variable(var_lambda());
    a(0, 1) = MultiPoly::variable(var_u(1)) * MultiPoly::variable(var_v(1));
    a(1, 0) = MultiPoly::constant(-1);
    a(1, 1) = MultiPoly::variable(var_v(1)) + MultiPoly::variable(var_lambda());
    const MultiPoly l = MultiPoly::variable(var_lambda());
    const MultiPoly expect =
        l * l + (MultiPoly::variable(var_v(1)) - MultiPoly::variable(var_u(1))) * l;
    CHECK(det(a) == expect);
}

TEST_CASE("hessian-jacobian ratio") {
    const CheckReport r1 = hessian_jacobian_check(1, 23);
    CHECK(r1.pass);
    // n = 1 ratio is exactly -1
    const auto c = r1.details["constant"];
    CHECK(std::abs(c[0].get<double>() + 1.0) < 1e-9);
    CHECK(std::abs(c[1].get<double>()) < 1e-9);

    const CheckReport r2 = hessian_jacobian_check(2, 23);
    CHECK(r2.pass);
    CHECK(r2.residual < 1e-6);
}
