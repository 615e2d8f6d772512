#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "qtoda/linalg.hpp"
#include "qtoda/multipoly.hpp"
#include "qtoda/report.hpp"

namespace qtoda {

// Triangular lattice with vertices (i,j), 0 <= j <= i <= n, vertical edges
// (i-1,j)->(i,j) and horizontal edges (i,j)->(i,j+1); u_i, v_i are the edges
// next to the diagonal.  Cells (i,j), 1 <= j <= i <= n, are the unit squares
// (j < i) and the diagonal triangles (j = i), clockwise oriented.
struct FlagGraph {
    struct Edge {
        int src, dst;       // vertex indices
        bool vertical;
        int left_cell;      // cell on the left of the directed edge, -1 = outer
        int right_cell;
    };

    int n = 0;
    std::vector<std::pair<int, int>> vertices;
    std::map<std::pair<int, int>, int> vertex_index;
    std::vector<Edge> edges;
    std::vector<int> u_edge, v_edge;  // 1-based, entry 0 unused
    std::vector<std::pair<int, int>> cells;
    std::map<std::pair<int, int>, int> cell_index;

    static FlagGraph build(int n);

    int vertex(int i, int j) const { return vertex_index.at({i, j}); }
    bool is_diagonal(int vid) const {
        return vertices[static_cast<std::size_t>(vid)].first ==
               vertices[static_cast<std::size_t>(vid)].second;
    }
};

struct CritPoint {
    std::vector<Cd> vertex_values;  // exp T per vertex (diagonal ones fixed by q)
    std::vector<Cd> edge_values;    // Q per edge
    std::vector<Cd> p;              // momenta p_0..p_n
    Cd value;                       // critical value of F
    std::vector<Cd> currents;       // J per cell
    double grad_norm = 0;
    double current_residual = 0;
};

struct MirrorSettings {
    int starts_per_point = 200;
    int max_iters = 100;
    double band = 6.0;  // moduli of exp T drawn log-uniformly within band around the
                        // |q|^(1/2)-homogeneous scale
    double grad_tol = 1e-11;
};

// Total potential F = sum of edge values and its gradient/Hessian over the
// off-diagonal vertices, all evaluated on exp-T coordinates.
Cd potential_value(const FlagGraph& g, const std::vector<Cd>& vertex_values);
std::vector<Cd> potential_gradient(const FlagGraph& g, const std::vector<Cd>& vertex_values,
                                   const std::vector<int>& free_vertices);
Mat<Cd> potential_hessian(const FlagGraph& g, const std::vector<Cd>& vertex_values,
                          const std::vector<int>& free_vertices);

std::vector<int> off_diagonal_vertices(const FlagGraph& g);
// exp(t_i) values from q, in the t_0 = 0 gauge.
std::vector<Cd> diagonal_values(int n, const std::vector<Cd>& q);

// Multi-start damped Newton on the gradient system; deduplicates on edge
// values at relative 1e-8; throws BudgetExhausted when fewer than (n+1)!
// points are found within the budget.
std::vector<CritPoint> find_critical_points(int n, const std::vector<Cd>& q, std::uint64_t seed,
                                            const MirrorSettings& settings = MirrorSettings());

// p-vectors lie on the characteristic variety and match the multiplication
// eigenvalues (Stickelberger) fiber.
CheckReport check_corollary1(int n, const std::vector<Cd>& q, std::uint64_t seed);
// F = sum (2i - n) p_i = 2 sum J_ii with currents from the cell rule.
CheckReport check_corollary2(int n, const std::vector<Cd>& q, std::uint64_t seed);
// A = U V, B = V U, det(lambda + A) = det(lambda + B) = Delta, in formal u, v.
CheckReport amplitude_check(int n);
// det(dD_i/dp_j) / det Hess F is constant across the critical points.
CheckReport hessian_jacobian_check(int n, std::uint64_t seed, int q_samples = 3);

}  // namespace qtoda
