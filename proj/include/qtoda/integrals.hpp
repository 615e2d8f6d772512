#pragma once

#include <cstdint>
#include <vector>

#include "qtoda/report.hpp"
#include "qtoda/series.hpp"

namespace qtoda {

using Cd = std::complex<double>;

// Default torus radii |exp T_{ij}|: geometric mean of the diagonal boundary
// moduli, matching the |q|^(1/2) weighted homogeneity.
std::vector<double> default_radii(int n, const std::vector<Cd>& q);

// (2 pi i)^{-dim} integral of e^{F_q/hbar} over the compact torus
// {|exp T_{ij}| = r_{ij}} by the iterated trapezoid rule with deterministic
// pairwise summation; exponentially convergent in the grid size.
Cd torus_integral(int n, const std::vector<Cd>& q, Cd hbar, const std::vector<double>& radii,
                  int grid);

// Partial sum of sum_d q^d / (d!^2 hbar^{2d}).
Cd bessel_reference(Cd q, Cd hbar, int terms);

// Evaluate a scalar solution series at numeric (q, hbar) in the t_0 = 0 gauge.
Cd eval_qseries(const QSeries& s, const std::vector<Cd>& q, Cd hbar);

// Least-squares fit of the torus integral against the basis series at
// sample points (q, hbar); reports the fitted class and the relative residual.
CheckReport span_fit(int n, int order, int samples, std::uint64_t seed, int grid,
                     double qmod = 0.1);

// n = 1 stationary-phase asymptotics against the one-saddle approximation.
CheckReport saddle_check(double q, const std::vector<double>& hbars, int grid);

}  // namespace qtoda
