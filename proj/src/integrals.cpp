#include "qtoda/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "qtoda/mirror.hpp"

namespace qtoda {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Deterministic pairwise reduction over a function of the flat grid index.
Cd pairwise_sum(std::size_t begin, std::size_t end, const std::function<Cd(std::size_t)>& f) {
    const std::size_t len = end - begin;
    if (len == 0) return 0;
    if (len <= 8) {
        Cd acc = 0;
        for (std::size_t i = begin; i < end; ++i) acc += f(i);
        return acc;
    }
    const std::size_t mid = begin + len / 2;
    return pairwise_sum(begin, mid, f) + pairwise_sum(mid, end, f);
}

}  // namespace

std::vector<double> default_radii(int n, const std::vector<Cd>& q) {
    const FlagGraph g = FlagGraph::build(n);
    const std::vector<Cd> diag = diagonal_values(n, q);
    std::vector<double> radii;
    for (int v : off_diagonal_vertices(g)) {
        const auto [i, j] = g.vertices[static_cast<std::size_t>(v)];
        radii.push_back(std::sqrt(std::abs(diag[static_cast<std::size_t>(i)]) *
                                  std::abs(diag[static_cast<std::size_t>(j)])));
    }
    return radii;
}

Cd torus_integral(int n, const std::vector<Cd>& q, Cd hbar, const std::vector<double>& radii,
                  int grid) {
    if (n < 1 || n > 2) throw InvalidInput("torus_integral: 1 <= n <= 2 required");
    if (grid < 16) throw InvalidInput("torus_integral: grid >= 16 required");
    for (const Cd& qi : q)
        if (std::abs(qi) == 0.0) throw InvalidInput("torus_integral: q_i != 0 required");

    const FlagGraph g = FlagGraph::build(n);
    const std::vector<int> free_vs = off_diagonal_vertices(g);
    const std::size_t dim = free_vs.size();
    if (radii.size() != dim) throw InvalidInput("torus_integral: expected one radius per torus direction");

    const std::vector<Cd> diag = diagonal_values(n, q);
    std::vector<Cd> vals(g.vertices.size());
    for (std::size_t v = 0; v < g.vertices.size(); ++v) {
        const auto [i, j] = g.vertices[v];
        if (i == j) vals[v] = diag[static_cast<std::size_t>(i)];
    }

    std::size_t total = 1;
    for (std::size_t k = 0; k < dim; ++k) total *= static_cast<std::size_t>(grid);

    // precomputed unit circle
    std::vector<Cd> circle(static_cast<std::size_t>(grid));
    for (int k = 0; k < grid; ++k) circle[static_cast<std::size_t>(k)] = std::polar(1.0, kTwoPi * k / grid);

    std::vector<Cd> point_vals = vals;
    auto evaluate = [&](std::size_t flat) -> Cd {
        std::size_t rest = flat;
        for (std::size_t k = 0; k < dim; ++k) {
            const std::size_t idx = rest % static_cast<std::size_t>(grid);
            rest /= static_cast<std::size_t>(grid);
            point_vals[static_cast<std::size_t>(free_vs[k])] = radii[k] * circle[idx];
        }
        Cd f = 0;
        for (const auto& e : g.edges)
            f += point_vals[static_cast<std::size_t>(e.dst)] /
                 point_vals[static_cast<std::size_t>(e.src)];
        const Cd val = std::exp(f / hbar);
        if (!std::isfinite(val.real()) || !std::isfinite(val.imag()))
            throw CheckFailure("torus_integral: non-finite integrand value");
        return val;
    };

    const Cd sum = pairwise_sum(0, total, evaluate);
    return sum / static_cast<double>(total);
}

Cd bessel_reference(Cd q, Cd hbar, int terms) {
    if (terms < 0 || terms > 60) throw InvalidInput("bessel_reference: 0 <= terms <= 60 required");
    Cd acc = 0, term = 1;
    for (int d = 0; d <= terms; ++d) {
        if (d > 0) term *= q / (static_cast<double>(d) * static_cast<double>(d) * hbar * hbar);
        acc += term;
    }
    return acc;
}

Cd eval_qseries(const QSeries& s, const std::vector<Cd>& q, Cd hbar) {
    // t_0 = 0 gauge, t_i = sum_{k <= i} log q_k with the principal branch
    std::vector<Cd> t(static_cast<std::size_t>(s.n() + 1), Cd(0, 0));
    for (int i = 1; i <= s.n(); ++i)
        t[static_cast<std::size_t>(i)] =
            t[static_cast<std::size_t>(i - 1)] + std::log(q[static_cast<std::size_t>(i - 1)]);
    Cd acc = 0;
    for (const auto& [d, f] : s.coeffs()) {
        Cd qpow = 1;
        for (std::size_t i = 0; i < d.size(); ++i)
            for (int k = 0; k < d[i]; ++k) qpow *= q[i];
        Cd coeff = 0;
        for (const auto& [mono, lh] : f) {
            Cd tpow = lh.eval(hbar);
            for (std::size_t i = 0; i < mono.size(); ++i)
                for (int k = 0; k < mono[i]; ++k) tpow *= t[i];
            coeff += tpow;
        }
        acc += qpow * coeff;
    }
    return acc;
}

CheckReport span_fit(int n, int order, int samples, std::uint64_t seed, int grid, double qmod) {
    if (n < 1 || n > 2) throw InvalidInput("span_fit: 1 <= n <= 2 required");
    Stopwatch sw;
    CheckReport rep;
    rep.check = "integral-span-fit";
    rep.paper_anchor = "Corollary (6) of Theorem 4";
    rep.pass = true;
    rep.seed = seed;
    rep.details["n"] = n;
    rep.details["order"] = order;
    rep.details["grid"] = grid;

    const SolutionData data = compute_s(n, order);
    const std::vector<QSeries> series = assemble_all(data);
    const std::size_t nb = series.size();
    const int want = std::max(samples, static_cast<int>(2 * nb));
    rep.details["samples"] = want;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> arg(0.0, kTwoPi), hb(0.85, 1.2);

    Mat<Cd> a(static_cast<std::size_t>(want), nb);
    std::vector<Cd> b(static_cast<std::size_t>(want));
    for (int s = 0; s < want; ++s) {
        std::vector<Cd> q;
        for (int i = 0; i < n; ++i) q.push_back(std::polar(qmod, arg(rng)));
        const Cd hbar(hb(rng), 0.0);
        b[static_cast<std::size_t>(s)] = torus_integral(n, q, hbar, default_radii(n, q), grid);
        for (std::size_t k = 0; k < nb; ++k)
            a(static_cast<std::size_t>(s), k) = eval_qseries(series[k], q, hbar);
    }
    const LstSqResult ls = lstsq_complex(a, b);
    double bnorm = 0;
    for (const Cd& v : b) bnorm += std::norm(v);
    bnorm = std::sqrt(bnorm);
    const double rel = ls.residual / std::max(1e-300, bnorm);

    rep.residual = rel;
    rep.pass = rel < 1e-6;
    if (ls.condition > 1e8) {
        rep.pass = false;
        rep.details["offending"] =
            "ill-conditioned fit (condition " + std::to_string(ls.condition) +
            "); use more samples or smaller |q|";
    }
    rep.details["condition"] = ls.condition;
    nlohmann::ordered_json cj = nlohmann::ordered_json::array();
    for (const Cd& c : ls.x) cj.push_back(complex_to_json(c));
    rep.details["fitted_class"] = cj;
    rep.runtime_ms = sw.ms();
    return rep;
}

CheckReport saddle_check(double q, const std::vector<double>& hbars, int grid) {
    if (q <= 0) throw InvalidInput("saddle_check: q > 0 required");
    Stopwatch sw;
    CheckReport rep;
    rep.check = "integral-saddle";
    rep.paper_anchor = "stationary phase asymptotics";
    rep.pass = true;
    rep.details["q"] = q;

    const double root = std::sqrt(q);
    std::vector<double> devs;
    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    for (double h : hbars) {
        const Cd val = torus_integral(1, {Cd(q, 0)}, Cd(h, 0), {root}, grid);
        // leading one-saddle approximation through the positive critical point
        const double approx = std::exp(2.0 * root / h) * std::sqrt(h / (kTwoPi * 2.0 * root));
        const double ratio = val.real() / approx;
        const double dev = std::abs(ratio - 1.0);
        devs.push_back(dev);
        nlohmann::ordered_json row;
        row["hbar"] = h;
        row["ratio"] = ratio;
        row["deviation"] = dev;
        table.push_back(row);
    }
    rep.details["table"] = table;

    const double final_dev = devs.back();
    rep.residual = final_dev;
    if (final_dev >= 0.01) {
        rep.pass = false;
        rep.details["offending"] = "final deviation above 1%";
    }

    // log-log slope of deviation vs hbar should be linear within a factor 2
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const std::size_t m = devs.size();
    for (std::size_t i = 0; i < m; ++i) {
        const double x = std::log(hbars[i]), y = std::log(std::max(devs[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (static_cast<double>(m) * sxy - sx * sy) /
                         (static_cast<double>(m) * sxx - sx * sx);
    rep.details["slope"] = slope;
    if (!(slope > 0.5 && slope < 2.0)) {
        rep.pass = false;
        rep.details["offending"] = "deviation slope outside [1/2, 2]";
    }
    // deviations must shrink monotonically along the decreasing hbar sequence
    for (std::size_t i = 0; i + 1 < m; ++i)
        if (devs[i + 1] >= devs[i]) {
            rep.pass = false;
            rep.details["offending"] = "non-monotone deviation";
        }
    rep.runtime_ms = sw.ms();
    return rep;
}

}  // namespace qtoda
