#include "qtoda/toda.hpp"

#include "qtoda/linalg.hpp"

namespace qtoda {

namespace {

MultiPoly lambda_plus_p(int i) {
    return MultiPoly::variable(var_lambda()) + MultiPoly::variable(var_p(i));
}

Mat<MultiPoly> toda_matrix(int n) {
    Mat<MultiPoly> m(n + 1, n + 1);
    for (int i = 0; i <= n; ++i) {
        m(i, i) = lambda_plus_p(i);
        if (i < n) {
            m(i, i + 1) = MultiPoly::variable(var_q(i + 1));
            m(i + 1, i) = MultiPoly::constant(-1);
        }
    }
    return m;
}

}  // namespace

MultiPoly build_delta(int n) {
    if (n < 0 || n > 6) throw InvalidInput("build_delta: 0 <= n <= 6 required");
    MultiPoly prev2 = MultiPoly::zero();      // Delta_{-2}
    MultiPoly prev1 = MultiPoly::constant(1);  // Delta_{-1}
    for (int k = 0; k <= n; ++k) {
        MultiPoly cur = lambda_plus_p(k) * prev1;
        if (k >= 1) cur += MultiPoly::variable(var_q(k)) * prev2;
        prev2 = std::move(prev1);
        prev1 = std::move(cur);
    }
    if (n <= 4) {
        const MultiPoly by_det = det(toda_matrix(n));
        if (!(by_det == prev1))
            throw CheckFailure("build_delta: recurrence disagrees with determinant at n=" +
                               std::to_string(n));
    }
    return prev1;
}

std::vector<MultiPoly> conserved(int n) {
    const MultiPoly delta = build_delta(n);
    std::vector<MultiPoly> d;
    d.reserve(n + 1);
    for (int m = 0; m <= n; ++m) d.push_back(delta.lambda_coefficient(n - m));
    return d;
}

std::vector<DiffOp> quantized(int n) {
    std::vector<DiffOp> out;
    const auto ds = conserved(n);
    for (int m = 0; m <= n; ++m) {
        QuantizeResult qr = quantize(ds[m], n);
        if (!qr.ordering_independent)
            throw CheckFailure("quantized: D_" + std::to_string(m) +
                               " unexpectedly ordering-dependent");
        if (!(symbol(qr.op) == ds[m]))
            throw CheckFailure("quantized: symbol round trip failed for D_" + std::to_string(m));
        out.push_back(std::move(qr.op));
    }
    return out;
}

DiffOp hamiltonian(int n) {
    DiffOp h = DiffOp::zero(n);
    for (int i = 0; i <= n; ++i) {
        DiffOp di = DiffOp::h_del(n, i, 2);
        h += di.scaled(Rat(1, 2));
    }
    for (int i = 1; i <= n; ++i) {
        std::vector<int> d(n, 0);
        d[i - 1] = 1;
        h -= DiffOp::q_monomial(n, d);
    }
    return h;
}

MultiPoly hamiltonian_symbol(int n) {
    MultiPoly s;
    for (int i = 0; i <= n; ++i) s += MultiPoly::variable(var_p(i), 2).scaled(Rat(1, 2));
    for (int i = 1; i <= n; ++i) s -= MultiPoly::variable(var_q(i));
    return s;
}

CheckReport check_theorem1(int n, bool pairwise, bool poisson_check) {
    if (n < 0 || n > 6) throw InvalidInput("check_theorem1: n <= 6 required");
    Stopwatch sw;
    CheckReport rep;
    rep.check = "toda-theorem1";
    rep.paper_anchor = "Theorem 1";
    rep.pass = true;
    rep.details["n"] = n;

    const DiffOp h = hamiltonian(n);
    const auto dq = quantized(n);
    nlohmann::ordered_json residuals = nlohmann::ordered_json::array();
    for (int m = 0; m <= n; ++m) {
        const DiffOp c = commutator(h, dq[m]);
        if (!c.is_zero()) {
            rep.pass = false;
            rep.details["offending"] = "[H, D_" + std::to_string(m) + "] = " + c.to_string();
        }
        residuals.push_back(c.is_zero() ? 0 : 1);
    }
    rep.details["commutators_H"] = residuals;

    if (pairwise) {
        bool ok = true;
        for (int l = 0; l <= n && ok; ++l)
            for (int m = l + 1; m <= n && ok; ++m) {
                const DiffOp c = commutator(dq[l], dq[m]);
                if (!c.is_zero()) {
                    ok = false;
                    rep.pass = false;
                    rep.details["offending"] = "[D_" + std::to_string(l) + ", D_" +
                                               std::to_string(m) + "] = " + c.to_string();
                }
            }
        rep.details["pairwise"] = ok ? "pass" : "fail";
    }

    if (poisson_check) {
        bool ok = true;
        const auto ds = conserved(n);
        const MultiPoly hs = hamiltonian_symbol(n);
        for (int m = 0; m <= n && ok; ++m)
            if (!poisson(hs, ds[m]).is_zero()) ok = false;
        for (int l = 0; l <= n && ok; ++l)
            for (int m = l + 1; m <= n && ok; ++m)
                if (!poisson(ds[l], ds[m]).is_zero()) ok = false;
        if (!ok) rep.pass = false;
        rep.details["poisson"] = ok ? "pass" : "fail";
    }

    rep.residual = rep.pass ? 0.0 : 1.0;
    rep.runtime_ms = sw.ms();
    return rep;
}

CheckReport check_grading_and_fraction(int n) {
    if (n < 0 || n > 6) throw InvalidInput("check_grading_and_fraction: n <= 6 required");
    Stopwatch sw;
    CheckReport rep;
    rep.check = "toda-grading-fraction";
    rep.paper_anchor = "weighted grading and continued fraction";
    rep.pass = true;
    rep.details["n"] = n;

    const auto ds = conserved(n);
    const auto dq = quantized(n);
    for (int m = 0; m <= n; ++m) {
        int deg = 0;
        if (!ds[m].is_weighted_homogeneous(&deg) || deg != m + 1) {
            rep.pass = false;
            rep.details["offending"] =
                "D_" + std::to_string(m) + " not homogeneous of degree " + std::to_string(m + 1);
        }
        int qdeg = 0;
        if (!dq[m].is_weighted_homogeneous(&qdeg) || qdeg != m + 1) {
            rep.pass = false;
            rep.details["offending"] = "quantized D_" + std::to_string(m) + " not homogeneous";
        }
    }

    // Numerator of lambda + p_0 + q_1/(lambda + p_1 + q_2/(...)), cleared
    // bottom-up: N_k = (lambda + p_k) N_{k+1} + q_{k+1} N_{k+2}.
    MultiPoly above = MultiPoly::zero();      // N_{n+2}
    MultiPoly numer = MultiPoly::constant(1);  // N_{n+1}
    for (int k = n; k >= 0; --k) {
        MultiPoly cur = (MultiPoly::variable(var_lambda()) + MultiPoly::variable(var_p(k))) * numer;
        if (k + 1 <= n) cur += MultiPoly::variable(var_q(k + 1)) * above;
        above = std::move(numer);
        numer = std::move(cur);
    }
    const MultiPoly delta = build_delta(n);
    if (!(numer == delta)) {
        rep.pass = false;
        rep.details["offending"] = "continued-fraction numerator mismatch: " +
                                   (numer - delta).to_string();
    }

    // q = 0 specialization: Delta collapses to prod (lambda + p_i).
    MultiPoly at_q0 = delta;
    for (int i = 1; i <= n; ++i) at_q0 = at_q0.substitute(var_q(i), MultiPoly::zero());
    MultiPoly prod = MultiPoly::constant(1);
    for (int i = 0; i <= n; ++i) prod *= lambda_plus_p(i);
    if (!(at_q0 == prod)) {
        rep.pass = false;
        rep.details["offending"] = "q=0 specialization mismatch";
    }

    rep.residual = rep.pass ? 0.0 : 1.0;
    rep.runtime_ms = sw.ms();
    return rep;
}

}  // namespace qtoda
