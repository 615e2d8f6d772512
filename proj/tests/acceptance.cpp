// Acceptance suite: every criterion of the verification workbench runs at its
// stated tolerance and prints one pass/fail line.  Exit status 0 iff all pass.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "qtoda/cohomology.hpp"
#include "qtoda/integrals.hpp"
#include "qtoda/mirror.hpp"
#include "qtoda/series.hpp"
#include "qtoda/toda.hpp"

using namespace qtoda;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what, std::int64_t ms) {
    std::printf("[%s] criterion %2d: %s (%lld ms)\n", pass ? "PASS" : "FAIL", criterion,
                what.c_str(), static_cast<long long>(ms));
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::vector<Cd> random_q(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> logmod(std::log(0.1), std::log(2.0)),
        arg(0.0, 6.283185307179586476925286766559);
    std::vector<Cd> q;
    for (int i = 0; i < n; ++i) q.push_back(std::polar(std::exp(logmod(rng)), arg(rng)));
    return q;
}

// 1. [H, D_m] = 0 symbolically for n = 1, 2, 3; pairwise for n <= 2;
//    exact arithmetic; n = 3 under two minutes.
void criterion1() {
    Stopwatch sw;
    bool ok = true;
    std::int64_t ms3 = 0;
    for (int n = 1; n <= 3; ++n) {
        Stopwatch inner;
        const CheckReport rep = check_theorem1(n, /*pairwise=*/n <= 2, /*poisson=*/true);
        if (n == 3) ms3 = inner.ms();
        ok = ok && rep.pass && rep.residual == 0.0;
    }
    ok = ok && ms3 < 120000;
    report(1, ok, "Theorem 1 exact for n = 1, 2, 3 (pairwise for n <= 2)", sw.ms());
}

// 2. Quantum ring for n <= 2: Example 6 identities, rank (n+1)!,
//    classical limit at q = 0.
void criterion2() {
    Stopwatch sw;
    bool ok = true;
    for (int n = 1; n <= 2; ++n) {
        const CheckReport ring = check_quantum_ring(n);  // sum rule, rank, q = 0 limit
        const CheckReport ex6 = check_example6(n);       // J_i o J_j = J_i J_j + delta q_i
        ok = ok && ring.pass && ex6.pass;
        const Rat expect = rat_factorial(n + 1);
        ok = ok && Rat(QuantumRing::get(n).rank()) == expect;
    }
    report(2, ok, "quantum ring: Example 6, rank (n+1)!, classical limit (n <= 2)", sw.ms());
}

// 3. H S_A = 0 and D_m S_A = 0 exactly through q-degree 4 / 3 / 2 for
//    n = 1 / 2 / 3, all basis classes, under five minutes.
void criterion3() {
    Stopwatch sw;
    bool ok = true;
    const int orders[4] = {0, 4, 3, 2};
    for (int n = 1; n <= 3; ++n) {
        ok = ok && check_theorem3(n, orders[n]).pass;
        ok = ok && check_theorem4(n, orders[n]).pass;
    }
    ok = ok && sw.ms() < 300000;
    report(3, ok, "Theorems 3-4 exact through q-degree 4/3/2 for n = 1/2/3", sw.ms());
}

// 4. Mirror critical points at 5 random q with |q_i| in [0.1, 2]:
//    exactly (n+1)! points, Corollary 1 and 2 residuals, fiber multisets.
void criterion4() {
    Stopwatch sw;
    bool ok = true;
    std::mt19937_64 rng(4242);
    for (int n = 1; n <= 3 && ok; ++n) {
        for (int rep_i = 0; rep_i < 5 && ok; ++rep_i) {
            const auto q = random_q(n, rng);
            try {
                const CheckReport c1 = check_corollary1(n, q, 77 + rep_i);
                const CheckReport c2 = check_corollary2(n, q, 77 + rep_i);
                ok = c1.pass && c2.pass;
            } catch (const std::exception& e) {
                std::printf("            criterion 4 exception at n=%d: %s\n", n, e.what());
                ok = false;
            }
        }
    }
    report(4, ok, "mirror critical points + Corollaries 1-2 (5 random q, n = 1, 2, 3)", sw.ms());
}

// 5. A = UV, B = VU, det(lambda + A) = det(lambda + B) = Delta, symbolically.
void criterion5() {
    Stopwatch sw;
    bool ok = true;
    for (int n = 1; n <= 3; ++n) ok = ok && amplitude_check(n).pass;
    report(5, ok, "amplitude factorization identities for n <= 3 (symbolic u, v)", sw.ms());
}

// 6. Residue pairing reproduces the exact pairing at 3 random q, n <= 2.
void criterion6() {
    Stopwatch sw;
    bool ok = true;
    for (int n = 1; n <= 2; ++n) {
        const CheckReport rep = check_residue_pairing(n, 3, 8888);
        ok = ok && rep.pass && rep.residual < 1e-8;
    }
    report(6, ok, "residue pairing matches the exact pairing to 1e-8 (n <= 2)", sw.ms());
}

// 7. n = 1 torus integral equals the Bessel sum to 1e-10 (grid 256, < 1 s);
//    n = 2 span fit residual < 1e-6 at |q| = 0.1, grid 64, order 5 (< 2 min).
void criterion7() {
    Stopwatch sw;
    Stopwatch bessel_sw;
    const Cd val = torus_integral(1, {Cd(0.3, 0)}, Cd(1, 0), {std::sqrt(0.3)}, 256);
    const Cd want = bessel_reference(Cd(0.3, 0), Cd(1, 0), 60);
    const std::int64_t bessel_ms = bessel_sw.ms();
    bool ok = std::abs(val - want) < 1e-10 && bessel_ms < 1000;

    Stopwatch span_sw;
    const CheckReport fit = span_fit(2, 5, 12, 1234, 64);
    ok = ok && fit.pass && fit.residual < 1e-6 && span_sw.ms() < 120000;
    report(7, ok, "mirror integral identities (Bessel at 1e-10; n = 2 span fit < 1e-6)", sw.ms());
}

// 8. Hessian/Jacobian ratio spread < 1e-6 across all critical points for
//    n = 1, 2 at 3 random q; the constant is reported.
void criterion8() {
    Stopwatch sw;
    bool ok = true;
    std::string constants;
    for (int n = 1; n <= 2; ++n) {
        const CheckReport rep = hessian_jacobian_check(n, 99, 3);
        ok = ok && rep.pass && rep.residual < 1e-6;
        constants += (n == 1 ? "n=1: " : "; n=2: ") + rep.details["constant"].dump();
    }
    report(8, ok, "Hessian/Jacobian ratio constant across points (" + constants + ")", sw.ms());
}

// 9. Saddle asymptotics: ratio within 1% at hbar = 1/32, q = 0.25,
//    deviation linear in hbar within a factor 2.
void criterion9() {
    Stopwatch sw;
    const CheckReport rep =
        saddle_check(0.25, {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125}, 512);
    const bool ok = rep.pass && rep.residual < 0.01;
    report(9, ok, "stationary-phase ratio within 1% at hbar = 1/32 (slope " +
                      rep.details["slope"].dump() + ")",
           sw.ms());
}

// 10. (h q d/dq)^N s = q s exactly through order 5 for N <= 4.
void criterion10() {
    Stopwatch sw;
    bool ok = true;
    for (int N = 1; N <= 4; ++N) ok = ok && check_projective_series(N, 5).pass;
    report(10, ok, "projective-space equation exact through order 5 for N <= 4", sw.ms());
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    using Fn = void (*)();
    const Fn criteria[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                           criterion6, criterion7, criterion8, criterion9, criterion10};
    for (int i = 0; i < 10; ++i) {
        if (only != 0 && only != i + 1) continue;
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            report(i + 1, false, std::string("exception: ") + e.what(), 0);
        }
    }
    if (failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", failures);
    return 1;
}
