// qtoda: verification workbench for the quantum Toda lattice, the quantum
// cohomology of complete flag manifolds, and the triangular-lattice mirror
// family.  Every subcommand emits a JSON (or CSV) report; verify-all runs
// the whole battery at desk scale.

#include <CLI11.hpp>
#include <json.hpp>

#include <complex>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "qtoda/cohomology.hpp"
#include "qtoda/integrals.hpp"
#include "qtoda/mirror.hpp"
#include "qtoda/series.hpp"
#include "qtoda/toda.hpp"
#include "qtoda/weyl.hpp"

using namespace qtoda;
using nlohmann::ordered_json;

namespace {

struct Options {
    int n = 1;
    std::string q;
    double hbar = 1.0;
    int order = 3;
    int grid = 64;
    std::uint64_t seed = 20121;
    std::string format = "json";
    std::string profile = "quick";
    std::string config;
};

// "re+imi" complex literals: 0.5+0.3i, -1, 0.2i, -i
Cd parse_complex(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw InvalidInput("empty complex literal");
    std::size_t split = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    auto parse_part = [](std::string part, bool imag_unit) -> double {
        if (imag_unit) {
            if (part.empty() || part == "+") return 1.0;
            if (part == "-") return -1.0;
        }
        return std::stod(part);
    };
    try {
        if (s.back() == 'i') {
            std::string body = s.substr(0, s.size() - 1);
            if (split == std::string::npos) return {0.0, parse_part(body, true)};
            return {std::stod(s.substr(0, split)), parse_part(body.substr(split), true)};
        }
        if (split != std::string::npos && s.find('i') != std::string::npos)
            throw InvalidInput("bad complex literal: " + text);
        return {std::stod(s), 0.0};
    } catch (const std::exception&) {
        throw InvalidInput("bad complex literal: " + text);
    }
}

std::vector<Cd> parse_complex_list(const std::string& text, int expect = -1) {
    std::vector<Cd> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_complex(item));
    if (expect >= 0 && static_cast<int>(out.size()) != expect)
        throw InvalidInput("expected " + std::to_string(expect) + " comma-separated values");
    return out;
}

std::vector<Cd> q_values(const Options& opt) {
    if (opt.q.empty()) {
        std::vector<Cd> q;
        for (int i = 1; i <= opt.n; ++i) q.emplace_back(0.31 + 0.07 * i, 0.11 + 0.05 * i);
        return q;
    }
    return parse_complex_list(opt.q, opt.n);
}

void load_config(Options& opt) {
    if (opt.config.empty()) return;
    std::ifstream in(opt.config);
    if (!in) throw InvalidInput("cannot open config file " + opt.config);
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key == "n")
            opt.n = std::stoi(value);
        else if (key == "q")
            opt.q = value;
        else if (key == "hbar")
            opt.hbar = std::stod(value);
        else if (key == "order")
            opt.order = std::stoi(value);
        else if (key == "grid")
            opt.grid = std::stoi(value);
        else if (key == "seed")
            opt.seed = std::stoull(value);
        else if (key == "format")
            opt.format = value;
        else if (key == "profile")
            opt.profile = value;
        else
            throw InvalidInput("unknown config key '" + key + "'");
    }
}

void emit(const Options& opt, const ordered_json& j) {
    if (opt.format == "csv") {
        std::cout << "check,paper_anchor,status,residual,runtime_ms,seed\n";
        auto row = [](const ordered_json& r) {
            std::cout << r.value("check", "") << "," << r.value("paper_anchor", "") << ","
                      << r.value("status", "") << "," << r.value("residual", 0.0) << ","
                      << r.value("runtime_ms", 0) << "," << r.value("seed", 0) << "\n";
        };
        if (j.contains("sections"))
            for (const auto& r : j["sections"]) row(r);
        else
            row(j);
        return;
    }
    std::cout << j.dump(2) << "\n";
}

bool all_pass(const std::vector<CheckReport>& reps) {
    for (const auto& r : reps)
        if (!r.pass) return false;
    return true;
}

ordered_json merge_section(const std::string& name, const std::vector<CheckReport>& reps) {
    ordered_json j;
    j["check"] = name;
    j["paper_anchor"] = reps.empty() ? "" : reps.front().paper_anchor;
    j["status"] = all_pass(reps) ? "pass" : "fail";
    double worst = 0;
    std::int64_t ms = 0;
    std::uint64_t seed = 0;
    ordered_json parts = ordered_json::array();
    for (const auto& r : reps) {
        worst = std::max(worst, r.residual);
        ms += r.runtime_ms;
        seed = r.seed != 0 ? r.seed : seed;
        parts.push_back(r.to_json());
    }
    j["residual"] = worst;
    j["runtime_ms"] = ms;
    j["seed"] = seed;
    j["parts"] = parts;
    return j;
}

std::vector<Cd> seeded_q(int n, std::uint64_t seed, double lo = 0.1, double hi = 2.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> logmod(std::log(lo), std::log(hi)),
        arg(0.0, 6.283185307179586476925286766559);
    std::vector<Cd> q;
    for (int i = 0; i < n; ++i) q.push_back(std::polar(std::exp(logmod(rng)), arg(rng)));
    return q;
}

int run_verify_all(const Options& opt) {
    ordered_json summary;
    summary["profile"] = opt.profile;
    summary["seed"] = opt.seed;
    ordered_json sections = ordered_json::array();
    bool ok = true;
    const bool full = opt.profile == "full";
    if (!full && opt.profile != "quick") throw InvalidInput("profile must be quick or full");

    auto push = [&](const std::string& name, const std::vector<CheckReport>& reps) {
        ordered_json sec = merge_section(name, reps);
        ok = ok && sec["status"] == "pass";
        sections.push_back(std::move(sec));
    };

    {
        std::vector<CheckReport> reps;
        for (int n = 1; n <= (full ? 3 : 2); ++n)
            reps.push_back(check_theorem1(n, /*pairwise=*/n <= 2, /*poisson=*/true));
        for (int n = 1; n <= (full ? 6 : 4); ++n) reps.push_back(check_grading_and_fraction(n));
        push("toda-theorem1", reps);
    }
    {
        std::vector<CheckReport> reps;
        for (int n = 1; n <= 2; ++n) {
            reps.push_back(check_quantum_ring(n));
            reps.push_back(check_example6(n));
        }
        push("quantum-ring", reps);
    }
    {
        std::vector<CheckReport> reps;
        for (int n = 1; n <= 2; ++n) reps.push_back(check_theorem3(n, 3));
        if (full) reps.push_back(check_theorem3(3, 2));
        push("theorem3", reps);
    }
    {
        std::vector<CheckReport> reps;
        for (int n = 1; n <= 2; ++n) reps.push_back(check_theorem4(n, 3));
        if (full) reps.push_back(check_theorem4(3, 2));
        push("theorem4", reps);
    }
    {
        std::vector<CheckReport> reps;
        for (int n = 1; n <= (full ? 3 : 2); ++n) {
            const auto q = seeded_q(n, opt.seed + static_cast<std::uint64_t>(n));
            reps.push_back(check_corollary1(n, q, opt.seed));
            reps.push_back(check_corollary2(n, q, opt.seed));
        }
        push("mirror-critical", reps);
    }
    {
        Stopwatch sw;
        CheckReport rep;
        rep.check = "integral-bessel";
        rep.paper_anchor = "mirror integral, projective-space series";
        const Cd val = torus_integral(1, {Cd(0.3, 0)}, Cd(1, 0), {std::sqrt(0.3)}, 256);
        const Cd want = bessel_reference(Cd(0.3, 0), Cd(1, 0), 60);
        rep.residual = std::abs(val - want);
        rep.pass = rep.residual < 1e-10;
        rep.details["value"] = complex_to_json(val);
        rep.runtime_ms = sw.ms();
        push("mirror-integral-bessel", {rep});
    }
    {
        std::vector<CheckReport> reps;
        for (int n = 1; n <= 3; ++n) reps.push_back(amplitude_check(n));
        push("amplitude-factorization", reps);
    }
    if (full) {
        {
            std::vector<CheckReport> reps;
            for (int n = 1; n <= 2; ++n) reps.push_back(hessian_jacobian_check(n, opt.seed));
            push("hessian-jacobian", reps);
        }
        {
            std::vector<CheckReport> reps;
            reps.push_back(span_fit(1, 6, 6, opt.seed, 256));
            reps.push_back(span_fit(2, 5, 12, opt.seed, 64));
            push("span-fit", reps);
        }
        {
            std::vector<CheckReport> reps;
            for (int n = 1; n <= 2; ++n) reps.push_back(check_residue_pairing(n, 3, opt.seed));
            push("residue-check", reps);
        }
        {
            std::vector<CheckReport> reps;
            for (int n = 1; n <= 2; ++n) reps.push_back(check_kim_rank(n, 6));
            push("kim-rank", reps);
        }
        {
            std::vector<CheckReport> reps;
            for (int N = 1; N <= 4; ++N) reps.push_back(check_projective_series(N, 5));
            push("cpn-ode", reps);
        }
        {
            std::vector<CheckReport> reps;
            reps.push_back(saddle_check(0.25, {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125}, 512));
            push("saddle", reps);
        }
    }

    summary["sections"] = sections;
    summary["status"] = ok ? "pass" : "fail";
    emit(opt, summary);
    return ok ? 0 : 1;
}

void require_symbolic_budget(int n) {
    if (n < 0 || n > 3)
        throw InvalidInput("n = " + std::to_string(n) + " outside the symbolic budget (n <= 3)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum Toda / flag quantum cohomology / mirror workbench"};
    app.require_subcommand(1);
    Options opt;
    app.add_option("--config", opt.config, "key=value config file presetting defaults");
    app.add_option("--format", opt.format, "json or csv")->capture_default_str();

    auto* toda = app.add_subcommand("toda", "conserved quantities and commutators");
    auto* toda_delta = toda->add_subcommand("delta", "characteristic polynomial");
    auto* toda_check = toda->add_subcommand("check", "Theorem 1 plus grading checks");
    bool flag_pairwise = true, flag_poisson = true;
    int toda_cap = 3;
    toda_delta->add_option("--n", opt.n, "sites minus one");
    toda_check->add_option("--n", opt.n, "sites minus one");
    toda_check->add_option("--cap", toda_cap, "raise the default n <= 3 commutator budget");
    toda_check->add_flag("--pairwise,!--no-pairwise", flag_pairwise, "pairwise commutators");
    toda_check->add_flag("--poisson,!--no-poisson", flag_poisson, "classical brackets");

    auto* qh = app.add_subcommand("qh", "quantum cohomology ring");
    auto* qh_ring = qh->add_subcommand("ring", "basis and verification");
    auto* qh_product = qh->add_subcommand("product", "quantum product of two classes");
    auto* qh_fiber = qh->add_subcommand("fiber", "multiplication-operator fiber at numeric q");
    auto* qh_residue = qh->add_subcommand("residue-check", "residue pairing vs exact pairing");
    std::string expr_a = "J_1", expr_b = "J_1";
    int samples = 3;
    for (auto* sub : {qh_ring, qh_product, qh_fiber, qh_residue}) sub->add_option("--n", opt.n);
    qh_product->add_option("--a", expr_a, "first class, e.g. 'p_1*p_2 + q_1'");
    qh_product->add_option("--b", expr_b, "second class");
    qh_fiber->add_option("--q", opt.q, "comma-separated complex values");
    qh_fiber->add_option("--seed", opt.seed);
    qh_residue->add_option("--samples", samples);
    qh_residue->add_option("--seed", opt.seed);

    auto* mirror = app.add_subcommand("mirror", "triangular-lattice mirror family");
    auto* mirror_crit = mirror->add_subcommand("crit", "critical points of the potential");
    auto* mirror_check = mirror->add_subcommand("check", "Corollaries 1 and 2");
    auto* mirror_amp = mirror->add_subcommand("amplitude", "Theorem 2 factorization");
    bool mirror_all = false;
    for (auto* sub : {mirror_crit, mirror_check, mirror_amp}) sub->add_option("--n", opt.n);
    mirror_crit->add_option("--q", opt.q);
    mirror_crit->add_option("--seed", opt.seed);
    mirror_check->add_option("--q", opt.q);
    mirror_check->add_option("--seed", opt.seed);
    mirror_check->add_flag("--all", mirror_all, "include the Hessian/Jacobian ratio");

    auto* series = app.add_subcommand("series", "quantum cohomology solution series");
    auto* series_compute = series->add_subcommand("compute", "solution coefficients");
    auto* series_cpn = series->add_subcommand("cpn", "projective-space series equation");
    std::string series_check;
    int bigN = 2;
    series_compute->add_option("--n", opt.n);
    series_compute->add_option("--order", opt.order);
    series_compute->add_option("--check", series_check, "thm3, thm4, kim or example6");
    series_cpn->add_option("--N", bigN, "projective space dimension parameter");
    series_cpn->add_option("--order", opt.order);

    auto* integral = app.add_subcommand("integral", "mirror integrals");
    auto* int_torus = integral->add_subcommand("torus", "compact-torus integral");
    auto* int_span = integral->add_subcommand("span-fit", "fit integral against the series");
    auto* int_saddle = integral->add_subcommand("saddle", "stationary-phase asymptotics");
    std::string radii_text;
    double saddle_q = 0.25;
    int_torus->add_option("--n", opt.n);
    int_torus->add_option("--q", opt.q);
    int_torus->add_option("--hbar", opt.hbar);
    int_torus->add_option("--grid", opt.grid);
    int_torus->add_option("--radii", radii_text, "comma-separated radii");
    int_span->add_option("--n", opt.n);
    int_span->add_option("--order", opt.order);
    int_span->add_option("--samples", samples);
    int_span->add_option("--seed", opt.seed);
    int_span->add_option("--grid", opt.grid);
    int_saddle->add_option("--q", saddle_q);
    int_saddle->add_option("--grid", opt.grid);

    auto* verify = app.add_subcommand("verify-all", "run every check at desk scale");
    bool n_given = false;
    verify->add_option("--profile", opt.profile, "quick or full");
    verify->add_option("--seed", opt.seed);
    verify->add_option("--n", opt.n, "symbolic ceiling (validated against the n <= 3 budget)")
        ->each([&](const std::string&) { n_given = true; });

    // global options (--format, --config) may appear after a subcommand
    for (auto* group : app.get_subcommands({})) {
        group->fallthrough();
        for (auto* sub : group->get_subcommands({})) sub->fallthrough();
    }

    CLI11_PARSE(app, argc, argv);

    try {
        load_config(opt);

        if (toda_delta->parsed()) {
            ordered_json j;
            j["check"] = "toda-delta";
            j["n"] = opt.n;
            j["delta"] = build_delta(opt.n).to_string();
            ordered_json ds = ordered_json::array();
            for (const auto& d : conserved(opt.n)) ds.push_back(d.to_string());
            j["conserved"] = ds;
            emit(opt, j);
            return 0;
        }
        if (toda_check->parsed()) {
            if (opt.n > std::min(toda_cap, 6))
                throw InvalidInput("n = " + std::to_string(opt.n) +
                                   " outside the commutator budget (n <= " +
                                   std::to_string(std::min(toda_cap, 6)) +
                                   "; raise with --cap up to 6)");
            std::vector<CheckReport> reps{check_theorem1(opt.n, flag_pairwise, flag_poisson),
                                          check_grading_and_fraction(opt.n)};
            emit(opt, merge_section("toda-check", reps));
            return all_pass(reps) ? 0 : 1;
        }
        if (qh_ring->parsed()) {
            const FlagRing& ring = FlagRing::get(opt.n);
            ordered_json j;
            j["check"] = "qh-ring";
            j["n"] = opt.n;
            j["rank"] = ring.rank();
            j["graded_dims"] = ring.graded_dims();
            ordered_json basis = ordered_json::array();
            for (const auto& b : ring.basis()) basis.push_back(basis_label(b));
            j["basis"] = basis;
            bool ok = true;
            if (opt.n <= 3) {
                const CheckReport qrep = check_quantum_ring(opt.n);
                j["quantum"] = qrep.to_json();
                ok = qrep.pass;
            } else {
                j["quantum"] = "classical only (quantum table capped at n <= 3)";
            }
            emit(opt, j);
            return ok ? 0 : 1;
        }
        if (qh_product->parsed()) {
            const QuantumRing& ring = QuantumRing::get(opt.n);
            const MultiPoly a = poly_parse(expr_a), b = poly_parse(expr_b);
            const ClassPolyQ prod = ring.quantum_product(a, b);
            ordered_json j;
            j["check"] = "qh-product";
            j["n"] = opt.n;
            j["a"] = a.to_string();
            j["b"] = b.to_string();
            ordered_json coords;
            for (std::size_t k = 0; k < prod.size(); ++k)
                if (!prod[k].is_zero())
                    coords[basis_label(ring.classical().basis()[k])] = prod[k].to_string();
            j["product"] = coords;
            emit(opt, j);
            return 0;
        }
        if (qh_fiber->parsed()) {
            const auto q = q_values(opt);
            const auto pts = QuantumRing::get(opt.n).fiber_points(q, opt.seed);
            ordered_json j;
            j["check"] = "qh-fiber";
            j["n"] = opt.n;
            j["count"] = pts.size();
            ordered_json points = ordered_json::array();
            for (const auto& pt : pts) {
                ordered_json pj;
                ordered_json pv = ordered_json::array();
                for (const Cd& x : pt.p) pv.push_back(complex_to_json(x));
                pj["p"] = pv;
                pj["residual"] = pt.residual;
                points.push_back(pj);
            }
            j["points"] = points;
            emit(opt, j);
            return 0;
        }
        if (qh_residue->parsed()) {
            const CheckReport rep = check_residue_pairing(opt.n, samples, opt.seed);
            emit(opt, rep.to_json());
            return rep.pass ? 0 : 1;
        }
        if (mirror_crit->parsed()) {
            const auto q = q_values(opt);
            const auto pts = find_critical_points(opt.n, q, opt.seed);
            ordered_json j;
            j["check"] = "mirror-crit";
            j["n"] = opt.n;
            j["count"] = pts.size();
            ordered_json points = ordered_json::array();
            for (const auto& pt : pts) {
                ordered_json pj;
                ordered_json pv = ordered_json::array();
                for (const Cd& x : pt.p) pv.push_back(complex_to_json(x));
                pj["p"] = pv;
                pj["value"] = complex_to_json(pt.value);
                pj["grad_norm"] = pt.grad_norm;
                points.push_back(pj);
            }
            j["points"] = points;
            emit(opt, j);
            return 0;
        }
        if (mirror_check->parsed()) {
            const auto q = q_values(opt);
            std::vector<CheckReport> reps{check_corollary1(opt.n, q, opt.seed),
                                          check_corollary2(opt.n, q, opt.seed)};
            if (mirror_all) reps.push_back(hessian_jacobian_check(opt.n, opt.seed));
            emit(opt, merge_section("mirror-check", reps));
            return all_pass(reps) ? 0 : 1;
        }
        if (mirror_amp->parsed()) {
            const CheckReport rep = amplitude_check(opt.n);
            emit(opt, rep.to_json());
            return rep.pass ? 0 : 1;
        }
        if (series_compute->parsed()) {
            require_symbolic_budget(opt.n);
            if (!series_check.empty()) {
                CheckReport rep;
                if (series_check == "thm3")
                    rep = check_theorem3(opt.n, opt.order);
                else if (series_check == "thm4")
                    rep = check_theorem4(opt.n, opt.order);
                else if (series_check == "kim")
                    rep = check_kim_rank(opt.n, opt.order);
                else if (series_check == "example6")
                    rep = check_example6(opt.n);
                else
                    throw InvalidInput("unknown series check '" + series_check + "'");
                emit(opt, rep.to_json());
                return rep.pass ? 0 : 1;
            }
            const SolutionData data = compute_s(opt.n, opt.order);
            const FlagRing& ring = FlagRing::get(opt.n);
            ordered_json j;
            j["check"] = "series-compute";
            j["n"] = opt.n;
            j["order"] = opt.order;
            ordered_json table = ordered_json::array();
            for (const auto& [d, sd] : data.s) {
                ordered_json entry;
                entry["d"] = d;
                ordered_json coords;
                for (std::size_t k = 0; k < sd.size(); ++k)
                    if (!sd[k].is_zero()) coords[basis_label(ring.basis()[k])] = sd[k].to_string();
                entry["s"] = coords;
                table.push_back(entry);
            }
            j["coefficients"] = table;
            emit(opt, j);
            return 0;
        }
        if (series_cpn->parsed()) {
            const CheckReport rep = check_projective_series(bigN, opt.order);
            emit(opt, rep.to_json());
            return rep.pass ? 0 : 1;
        }
        if (int_torus->parsed()) {
            const auto q = q_values(opt);
            std::vector<double> radii;
            if (!radii_text.empty()) {
                for (const Cd& r : parse_complex_list(radii_text)) radii.push_back(r.real());
            } else {
                radii = default_radii(opt.n, q);
            }
            const Cd val = torus_integral(opt.n, q, Cd(opt.hbar, 0), radii, opt.grid);
            ordered_json j;
            j["check"] = "integral-torus";
            j["n"] = opt.n;
            j["grid"] = opt.grid;
            j["radii"] = radii;
            j["value"] = complex_to_json(val);
            emit(opt, j);
            return 0;
        }
        if (int_span->parsed()) {
            const CheckReport rep = span_fit(opt.n, opt.order, samples, opt.seed, opt.grid);
            emit(opt, rep.to_json());
            return rep.pass ? 0 : 1;
        }
        if (int_saddle->parsed()) {
            const CheckReport rep = saddle_check(
                saddle_q, {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125}, std::max(opt.grid, 256));
            emit(opt, rep.to_json());
            return rep.pass ? 0 : 1;
        }
        if (verify->parsed()) {
            if (n_given) require_symbolic_budget(opt.n);
            return run_verify_all(opt);
        }
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const BudgetExhausted& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return 3;
    } catch (const CheckFailure& e) {
        std::cerr << "check failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
