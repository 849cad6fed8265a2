// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.
// Exit status is the number of failed criteria.

#include "birthcut/lab.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

using namespace birthcut;

namespace {

const PrecisionContext ctx = PrecisionContext::with_bits(128);

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string f(const Real& x, int d = 3) { return format_real(x, d); }

Real rel(const Real& got, const Real& want) { return abs(got - want) / abs(want); }

const Potential& gaussian() {
    static const Potential V(Polynomial({Real(0), Real(0), Real(0.5)}), "x^2/2");
    return V;
}

const Synthesis& synth(int nu) {
    static std::map<int, Synthesis> cache;
    auto it = cache.find(nu);
    if (it == cache.end()) it = cache.emplace(nu, synthesize_birth_potential(Real(3), nu, ctx)).first;
    return it->second;
}

Verdict semicircle() {
    const OneCutMeasure m = solve_one_cut(gaussian(), Real(1), ctx);
    const Real end_err = std::max(abs(m.a + 2), abs(m.b - 2));
    Real sup(0);
    for (int k = 1; k <= 50; ++k) {
        const Real x = -2 + 4 * Real(k) / 51;
        sup = std::max(sup, Real(abs(m.density(x) - sqrt(4 - x * x) / (2 * pi()))));
    }
    return {end_err <= Real(1e-10) && sup <= Real(1e-10), "endpoint err " + f(end_err) + ", density err " + f(sup)};
}

Verdict synthesis() {
    bool ok = true;
    std::string detail;
    for (int nu : {1, 2}) {
        std::string part = "nu=" + std::to_string(nu) + ":";
        try {
            const Synthesis& s = synth(nu);
            const Real mass_err = abs(s.measure.mass() - 1);
            const CriticalReport again = detect_critical_point(
                s.measure, s.V, Interval(s.measure.b, Real(6)), ctx);
            const bool round_trip = abs(again.x_star - 3) <= Real(1e-6) && again.nu == nu;
            const bool this_ok = abs(s.E_at_xstar) <= Real(1e-10) && mass_err <= Real(1e-10) &&
                                 s.report.margin > Real(1e-6) && round_trip;
            part += " |E(x*)| " + f(abs(s.E_at_xstar)) + ", mass err " + f(mass_err) + ", margin " +
                    f(s.report.margin) + ", round trip " + (round_trip ? "ok" : "no");
            ok = ok && this_ok;
        } catch (const std::exception& e) {
            part += std::string(" error: ") + e.what();
            ok = false;
        }
        detail += (detail.empty() ? "" : "; ") + part;
    }
    return {ok, detail};
}

Verdict filling() {
    Real worst(0), worst_p(0);
    for (int nu = 1; nu <= 4; ++nu)
        for (Real y : {Real(0.25), Real(1), Real(2)}) {
            const FillingIdentity fi = filling_identity(nu, y, ctx);
            worst = std::max(worst, rel(fi.lhs, fi.rhs));
            const Real want = P_at_2y_closed(nu, y);
            worst_p = std::max(worst_p, Real(abs(P_polynomial(nu, y)(2 * y) - want) / (1 + abs(want))));
        }
    return {worst <= Real(1e-10) && worst_p <= Real(1e-12),
            "filling rel err " + f(worst) + ", P(2y) err " + f(worst_p)};
}

Verdict arcsine() {
    bool ok = true;
    std::string detail;
    const std::vector<Real> ts = {Real(1) - Real(1e-2), Real(1) - Real(1e-3), Real(1) - Real(1e-4)};
    for (const auto* V : {&gaussian(), &synth(1).V}) {
        const auto rows = br_derivative_check(*V, ts, ctx);
        detail += (detail.empty() ? "" : "; ") + (V == &gaussian() ? std::string("x^2/2") : std::string("birth nu=1")) +
                  " residuals";
        for (const auto& r : rows) detail += " " + f(r.residual);
        for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
            const Real ratio = rows[i].residual / rows[i + 1].residual;
            ok = ok && rows[i + 1].residual < rows[i].residual && ratio >= 5 && ratio <= 20;
            detail += " (ratio " + f(ratio) + ")";
        }
    }
    return {ok, detail};
}

Verdict stability() {
    const Synthesis& s = synth(1);
    std::vector<std::vector<Real>> series(5);
    for (Real dt : {Real(1e-3), Real(1e-4), Real(1e-5)}) {
        const AnsatzParams p = build_params(s.report, dt, 48, ctx);
        series[0].push_back(qtilde_expansion_residual(p, Real(-3)) / p.scale);
        series[1].push_back(qtilde_expansion_residual(p, Real(5)) / p.scale);
        series[2].push_back(htilde_expansion_residual(p, s.measure, Real(-3)) / p.scale);
        series[3].push_back(htilde_expansion_residual(p, s.measure, Real(5)) / p.scale);
        series[4].push_back(xstar_potential_residual(p, s.measure, s.V) / p.scale);
    }
    const char* names[] = {"q~(-3)", "q~(5)", "h~(-3)", "h~(5)", "x*"};
    bool ok = true;
    std::string detail = "max/min over delta_t:";
    for (int i = 0; i < 5; ++i) {
        Real lo = abs(series[i][0]), hi = lo;
        bool same_sign = true;
        for (const auto& v : series[i]) {
            lo = std::min(lo, Real(abs(v)));
            hi = std::max(hi, Real(abs(v)));
            same_sign = same_sign && (v > 0) == (series[i][0] > 0);
        }
        const Real factor = hi / lo;
        ok = ok && same_sign && factor < 3;
        detail += std::string(" ") + names[i] + " " + f(factor);
    }
    return {ok, detail};
}

Verdict jumps() {
    const Synthesis& s = synth(1);
    const AnsatzParams p = build_params(s.report, Real(1e-2), 40, ctx);
    const GFunction sup = make_gfunction(p, s.measure, s.V, ctx);
    const OneCutMeasure m = solve_one_cut(s.V, Real(0.95), ctx);
    const GFunction sub = make_gfunction(m, s.V, 32, Real(3));
    Real worst(0), worst_det(0);
    std::map<std::string, int> per_piece;
    std::size_t rows = 0;
    for (const GFunction* gf : {&sup, &sub}) {
        for (const auto& r : jump_suite(*gf, make_frame(*gf, s.report, ctx), ctx)) {
            ++rows;
            const std::string key = (gf == &sup ? "super " : "sub ") + r.object + " " + r.piece;
            ++per_piece[key];
            if (r.object == "Pi" && r.piece == "det") worst_det = std::max(worst_det, r.residual);
            else worst = std::max(worst, r.residual);
        }
    }
    int fewest = 1 << 30;
    for (const auto& [k, c] : per_piece) fewest = std::min(fewest, c);
    return {worst <= Real(1e-8) && worst_det <= Real(1e-12) && fewest >= 5,
            std::to_string(rows) + " checks, worst jump " + f(worst) + ", worst |det Pi - 1| " + f(worst_det) +
                ", fewest points per piece " + std::to_string(fewest)};
}

Verdict hermite() {
    const WeightSpec w = WeightSpec::model(1);
    const RecurrenceTable t = stieltjes_recurrence(w, 40, ctx);
    Real err = rel(t.h[0], sqrt(pi()));
    for (int k = 0; k <= 40; ++k) {
        err = std::max(err, Real(abs(t.a[k])));
        if (k > 0) err = std::max(err, rel(t.b[k], Real(k) / 2));
    }
    Real trace_err(0), rep_err(0);
    for (int n : {8, 16}) {
        const Real tr = integrate([&](const Real& x) { return cd_kernel(t, w, n, x, x); }, t.support, RuleKind::plain, ctx);
        trace_err = std::max(trace_err, Real(abs(tr - n)));
        for (Real x : {Real(0.3), Real(-1.1)}) {
            const Real y(-0.7);
            const Real rep = integrate([&](const Real& v) { return cd_kernel(t, w, n, x, v) * cd_kernel(t, w, n, v, y); },
                                       t.support, RuleKind::plain, ctx);
            rep_err = std::max(rep_err, Real(abs(rep - cd_kernel(t, w, n, x, y))));
        }
    }
    return {err <= Real(1e-20) && trace_err <= Real(1e-8) && rep_err <= Real(1e-8),
            "recurrence rel err " + f(err) + ", trace err " + f(trace_err) + ", reproducing err " + f(rep_err)};
}

Verdict universality() {
    ExperimentConfig c;
    c.x_star = Real(3);
    c.nu = 1;
    c.regime = ScalingRegime::supercritical(Real(1.3) / (2 * phi(Real(3))));
    c.n_list = {16, 32, 48};
    c.grid = 17;
    const UniversalityResult r = run_universality_sweep(c);
    std::string detail = "u " + f(r.setup.u) + ", ubar " + std::to_string(r.setup.ubar) + ", sup err";
    for (const auto& p : r.points) detail += " n=" + std::to_string(p.n) + ":" + f(p.sup_err);
    detail += r.strictly_decreasing ? " (decreasing)" : " (not decreasing)";
    return {r.setup.ubar == 1 && r.strictly_decreasing && r.final_sup_err <= Real(0.1), detail};
}

Verdict subcritical() {
    ExperimentConfig c;
    c.x_star = Real(3);
    c.nu = 1;
    c.regime = ScalingRegime::subcritical(Real(0.5), Real(-1));
    c.n_list = {16, 32, 48};
    c.grid = 17;
    const SubcriticalResult r = run_subcritical_sweep(c);
    const SubcriticalPoint& last = r.points.back();
    const bool two = r.stable_prefactor == 2;
    const Real var = two ? last.variance_c2 : last.variance_c1;
    const Real constant = two ? last.constant_c2 : last.constant_c1;
    const Real dev = abs(constant / last.constant_limit - 1);
    std::string detail = std::string("prefactor ") + (two ? "e^{2c*}" : "e^{c*}") + ", constant";
    for (const auto& p : r.points) detail += " " + f(two ? p.constant_c2 : p.constant_c1);
    detail += " vs limit " + f(last.constant_limit) + " (off by " + f(dev) + "; finite-t constant " +
              f(last.constant_finite) + "), log-profile variance " + f(var) + ", tilted " + f(last.variance_tilted);
    return {var <= Real(1e-2) && dev <= Real(0.2), detail};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict determinism() {
    const std::filesystem::path root = std::filesystem::temp_directory_path() / "birthcut_acceptance_determinism";
    std::filesystem::remove_all(root);
    std::filesystem::create_directories(root);
    const std::filesystem::path cfg = root / "run.ini";
    std::ofstream(cfg) << "[potential]\nx_star = 3\nnu = 1\n[regime]\nkind = supercritical\nu_plus = 0.675\n"
                          "[sweep]\nn = 8,12\ngrid = 9\n";
    const std::vector<std::string> subcommands = {"equilibrium", "synthesize", "ansatz-check", "identities",
                                                  "universality", "subcritical"};
    std::size_t compared = 0;
    std::string mismatched;
    for (const auto& sub : subcommands) {
        for (const char* run : {"a", "b"}) {
            const std::string cmd = std::string("\"") + BIRTHCUT_CLI + "\" " + sub + " --config \"" + cfg.string() +
                                    "\" --out \"" + (root / sub / run).string() + "\" > /dev/null";
            if (std::system(cmd.c_str()) != 0) return {false, "subcommand " + sub + " failed"};
        }
        for (const auto& entry : std::filesystem::directory_iterator(root / sub / "a")) {
            if (entry.path().extension() != ".csv") continue;
            ++compared;
            const auto other = root / sub / "b" / entry.path().filename();
            if (slurp(entry.path()) != slurp(other)) mismatched += " " + sub + "/" + entry.path().filename().string();
        }
    }
    std::filesystem::remove_all(root);
    return {compared > 0 && mismatched.empty(),
            std::to_string(compared) + " CSV pairs compared over 6 subcommands" +
                (mismatched.empty() ? "" : ", differing:" + mismatched)};
}

}  // namespace

int main() {
    PrecisionScope scope(ctx);
    struct Criterion {
        int id;
        std::string name;
        double budget_seconds;  // 0: no fixed bound
        std::function<Verdict()> run;
    };
    const std::vector<Criterion> all = {
        {1, "semicircle regression", 1, semicircle},
        {2, "birth potential synthesis", 30, synthesis},
        {3, "filling identity and P(2y)", 5, filling},
        {4, "arcsine derivative of t rho^t", 60, arcsine},
        {5, "normalized residual stability", 120, stability},
        {6, "jump relations", 60, jumps},
        {7, "Hermite oracles and kernel identities", 60, hermite},
        {8, "critical kernel universality", 0, universality},
        {9, "subcritical kernel limit", 0, subcritical},
        {10, "byte-identical CSV across runs", 0, determinism},
    };
    int failed = 0;
    for (const auto& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_seconds > 0 && sec > c.budget_seconds) {
            v.pass = false;
            v.detail += "; over the " + format_double(c.budget_seconds, 3) + " s budget";
        }
        failed += !v.pass;
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << ", "
                  << format_double(sec, 3) << " s): " << v.detail << std::endl;
    }
    std::cout << (10 - failed) << "/10 criteria pass" << std::endl;
    return failed;
}
