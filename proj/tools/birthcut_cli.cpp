// Command-line driver for the experiments. Every subcommand writes CSV into
// --out and a short summary on stdout.

#include "birthcut/lab.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace birthcut;

namespace {

const PrecisionContext ctx128 = PrecisionContext::with_bits(128);

struct Flags {
    std::string config, potential, xstar, nu, uplus, k, uminus, n, out, grid, bits, t = "1";
    bool inject_fault = false;
};

std::vector<long> parse_n(const std::string& s) {
    std::vector<long> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stol(item));
    return out;
}

// config file first, then explicit flags on top
ExperimentConfig resolve(const Flags& f) {
    PrecisionScope scope(ctx128);
    ExperimentConfig c = f.config.empty() ? ExperimentConfig() : ExperimentConfig::load(f.config);
    if (!f.potential.empty()) c.potential_file = f.potential;
    if (!f.xstar.empty()) c.x_star = Real(f.xstar);
    if (!f.nu.empty()) c.nu = std::stoi(f.nu);
    if (!f.n.empty()) c.n_list = parse_n(f.n);
    if (!f.grid.empty()) c.grid = std::stoi(f.grid);
    if (!f.bits.empty()) c.bits = static_cast<unsigned>(std::stoul(f.bits));
    if (!f.out.empty()) c.out_dir = f.out;
    if (f.inject_fault) c.inject_fault = true;
    return c;
}

void print_paths(const std::vector<std::string>& paths) {
    for (const auto& p : paths) std::cout << "wrote " << p << "\n";
}

std::string fmt(const Real& x, int digits = 6) { return format_real(x, digits); }

int cmd_synthesize(const Flags& f) {
    ExperimentConfig c = resolve(f);
    PrecisionScope scope(ctx128);
    const Synthesis s = synthesize_birth_potential(c.x_star, c.nu, ctx128);
    std::filesystem::create_directories(c.out_dir);
    const std::string pot = (std::filesystem::path(c.out_dir) / "potential.txt").string();
    s.V.save(pot);
    const std::string rep = (std::filesystem::path(c.out_dir) / "critical.csv").string();
    std::ofstream o(rep, std::ios::binary);
    o << "# synthesized birth-of-cut potential\n";
    o << "x_star,nu,Q_at_xstar,phi_at_xstar,c_star_per_n,margin,E_at_xstar,normalization_residual,varphi_star\n";
    o << format_real(s.report.x_star, 17) << "," << s.report.nu << "," << format_real(s.report.Q_at_xstar, 17) << ","
      << format_real(s.report.phi_at_xstar, 17) << "," << format_real(s.report.c_star_per_n, 17) << ","
      << format_real(s.report.margin, 17) << "," << format_real(s.report.E_at_xstar, 17) << ","
      << format_real(s.normalization_residual, 17) << "," << format_real(varphi_at_xstar(s.report), 17) << "\n";
    if (!o) throw LabError("write failed: " + rep);
    std::cout << "x* = " << fmt(s.report.x_star) << ", nu = " << s.report.nu << ", |E(x*)| = " << fmt(abs(s.E_at_xstar), 3)
              << ", margin = " << fmt(s.report.margin, 3) << "\n";
    print_paths({pot, rep});
    return 0;
}

int cmd_equilibrium(const Flags& f) {
    ExperimentConfig c = resolve(f);
    PrecisionScope scope(ctx128);
    Potential V;
    if (c.potential_file.empty()) V = synthesize_birth_potential(c.x_star, c.nu, ctx128).V;
    else V = Potential::load(c.potential_file);
    const Real t(f.t);
    const OneCutMeasure m = solve_one_cut(V, t, ctx128);
    std::filesystem::create_directories(c.out_dir);
    const std::string path = (std::filesystem::path(c.out_dir) / "equilibrium.csv").string();
    std::ofstream o(path, std::ios::binary);
    o << "# potential: " << V.provenance << "\n# t: " << format_real(t, 17) << "\n# a: " << format_real(m.a, 17)
      << "\n# b: " << format_real(m.b, 17) << "\n# l_t: " << format_real(m.l_t, 17)
      << "\n# mass: " << format_real(m.mass(), 17) << "\n";
    o << "x,density,E\n";
    // density on the support, effective potential over a window twice as wide
    const Real w = m.b - m.a;
    const int samples = 200;
    for (int i = 0; i <= samples; ++i) {
        const Real x = m.a - w / 2 + 2 * w * Real(i) / samples;
        const Real rho = (x > m.a && x < m.b) ? m.density(x) : Real(0);
        o << format_real(x, 17) << "," << format_real(rho, 17) << "," << format_real(effective_potential(m, V, x), 17) << "\n";
    }
    if (!o) throw LabError("write failed: " + path);
    std::cout << "support [" << fmt(m.a) << ", " << fmt(m.b) << "], l_t = " << fmt(m.l_t) << "\n";
    print_paths({path});
    return 0;
}

int cmd_ansatz(const Flags& f) {
    ExperimentConfig c = resolve(f);
    PrecisionScope scope(ctx128);
    c.regime = ScalingRegime::critical();
    const BirthSetup s = prepare_setup(c, ctx128);
    const long n = c.n_list.back();
    std::filesystem::create_directories(c.out_dir);
    const std::string path = (std::filesystem::path(c.out_dir) / "ansatz.csv").string();
    std::ofstream o(path, std::ios::binary);
    o << "# potential: " << s.V.provenance << "\n# n: " << n << "\n";
    o << "# residuals divided by delta_t / |log delta_t|\n";
    o << "delta_t,scale,alpha_t,beta_t,iota_t,u_t,u_asymptotic,q_at_minus3,h_at_minus3,h_at_5,potential_at_xstar,H_form_gap\n";
    for (Real dt : {Real(1e-3), Real(1e-4), Real(1e-5), Real(1e-6)}) {
        const AnsatzParams p = build_params(s.report, dt, n, ctx128);
        o << format_real(dt, 17) << "," << format_real(p.scale, 17) << "," << format_real(p.alpha_t, 17) << ","
          << format_real(p.beta_t, 17) << "," << format_real(p.iota_t, 17) << "," << format_real(p.u_t, 17) << ","
          << format_real(p.u_asymptotic, 17) << "," << format_real(qtilde_expansion_residual(p, Real(-3)) / p.scale, 17)
          << "," << format_real(htilde_expansion_residual(p, s.measure, Real(-3)) / p.scale, 17) << ","
          << format_real(htilde_expansion_residual(p, s.measure, Real(5)) / p.scale, 17) << ","
          << format_real(xstar_potential_residual(p, s.measure, s.V) / p.scale, 17) << "," << format_real(H_form_gap(p), 17)
          << "\n";
    }
    std::cout << "filling identities:";
    for (int nu = 1; nu <= 4; ++nu) {
        const FillingIdentity fi = filling_identity(nu, Real(1), ctx128);
        std::cout << " nu=" << nu << " rel " << fmt(abs(fi.lhs - fi.rhs) / abs(fi.rhs), 2);
    }
    std::cout << "\n";
    if (!o) throw LabError("write failed: " + path);
    print_paths({path});
    return 0;
}

int cmd_identities(const Flags& f) {
    ExperimentConfig c = resolve(f);
    const auto rows = run_identity_suite(c);
    std::size_t failed = 0;
    for (const auto& r : rows) {
        failed += !r.pass;
        if (!r.pass) std::cout << "FAIL " << r.suite << ": " << r.name << " residual " << fmt(r.residual, 3) << "\n";
    }
    std::cout << rows.size() - failed << "/" << rows.size() << " identity rows pass\n";
    print_paths(emit_outputs(rows, c.out_dir));
    return failed ? 1 : 0;
}

int cmd_universality(const Flags& f) {
    ExperimentConfig c = resolve(f);
    {
        PrecisionScope scope(ctx128);
        if (c.regime.kind != ScalingRegime::Kind::supercritical) c.regime = ScalingRegime::supercritical(Real(0.675));
        if (!f.uplus.empty()) c.regime.U_plus = Real(f.uplus);
    }
    const UniversalityResult r = run_universality_sweep(c);
    std::cout << "u = " << fmt(r.setup.u, 4) << ", ubar = " << r.setup.ubar << "\n";
    for (const auto& p : r.points)
        std::cout << "n = " << p.n << "  N = " << p.N << "  bits = " << p.bits << "  u_eff = " << fmt(p.u_effective, 4)
                  << "  sup err = " << fmt(p.sup_err, 4) << "  (" << format_double(p.seconds, 3) << " s)\n";
    std::cout << "strictly decreasing: " << (r.strictly_decreasing ? "yes" : "no") << "\n";
    print_paths(emit_outputs(r, c, c.out_dir));
    return 0;
}

int cmd_subcritical(const Flags& f) {
    ExperimentConfig c = resolve(f);
    {
        PrecisionScope scope(ctx128);
        if (c.regime.kind != ScalingRegime::Kind::subcritical) c.regime = ScalingRegime::subcritical(Real(0.5), Real(-1));
        if (!f.k.empty()) c.regime.k = Real(f.k);
        if (!f.uminus.empty()) c.regime.U_minus = Real(f.uminus);
    }
    const SubcriticalResult r = run_subcritical_sweep(c);
    for (const auto& p : r.points)
        std::cout << "n = " << p.n << "  t = " << fmt(p.t, 5) << "  c* = " << fmt(p.c_star, 5)
                  << "  e^{c*}K(0,0) = " << fmt(p.constant_c1, 4) << "  e^{2c*}K(0,0) = " << fmt(p.constant_c2, 4)
                  << "  finite-t constant = " << fmt(p.constant_finite, 4) << "  var = " << fmt(p.variance_c2, 3) << "  ("
                  << format_double(p.seconds, 3) << " s)\n";
    std::cout << "limit constant = " << fmt(r.points.empty() ? Real(0) : r.points.back().constant_limit, 4)
              << ", stable prefactor: " << (r.stable_prefactor == 2 ? "e^{2c*}" : "e^{c*}") << "\n";
    print_paths(emit_outputs(r, c, c.out_dir));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Birth-of-a-cut experiments: equilibrium measures, kernel sweeps, identity checks"};
    app.require_subcommand(1);
    Flags f;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", f.config, "key = value config file")->check(CLI::ExistingFile);
        sub->add_option("--potential", f.potential, "potential file (coefficients, ascending)")->check(CLI::ExistingFile);
        sub->add_option("--xstar", f.xstar, "critical point for synthesis");
        sub->add_option("--nu", f.nu, "order of vanishing at x*");
        sub->add_option("--out", f.out, "output directory");
    };
    auto sweep = [&](CLI::App* sub) {
        sub->add_option("--n", f.n, "comma-separated, strictly increasing");
        sub->add_option("--grid", f.grid, "grid points per axis on [z_min, z_max]");
        sub->add_option("--bits", f.bits, "working precision; 0 uses max(128, 64 + 8n)");
    };

    auto* eq = app.add_subcommand("equilibrium", "one-cut equilibrium measure at t");
    common(eq);
    eq->add_option("--t", f.t, "scaling parameter t");
    auto* syn = app.add_subcommand("synthesize", "build a potential with a critical point of order nu at x*");
    common(syn);
    auto* ans = app.add_subcommand("ansatz-check", "two-band ansatz residuals over delta_t");
    common(ans);
    ans->add_option("--n", f.n, "n used for the filling fraction");
    auto* ids = app.add_subcommand("identities", "every identity check as pass/fail rows");
    common(ids);
    ids->add_flag("--inject-fault", f.inject_fault, "corrupt one recurrence coefficient to exercise the failure path");
    auto* uni = app.add_subcommand("universality", "supercritical kernel sweep against the model kernel");
    common(uni);
    sweep(uni);
    uni->add_option("--uplus", f.uplus, "U+ in t = 1 + U+ log n / n");
    auto* sub = app.add_subcommand("subcritical", "subcritical kernel sweep with both prefactors");
    common(sub);
    sweep(sub);
    sub->add_option("--k", f.k, "exponent in t = 1 + U- n^{-k}");
    sub->add_option("--uminus", f.uminus, "U- <= 0");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*eq) return cmd_equilibrium(f);
        if (*syn) return cmd_synthesize(f);
        if (*ans) return cmd_ansatz(f);
        if (*ids) return cmd_identities(f);
        if (*uni) return cmd_universality(f);
        if (*sub) return cmd_subcritical(f);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
