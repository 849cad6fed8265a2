#include "birthcut/lab.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace birthcut {

namespace {

const PrecisionContext setup_ctx = PrecisionContext::with_bits(128);

Real pow_int(const Real& x, int k) {
    Real r(1);
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

// n^{1/(2 nu)}
Real root_scale(long n, int nu) { return pow(Real(n), Real(1) / (2 * nu)); }

long nearest_long(const Real& x) { return floor(x + Real(0.5)).convert_to<long>(); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Real population_variance(const std::vector<Real>& v) {
    if (v.empty()) return Real(0);
    Real mean(0);
    for (const auto& x : v) mean += x;
    mean /= Real(v.size());
    Real s(0);
    for (const auto& x : v) s += (x - mean) * (x - mean);
    return s / Real(v.size());
}

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

Real parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        (void)std::stod(value, &used);
        if (trim(value.substr(used)) != "") throw std::invalid_argument(value);
        return Real(trim(value));
    } catch (const std::exception&) {
        throw LabError("config key '" + key + "': not a number: '" + value + "'");
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        long v = std::stol(value, &used);
        if (trim(value.substr(used)) != "") throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw LabError("config key '" + key + "': not an integer: '" + value + "'");
    }
}

std::vector<long> parse_list(const std::string& key, const std::string& value) {
    std::vector<long> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_long(key, trim(item)));
    if (out.empty()) throw LabError("config key '" + key + "': empty list");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw LabError("config key '" + key + "': expected true or false, got '" + value + "'");
}

std::string csv(const Real& x) { return format_real(x, 17); }

std::ofstream open_for_write(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw LabError("cannot open for writing: " + path);
    return f;
}

void finish(std::ofstream& f, const std::string& path) {
    f.flush();
    if (!f) throw LabError("write failed: " + path);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw LabError("cannot create output directory " + dir + (ec ? ": " + ec.message() : ""));
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void write_setup_header(const BirthSetup& s, const ExperimentConfig& cfg, std::ostream& out) {
    out << "# potential: " << s.V.provenance << "\n";
    out << "# x_star: " << csv(s.report.x_star) << "\n";
    out << "# nu: " << s.report.nu << "\n";
    out << "# regime: " << cfg.regime.name() << "\n";
    out << "# varphi_star: " << csv(s.varphi_star) << "\n";
    out << "# grid: " << cfg.grid << " points on [" << csv(cfg.z_min) << ", " << csv(cfg.z_max) << "]\n";
    out << "# bits: " << (cfg.bits ? std::to_string(cfg.bits) : std::string("max(128, 64 + 8 n)")) << "\n";
}

}  // namespace

// ---------------------------------------------------------------- regime

ScalingRegime ScalingRegime::supercritical(const Real& U_plus) {
    ScalingRegime r;
    r.kind = Kind::supercritical;
    r.U_plus = U_plus;
    return r;
}

ScalingRegime ScalingRegime::subcritical(const Real& k, const Real& U_minus) {
    ScalingRegime r;
    r.kind = Kind::subcritical;
    r.k = k;
    r.U_minus = U_minus;
    return r;
}

ScalingRegime ScalingRegime::critical() { return ScalingRegime(); }

Real ScalingRegime::target_t(long n) const {
    switch (kind) {
        case Kind::supercritical:
            return 1 + U_plus * log(Real(n)) / Real(n);
        case Kind::subcritical:
            return 1 + U_minus * pow(Real(n), -k);
        case Kind::critical:
            break;
    }
    return Real(1);
}

std::string ScalingRegime::name() const {
    switch (kind) {
        case Kind::supercritical:
            return "supercritical U_plus=" + csv(U_plus);
        case Kind::subcritical:
            return "subcritical k=" + csv(k) + " U_minus=" + csv(U_minus);
        case Kind::critical:
            break;
    }
    return "critical";
}

Coupling couple(const ScalingRegime& r, long n) {
    if (n < 1) throw LabError("n must be positive");
    const Real t = r.target_t(n);
    if (!(t > 0)) throw LabError("scaling gives t <= 0 at n = " + std::to_string(n));
    Coupling c;
    c.n = n;
    c.N = std::max(1L, nearest_long(Real(n) / t));
    c.t = Real(n) / Real(c.N);
    return c;
}

// ---------------------------------------------------------------- config

ExperimentConfig ExperimentConfig::read(std::istream& in, const std::string& origin) {
    PrecisionScope scope(setup_ctx);
    boost::property_tree::ptree pt;
    try {
        boost::property_tree::read_ini(in, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw LabError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }

    ExperimentConfig c;
    std::string kind = "supercritical";
    Real U_plus = c.regime.U_plus, k(0.5), U_minus(-1);
    static const std::set<std::string> known = {
        "potential.file", "potential.x_star", "potential.nu",  "regime.kind",   "regime.u_plus",
        "regime.k",       "regime.u_minus",   "sweep.n",       "sweep.grid",    "sweep.z_min",
        "sweep.z_max",    "sweep.bits",       "sweep.n_cap",   "output.dir",    "identities.inject_fault"};
    for (const auto& [section, body] : pt) {
        if (body.empty()) throw LabError(origin + ": key '" + section + "' outside a section");
        for (const auto& [key, node] : body) {
            const std::string full = section + "." + key;
            if (!known.count(full)) throw LabError(origin + ": unknown key '" + full + "'");
            const std::string v = trim(node.data());
            if (full == "potential.file") c.potential_file = v;
            else if (full == "potential.x_star") c.x_star = parse_real(full, v);
            else if (full == "potential.nu") c.nu = static_cast<int>(parse_long(full, v));
            else if (full == "regime.kind") kind = v;
            else if (full == "regime.u_plus") U_plus = parse_real(full, v);
            else if (full == "regime.k") k = parse_real(full, v);
            else if (full == "regime.u_minus") U_minus = parse_real(full, v);
            else if (full == "sweep.n") c.n_list = parse_list(full, v);
            else if (full == "sweep.grid") c.grid = static_cast<int>(parse_long(full, v));
            else if (full == "sweep.z_min") c.z_min = parse_real(full, v);
            else if (full == "sweep.z_max") c.z_max = parse_real(full, v);
            else if (full == "sweep.bits") c.bits = static_cast<unsigned>(parse_long(full, v));
            else if (full == "sweep.n_cap") c.n_cap = parse_long(full, v);
            else if (full == "output.dir") c.out_dir = v;
            else if (full == "identities.inject_fault") c.inject_fault = parse_bool(full, v);
        }
    }
    if (kind == "supercritical") c.regime = ScalingRegime::supercritical(U_plus);
    else if (kind == "subcritical") c.regime = ScalingRegime::subcritical(k, U_minus);
    else if (kind == "critical") c.regime = ScalingRegime::critical();
    else throw LabError(origin + ": regime.kind must be supercritical, subcritical or critical");
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw LabError("cannot open config " + path);
    return read(f, path);
}

void ExperimentConfig::write(std::ostream& out) const {
    out << "[potential]\n";
    if (!potential_file.empty()) out << "file = " << potential_file << "\n";
    out << "x_star = " << csv(x_star) << "\nnu = " << nu << "\n\n[regime]\n";
    switch (regime.kind) {
        case ScalingRegime::Kind::supercritical:
            out << "kind = supercritical\nu_plus = " << csv(regime.U_plus) << "\n";
            break;
        case ScalingRegime::Kind::subcritical:
            out << "kind = subcritical\nk = " << csv(regime.k) << "\nu_minus = " << csv(regime.U_minus) << "\n";
            break;
        case ScalingRegime::Kind::critical:
            out << "kind = critical\n";
            break;
    }
    out << "\n[sweep]\nn = ";
    for (std::size_t i = 0; i < n_list.size(); ++i) out << (i ? "," : "") << n_list[i];
    out << "\ngrid = " << grid << "\nz_min = " << csv(z_min) << "\nz_max = " << csv(z_max) << "\nbits = " << bits
        << "\nn_cap = " << n_cap << "\n\n[output]\ndir = " << out_dir << "\n\n[identities]\ninject_fault = "
        << (inject_fault ? "true" : "false") << "\n";
}

void ExperimentConfig::validate() const {
    if (nu < 1) throw LabError("nu must be at least 1");
    if (n_list.empty()) throw LabError("n list is empty");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 2) throw LabError("every n must be at least 2");
        if (i && n_list[i] <= n_list[i - 1]) throw LabError("n list must be strictly increasing");
        if (n_list[i] > n_cap)
            throw LabError("n = " + std::to_string(n_list[i]) + " exceeds n_cap = " + std::to_string(n_cap) +
                           "; raise n_cap to run it");
    }
    if (grid < 2) throw LabError("grid needs at least 2 points");
    if (!(z_min < z_max)) throw LabError("z_min must be below z_max");
    if (bits != 0 && bits < 64) throw LabError("bits must be 0 (schedule) or at least 64");
    switch (regime.kind) {
        case ScalingRegime::Kind::supercritical:
            if (!(regime.U_plus > 0)) throw LabError("U_plus must be positive");
            break;
        case ScalingRegime::Kind::subcritical:
            if (!(regime.U_minus <= 0)) throw LabError("U_minus must be nonpositive");
            if (regime.k < 1 - Real(1) / (2 * nu))
                throw LabError("k below 1 - 1/(2 nu) is outside the subcritical scaling window");
            break;
        case ScalingRegime::Kind::critical:
            break;
    }
}

std::vector<Real> ExperimentConfig::z_grid() const {
    std::vector<Real> z(grid);
    for (int i = 0; i < grid; ++i) z[i] = z_min + (z_max - z_min) * Real(i) / Real(grid - 1);
    return z;
}

unsigned ExperimentConfig::bits_for(long n) const {
    if (bits) return bits;
    return std::max(128u, recommended_bits(static_cast<int>(n)));
}

// ---------------------------------------------------------------- setup

BirthSetup prepare_setup(const ExperimentConfig& cfg, const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    BirthSetup s;
    if (cfg.potential_file.empty()) {
        Synthesis syn = synthesize_birth_potential(cfg.x_star, cfg.nu, ctx);
        s.V = syn.V;
        s.measure = syn.measure;
        s.report = syn.report;
    } else {
        s.V = Potential::load(cfg.potential_file);
        s.measure = solve_one_cut(s.V, Real(1), ctx);
        const Real w = s.measure.b - s.measure.a;
        try {
            s.report = detect_critical_point(s.measure, s.V, Interval(s.measure.b, s.measure.b + 2 * w), ctx);
        } catch (const EquilibriumError&) {
            try {
                s.report = detect_critical_point(s.measure, s.V, Interval(s.measure.a - 2 * w, s.measure.a), ctx);
            } catch (const EquilibriumError& e) {
                throw LabError(cfg.potential_file + ": no critical point on either side of the support (" +
                               e.what() + ")");
            }
        }
        if (s.report.nu != cfg.nu)
            throw LabError(cfg.potential_file + ": critical point has order " + std::to_string(s.report.nu) +
                           ", config says nu = " + std::to_string(cfg.nu));
    }
    s.varphi_star = varphi_at_xstar(s.report);
    if (cfg.regime.kind == ScalingRegime::Kind::supercritical) {
        s.u = 2 * s.report.nu * s.report.phi_at_xstar * cfg.regime.U_plus;
        s.ubar = nearest_long(s.u);
    } else {
        s.u = Real(0);
        s.ubar = 0;
    }
    return s;
}

// ---------------------------------------------------------------- universality

UniversalityResult run_universality_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.regime.kind != ScalingRegime::Kind::supercritical)
        throw LabError("the universality sweep needs the supercritical regime");

    UniversalityResult r;
    r.setup = prepare_setup(cfg, setup_ctx);
    const BirthSetup& s = r.setup;
    {
        PrecisionScope scope(setup_ctx);
        const Real frac = s.u - floor(s.u);
        if (abs(frac - Real(0.5)) < Real(0.1))
            throw LabError("u = " + format_real(s.u, 6) +
                           " lies within 0.1 of a half-integer, where the limit is not uniform; change U_plus");
    }
    const int nu = s.report.nu;
    const std::vector<Real> zs = cfg.z_grid();

    RecurrenceTable model_table;
    const WeightSpec model_w = WeightSpec::model(nu);
    if (s.ubar > 0) {
        PrecisionScope scope(setup_ctx);
        model_table = stieltjes_recurrence(model_w, static_cast<int>(s.ubar), setup_ctx);
    }

    for (long n : cfg.n_list) {
        const auto t0 = std::chrono::steady_clock::now();
        const PrecisionContext ctx = PrecisionContext::with_bits(cfg.bits_for(n));
        PrecisionScope scope(ctx);
        const Coupling c = couple(cfg.regime, n);

        const WeightSpec w = WeightSpec::ensemble(s.V, c.N);
        const RecurrenceTable table = stieltjes_recurrence(w, static_cast<int>(n), ctx);
        const Real scale = s.varphi_star * root_scale(n, nu);

        UniversalityPoint pt;
        pt.n = n;
        pt.N = c.N;
        pt.t = c.t;
        pt.bits = ctx.bits;
        pt.U_effective = (c.t - 1) * Real(n) / log(Real(n));
        pt.u_effective = 2 * nu * s.report.phi_at_xstar * pt.U_effective;
        pt.orthogonality_residual = table.orthogonality_residual;

        for (const Real& z : zs)
            for (const Real& zp : zs) {
                SweepRow row;
                row.n = n;
                row.N = c.N;
                row.t = c.t;
                row.z = z;
                row.zp = zp;
                row.K_scaled = cd_kernel(table, w, static_cast<int>(n), Real(s.report.x_star + z / scale),
                                         Real(s.report.x_star + zp / scale)) /
                               scale;
                row.K_model = s.ubar > 0 ? cd_kernel(model_table, model_w, static_cast<int>(s.ubar), z, zp) : Real(0);
                row.abs_err = abs(row.K_scaled - row.K_model);
                r.rows.push_back(row);
            }
        pt.seconds = seconds_since(t0);
        r.points.push_back(pt);
    }
    summarize_sweep(r);
    return r;
}

void summarize_sweep(UniversalityResult& r) {
    std::map<long, Real> sup;
    for (const auto& row : r.rows) {
        auto it = sup.find(row.n);
        if (it == sup.end()) sup.emplace(row.n, row.abs_err);
        else if (row.abs_err > it->second) it->second = row.abs_err;
    }
    for (auto& p : r.points)
        if (sup.count(p.n)) p.sup_err = sup[p.n];
    r.strictly_decreasing = !sup.empty();
    const Real* prev = nullptr;
    for (const auto& [n, e] : sup) {
        if (prev && !(e < *prev)) r.strictly_decreasing = false;
        prev = &e;
    }
    r.final_sup_err = sup.empty() ? Real(0) : sup.rbegin()->second;
}

// ---------------------------------------------------------------- subcritical

SubcriticalResult run_subcritical_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.regime.kind != ScalingRegime::Kind::subcritical)
        throw LabError("the subcritical sweep needs the subcritical regime");

    SubcriticalResult r;
    r.setup = prepare_setup(cfg, setup_ctx);
    const BirthSetup& s = r.setup;
    const int nu = s.report.nu;
    const Real xs = s.report.x_star;
    const std::vector<Real> zs = cfg.z_grid();

    for (long n : cfg.n_list) {
        const auto t0 = std::chrono::steady_clock::now();
        const Coupling c = couple(cfg.regime, n);
        SubcriticalPoint pt;
        pt.n = n;
        pt.N = c.N;
        pt.t = c.t;

        // equilibrium quantities at the coupled t
        OneCutMeasure m;
        Real tau_star;
        {
            PrecisionScope scope(setup_ctx);
            if (c.t > 1) throw LabError("subcritical coupling produced t > 1 at n = " + std::to_string(n));
            m = solve_one_cut(s.V, c.t, setup_ctx);
            pt.alpha_t = m.a;
            pt.beta_t = m.b;
            pt.c_star = -Real(n) * effective_potential(m, s.V, xs) / 2;
            const GFunction gf = make_gfunction(m, s.V, n, xs);
            tau_star = tau_Z(gf, s.report, setup_ctx).tau(Complex(xs, Real(0))).real();
            pt.tau_star = tau_star;
            pt.constant_finite = (1 / (xs - m.b) - 1 / (xs - m.a)) / (8 * pi());
            pt.constant_limit = (1 / (xs - s.measure.b) - 1 / (xs - s.measure.a)) / (8 * pi());
        }

        const PrecisionContext ctx = PrecisionContext::with_bits(cfg.bits_for(n));
        PrecisionScope scope(ctx);
        pt.bits = ctx.bits;
        const WeightSpec w = WeightSpec::ensemble(s.V, c.N);
        const RecurrenceTable table = stieltjes_recurrence(w, static_cast<int>(n), ctx);
        const Real scale = s.varphi_star * root_scale(n, nu);
        const Real e1 = exp(pt.c_star), e2 = e1 * e1;
        auto K_at = [&](const Real& z, const Real& zp) {
            return cd_kernel(table, w, static_cast<int>(n), Real(xs + z / scale), Real(xs + zp / scale));
        };

        for (const Real& z : zs)
            for (const Real& zp : zs) {
                SubcriticalRow row;
                row.n = n;
                row.N = c.N;
                row.t = c.t;
                row.z = z;
                row.zp = zp;
                row.K = K_at(z, zp);
                row.K_c1 = e1 * row.K;
                row.K_c2 = e2 * row.K;
                row.K_limit = exp(-(pow_int(z, 2 * nu) + pow_int(zp, 2 * nu)) / 2) * pt.constant_finite;
                r.rows.push_back(row);
            }

        const Real K0 = K_at(Real(0), Real(0));
        pt.constant_c1 = e1 * K0;
        pt.constant_c2 = e2 * K0;

        std::vector<Real> r1, r2, rt;
        pt.conformal_residual = Real(0);
        for (const Real& z : zs) {
            const Real K = K_at(z, z);
            const Real lk = log(K);
            const Real z2nu = pow_int(z, 2 * nu);
            r1.push_back(lk + pt.c_star + z2nu);
            r2.push_back(lk + 2 * pt.c_star + z2nu);
            rt.push_back(lk + 2 * pt.c_star + z2nu - tau_star * z);
            const Real x = xs + z / scale;
            if (x > m.b) {
                PrecisionScope lower(setup_ctx);
                const Real C = (1 / (x - m.b) - 1 / (x - m.a)) / (8 * pi());
                const Real gap = abs(Real(lk - Real(n) * effective_potential(m, s.V, x) - log(C)));
                if (gap > pt.conformal_residual) pt.conformal_residual = gap;
            }
        }
        pt.variance_c1 = population_variance(r1);
        pt.variance_c2 = population_variance(r2);
        pt.variance_tilted = population_variance(rt);
        pt.seconds = seconds_since(t0);
        r.points.push_back(pt);
    }

    // the prefactor whose K(0,0) drifts least (in log) across n
    PrecisionScope scope(setup_ctx);
    auto spread = [&](bool second) {
        Real lo(std::numeric_limits<double>::infinity()), hi(-std::numeric_limits<double>::infinity());
        for (const auto& p : r.points) {
            const Real v = log(second ? p.constant_c2 : p.constant_c1);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return Real(hi - lo);
    };
    r.stable_prefactor = spread(true) <= spread(false) ? 2 : 1;
    return r;
}

// ---------------------------------------------------------------- identities

std::vector<IdentityRow> run_identity_suite(const ExperimentConfig& cfg) {
    const PrecisionContext& ctx = setup_ctx;
    PrecisionScope scope(ctx);
    std::vector<IdentityRow> rows;
    auto add = [&](const std::string& suite, const std::string& name, const Real& residual, const Real& tol) {
        IdentityRow row;
        row.suite = suite;
        row.name = name;
        row.residual = residual;
        row.tolerance = tol;
        row.pass = !isnan(residual) && residual <= tol;
        rows.push_back(row);
    };
    auto guarded = [&](const std::string& suite, const std::string& name, auto&& body) {
        try {
            body();
        } catch (const std::exception& e) {
            IdentityRow row;
            row.suite = suite;
            row.name = name + " (" + e.what() + ")";
            row.residual = Real(std::numeric_limits<double>::infinity());
            row.tolerance = Real(0);
            rows.push_back(row);
        }
    };
    const Real inf(std::numeric_limits<double>::infinity());

    // semicircle
    const Potential gaussian(Polynomial({Real(0), Real(0), Real(0.5)}), "x^2/2");
    guarded("equilibrium", "semicircle", [&] {
        const OneCutMeasure m = solve_one_cut(gaussian, Real(1), ctx);
        add("equilibrium", "semicircle endpoints", std::max(abs(m.a + 2), abs(m.b - 2)), Real(1e-10));
        Real sup(0);
        for (int k = 1; k <= 50; ++k) {
            const Real x = -2 + 4 * Real(k) / 51;
            sup = std::max(sup, Real(abs(m.density(x) - sqrt(4 - x * x) / (2 * pi()))));
        }
        add("equilibrium", "semicircle density", sup, Real(1e-10));
        add("equilibrium", "q identity at x = 5", q_identity_check(m, gaussian, Real(5), ctx).residual, Real(1e-25));
    });

    // Buyarov-Rakhmanov: first order in 1 - t, so a factor 10 per decade;
    // |log10(ratio) - 1| <= log10(2) is the window [5, 20]
    guarded("equilibrium", "arcsine derivative", [&] {
        const auto br = br_derivative_check(gaussian, {Real(1) - Real(1e-2), Real(1) - Real(1e-3), Real(1) - Real(1e-4)}, ctx);
        for (std::size_t i = 0; i + 1 < br.size(); ++i) {
            const Real ratio = br[i].residual / br[i + 1].residual;
            add("equilibrium", "arcsine derivative ratio t=" + format_real(br[i].t, 6) + "/" + format_real(br[i + 1].t, 6),
                ratio > 0 ? Real(abs(log10(ratio) - 1)) : inf, log10(Real(2)));
        }
    });

    // the birth potential
    BirthSetup s;
    bool have_setup = false;
    guarded("equilibrium", "birth potential", [&] {
        ExperimentConfig c = cfg;
        c.regime = ScalingRegime::critical();
        s = prepare_setup(c, ctx);
        have_setup = true;
        add("equilibrium", "E(x*)", abs(s.report.E_at_xstar), Real(1e-10));
        add("equilibrium", "unit mass", abs(s.measure.mass() - 1), Real(1e-10));
        add("equilibrium", "max E off support, away from x*", -s.report.margin, Real(-1e-6));
        if (cfg.potential_file.empty())
            add("equilibrium", "critical point round trip", abs(s.report.x_star - cfg.x_star), Real(1e-6));
    });

    // ansatz
    for (int nu = 1; nu <= 4; ++nu) {
        guarded("ansatz", "filling nu=" + std::to_string(nu), [&] {
            const FillingIdentity f = filling_identity(nu, Real(1), ctx);
            add("ansatz", "filling nu=" + std::to_string(nu), abs(f.lhs - f.rhs) / abs(f.rhs), Real(1e-10));
        });
        guarded("ansatz", "P(2y) nu=" + std::to_string(nu), [&] {
            const Real y(0.7);
            const Real want = P_at_2y_closed(nu, y);
            add("ansatz", "P(2y) nu=" + std::to_string(nu), abs(P_polynomial(nu, y)(2 * y) - want) / abs(want),
                Real(1e-12));
        });
    }
    if (have_setup) {
        guarded("ansatz", "normalized residuals", [&] {
            std::vector<std::vector<Real>> series(5);
            for (Real dt : {Real(1e-3), Real(1e-4), Real(1e-5)}) {
                const AnsatzParams p = build_params(s.report, dt, 48, ctx);
                series[0].push_back(qtilde_expansion_residual(p, Real(-3)) / p.scale);
                series[1].push_back(qtilde_expansion_residual(p, Real(5)) / p.scale);
                series[2].push_back(htilde_expansion_residual(p, s.measure, Real(-3)) / p.scale);
                series[3].push_back(htilde_expansion_residual(p, s.measure, Real(5)) / p.scale);
                series[4].push_back(xstar_potential_residual(p, s.measure, s.V) / p.scale);
                if (dt == Real(1e-4)) add("ansatz", "H coefficient forms", H_form_gap(p), Real(1e-20));
            }
            const char* names[] = {"q~ expansion at -3", "q~ expansion at 5", "h~ expansion at -3",
                                   "h~ expansion at 5", "potential at x*"};
            // max/min of the normalized residual over delta_t in {1e-3, 1e-4, 1e-5}
            for (int i = 0; i < 5; ++i) {
                const auto& v = series[i];
                bool same_sign = true;
                Real lo = abs(v[0]), hi = abs(v[0]);
                for (const auto& x : v) {
                    same_sign = same_sign && (x > 0) == (v[0] > 0);
                    lo = std::min(lo, Real(abs(x)));
                    hi = std::max(hi, Real(abs(x)));
                }
                add("ansatz", std::string(names[i]) + " stability", same_sign && lo > 0 ? Real(hi / lo) : inf, Real(3));
            }
        });
    }

    // orthopoly
    guarded("orthopoly", "Hermite", [&] {
        const WeightSpec w = WeightSpec::model(1);
        RecurrenceTable t = stieltjes_recurrence(w, 40, ctx);
        Real err(0), h = sqrt(pi());
        for (int k = 0; k <= 40; ++k) {
            if (k > 0) {
                h *= Real(k) / 2;
                err = std::max(err, Real(abs(t.b[k] - Real(k) / 2) / (Real(k) / 2)));
            }
            err = std::max(err, Real(abs(t.a[k])));
            err = std::max(err, Real(abs(t.h[k] - h) / h));
        }
        add("orthopoly", "Hermite recurrence k<=40", err, Real(1e-20));
        add("orthopoly", "Hermite orthogonality", t.orthogonality_residual, Real(1e-20));
        for (int n : {8, 16}) {
            const Real tr = integrate([&](const Real& x) { return cd_kernel(t, w, n, x, x); }, t.support,
                                      RuleKind::plain, ctx);
            add("orthopoly", "kernel trace n=" + std::to_string(n), abs(tr - n), Real(1e-8));
            const Real x(0.3), y(-0.7);
            const Real rep = integrate([&](const Real& v) { return cd_kernel(t, w, n, x, v) * cd_kernel(t, w, n, v, y); },
                                       t.support, RuleKind::plain, ctx);
            add("orthopoly", "reproducing n=" + std::to_string(n), abs(rep - cd_kernel(t, w, n, x, y)), Real(1e-8));
        }
        if (cfg.inject_fault) {
            t.b[5] *= Real(1.001);
            add("orthopoly", "Hermite orthogonality with b_5 corrupted", orthogonality_residual(t, w, ctx), Real(1e-20));
        }
    });
    if (have_setup) {
        guarded("orthopoly", "ensemble orthogonality", [&] {
            const int n = 16;
            const PrecisionContext hi = PrecisionContext::with_bits(recommended_bits(n));
            PrecisionScope up(hi);
            const RecurrenceTable t = stieltjes_recurrence(WeightSpec::ensemble(s.V, n), n, hi);
            add("orthopoly", "ensemble orthogonality N=n=16", t.orthogonality_residual, Real(1e-30));
        });
    }

    // Riemann-Hilbert jump relations in both regimes
    if (have_setup) {
        auto fold = [&](const std::string& label, const std::vector<JumpResidual>& jr) {
            std::map<std::string, Real> worst;
            std::vector<std::string> order;
            for (const auto& j : jr) {
                const std::string key = j.object + " " + j.piece;
                auto it = worst.find(key);
                if (it == worst.end()) {
                    worst.emplace(key, j.residual);
                    order.push_back(key);
                } else if (j.residual > it->second) {
                    it->second = j.residual;
                }
            }
            for (const auto& key : order)
                add("rht " + label, key, worst[key], key == "Pi det" ? Real(1e-12) : Real(1e-8));
        };
        guarded("rht supercritical", "jump suite", [&] {
            const AnsatzParams p = build_params(s.report, Real(1e-2), 40, ctx);
            const GFunction gf = make_gfunction(p, s.measure, s.V, ctx);
            fold("supercritical", jump_suite(gf, make_frame(gf, s.report, ctx), ctx));
        });
        guarded("rht subcritical", "jump suite", [&] {
            const OneCutMeasure m = solve_one_cut(s.V, Real(0.95), ctx);
            const GFunction gf = make_gfunction(m, s.V, 32, s.report.x_star);
            fold("subcritical", jump_suite(gf, make_frame(gf, s.report, ctx), ctx));
        });
    }
    return rows;
}

// ---------------------------------------------------------------- writers

void write_sweep_csv(const UniversalityResult& r, const ExperimentConfig& cfg, std::ostream& out) {
    out << "# sweep: universality\n";
    write_setup_header(r.setup, cfg, out);
    out << "# u: " << csv(r.setup.u) << "\n# ubar: " << r.setup.ubar << "\n";
    out << "n,t,z,zprime,K_scaled,K_model,abs_err\n";
    for (const auto& row : r.rows)
        out << row.n << "," << csv(row.t) << "," << csv(row.z) << "," << csv(row.zp) << "," << csv(row.K_scaled) << ","
            << csv(row.K_model) << "," << csv(row.abs_err) << "\n";
}

void write_sweep_summary_csv(const UniversalityResult& r, std::ostream& out) {
    out << "# sweep summary: sup over the grid of |K_scaled - K_model|\n";
    out << "# strictly decreasing: " << (r.strictly_decreasing ? "yes" : "no") << "\n";
    out << "n,N,t,bits,U_effective,u_effective,sup_err,orthogonality_residual\n";
    for (const auto& p : r.points)
        out << p.n << "," << p.N << "," << csv(p.t) << "," << p.bits << "," << csv(p.U_effective) << ","
            << csv(p.u_effective) << "," << csv(p.sup_err) << "," << csv(p.orthogonality_residual) << "\n";
}

void write_subcritical_csv(const SubcriticalResult& r, const ExperimentConfig& cfg, std::ostream& out) {
    out << "# sweep: subcritical\n";
    write_setup_header(r.setup, cfg, out);
    out << "n,t,z,zprime,K,K_c1,K_c2,K_limit\n";
    for (const auto& row : r.rows)
        out << row.n << "," << csv(row.t) << "," << csv(row.z) << "," << csv(row.zp) << "," << csv(row.K) << ","
            << csv(row.K_c1) << "," << csv(row.K_c2) << "," << csv(row.K_limit) << "\n";
}

void write_subcritical_summary_csv(const SubcriticalResult& r, std::ostream& out) {
    out << "# subcritical summary; K_c1 = e^{c*} K and K_c2 = e^{2c*} K\n";
    out << "# stable prefactor: " << (r.stable_prefactor == 2 ? "e^{2c*}" : "e^{c*}") << "\n";
    out << "n,N,t,bits,alpha_t,beta_t,c_star,tau_star,constant_finite,constant_limit,constant_c1,constant_c2,"
           "variance_c1,variance_c2,variance_tilted,conformal_residual\n";
    for (const auto& p : r.points)
        out << p.n << "," << p.N << "," << csv(p.t) << "," << p.bits << "," << csv(p.alpha_t) << "," << csv(p.beta_t)
            << "," << csv(p.c_star) << "," << csv(p.tau_star) << "," << csv(p.constant_finite) << ","
            << csv(p.constant_limit) << "," << csv(p.constant_c1) << "," << csv(p.constant_c2) << ","
            << csv(p.variance_c1) << "," << csv(p.variance_c2) << "," << csv(p.variance_tilted) << ","
            << csv(p.conformal_residual) << "\n";
}

void write_identities_csv(const std::vector<IdentityRow>& rows, std::ostream& out) {
    std::size_t failed = 0;
    for (const auto& r : rows) failed += !r.pass;
    out << "# identity suite: " << rows.size() << " rows, " << failed << " failed\n";
    out << "suite,case,residual,tolerance,pass\n";
    for (const auto& r : rows) {
        std::string name = r.name;
        std::replace(name.begin(), name.end(), ',', ';');
        out << r.suite << "," << name << "," << csv(r.residual) << "," << csv(r.tolerance) << ","
            << (r.pass ? "true" : "false") << "\n";
    }
}

namespace {

std::string svg_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// blue (low) to red (high)
std::string heat(double v) {
    v = std::clamp(v, 0.0, 1.0);
    const int r = static_cast<int>(255 * v), b = static_cast<int>(255 * (1 - v)), g = static_cast<int>(80 * (1 - std::abs(2 * v - 1)));
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

void write_error_svg(const std::vector<long>& n, const std::vector<Real>& err, const std::string& title,
                     std::ostream& out) {
    const double W = 480, H = 320, L = 70, R = 20, T = 40, B = 50;
    std::vector<double> ly;
    for (const auto& e : err) ly.push_back(std::log10(std::max(to_double(e), 1e-300)));
    double ymin = ly.empty() ? -1 : *std::min_element(ly.begin(), ly.end());
    double ymax = ly.empty() ? 0 : *std::max_element(ly.begin(), ly.end());
    ymin = std::floor(ymin);
    ymax = std::ceil(ymax);
    if (ymax <= ymin) ymax = ymin + 1;
    const double xmin = n.empty() ? 0 : static_cast<double>(n.front()), xmax = n.empty() ? 1 : static_cast<double>(n.back());
    auto px = [&](double x) { return xmax > xmin ? L + (W - L - R) * (x - xmin) / (xmax - xmin) : (L + W - R) / 2; };
    auto py = [&](double y) { return T + (H - T - B) * (ymax - y) / (ymax - ymin); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
        << " " << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
        << xml_escape(title) << "</text>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for (int e = static_cast<int>(ymin); e <= static_cast<int>(ymax); ++e)
        out << "<text x=\"" << L - 6 << "\" y=\"" << svg_num(py(e) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << e << "</text>\n";
    for (long v : n)
        out << "<text x=\"" << svg_num(px(static_cast<double>(v))) << "\" y=\"" << H - B + 16
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << v << "</text>\n";
    out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">n</text>\n";
    if (!n.empty()) {
        out << "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < n.size(); ++i)
            out << (i ? " " : "") << svg_num(px(static_cast<double>(n[i]))) << "," << svg_num(py(ly[i]));
        out << "\"/>\n";
        for (std::size_t i = 0; i < n.size(); ++i)
            out << "<circle cx=\"" << svg_num(px(static_cast<double>(n[i]))) << "\" cy=\"" << svg_num(py(ly[i]))
                << "\" r=\"4\" fill=\"#1f5fbf\"/>\n";
    }
    out << "</svg>\n";
}

void write_kernel_svg(const UniversalityResult& r, std::ostream& out) {
    const long n = r.points.empty() ? 0 : r.points.back().n;
    std::vector<const SweepRow*> rows;
    for (const auto& row : r.rows)
        if (row.n == n) rows.push_back(&row);
    std::vector<Real> zs;
    for (const auto* row : rows)
        if (std::find(zs.begin(), zs.end(), row->z) == zs.end()) zs.push_back(row->z);
    std::sort(zs.begin(), zs.end());
    const std::size_t m = zs.size();

    double lo = 0, hi = 0;
    for (const auto* row : rows) {
        lo = std::min({lo, to_double(row->K_scaled), to_double(row->K_model)});
        hi = std::max({hi, to_double(row->K_scaled), to_double(row->K_model)});
    }
    if (hi <= lo) hi = lo + 1;

    const double cell = m ? std::max(8.0, 200.0 / static_cast<double>(m)) : 10, pad = 40, gap = 40;
    const double side = cell * static_cast<double>(m);
    const double W = 2 * side + gap + 2 * pad, H = side + 2 * pad + 20;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_num(W) << "\" height=\"" << svg_num(H)
        << "\" viewBox=\"0 0 " << svg_num(W) << " " << svg_num(H) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const char* labels[] = {"K_scaled", "K_model"};
    for (int panel = 0; panel < 2; ++panel) {
        const double x0 = pad + panel * (side + gap);
        out << "<text x=\"" << svg_num(x0 + side / 2) << "\" y=\"" << svg_num(pad - 10)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << labels[panel] << " (n = " << n
            << ")</text>\n";
        for (const auto* row : rows) {
            const auto i = std::find(zs.begin(), zs.end(), row->z) - zs.begin();
            const auto j = std::find(zs.begin(), zs.end(), row->zp) - zs.begin();
            const double v = to_double(panel == 0 ? row->K_scaled : row->K_model);
            out << "<rect x=\"" << svg_num(x0 + cell * static_cast<double>(i)) << "\" y=\""
                << svg_num(pad + side - cell * static_cast<double>(j + 1)) << "\" width=\"" << svg_num(cell)
                << "\" height=\"" << svg_num(cell) << "\" fill=\"" << heat((v - lo) / (hi - lo)) << "\"/>\n";
        }
    }
    out << "<text x=\"" << svg_num(W / 2) << "\" y=\"" << svg_num(H - 12)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">color range " << format_double(lo, 3)
        << " to " << format_double(hi, 3) << "; horizontal z, vertical z'</text>\n";
    out << "</svg>\n";
}

std::vector<std::string> emit_outputs(const UniversalityResult& r, const ExperimentConfig& cfg, const std::string& dir) {
    ensure_dir(dir);
    std::vector<std::string> written;
    auto put = [&](const std::string& name, auto&& body) {
        const std::string path = join(dir, name);
        std::ofstream f = open_for_write(path);
        body(f);
        finish(f, path);
        written.push_back(path);
    };
    put("sweep.csv", [&](std::ostream& o) { write_sweep_csv(r, cfg, o); });
    put("sweep_summary.csv", [&](std::ostream& o) { write_sweep_summary_csv(r, o); });
    std::vector<long> ns;
    std::vector<Real> errs;
    for (const auto& p : r.points) {
        ns.push_back(p.n);
        errs.push_back(p.sup_err);
    }
    put("sweep_error.svg", [&](std::ostream& o) { write_error_svg(ns, errs, "sup |K_scaled - K_model| against n", o); });
    put("sweep_kernel.svg", [&](std::ostream& o) { write_kernel_svg(r, o); });
    return written;
}

std::vector<std::string> emit_outputs(const SubcriticalResult& r, const ExperimentConfig& cfg, const std::string& dir) {
    ensure_dir(dir);
    std::vector<std::string> written;
    auto put = [&](const std::string& name, auto&& body) {
        const std::string path = join(dir, name);
        std::ofstream f = open_for_write(path);
        body(f);
        finish(f, path);
        written.push_back(path);
    };
    put("subcritical.csv", [&](std::ostream& o) { write_subcritical_csv(r, cfg, o); });
    put("subcritical_summary.csv", [&](std::ostream& o) { write_subcritical_summary_csv(r, o); });
    std::vector<long> ns;
    std::vector<Real> dev;
    for (const auto& p : r.points) {
        ns.push_back(p.n);
        dev.push_back(abs(p.constant_c2 / p.constant_limit - 1));
    }
    put("subcritical_constant.svg", [&](std::ostream& o) {
        write_error_svg(ns, dev, "|e^{2c*} K(x*,x*) / limit constant - 1| against n", o);
    });
    return written;
}

std::vector<std::string> emit_outputs(const std::vector<IdentityRow>& rows, const std::string& dir) {
    ensure_dir(dir);
    const std::string path = join(dir, "identities.csv");
    std::ofstream f = open_for_write(path);
    write_identities_csv(rows, f);
    finish(f, path);
    return {path};
}

}  // namespace birthcut
