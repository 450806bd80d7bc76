#include "growthlab/report.hpp"

#include "growthlab/errors.hpp"
#include "growthlab/params.hpp"
#include "growthlab/sharp.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace growthlab {

using nlohmann::json;

const char* to_string(Command command) {
    switch (command) {
    case Command::constants:
        return "constants";
    case Command::sharp:
        return "sharp";
    case Command::verify:
        return "verify";
    case Command::rate:
        return "rate";
    case Command::inequalities:
        return "inequalities";
    case Command::l1:
        return "l1";
    case Command::liouville:
        return "liouville";
    }
    return "unknown";
}

std::string format_number(double x) {
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json json_number(double x) {
    if (std::isfinite(x))
        return x;
    return format_number(x);
}

double parse_json_number(const json& j) {
    if (j.is_number())
        return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf")
            return std::numeric_limits<double>::infinity();
        if (s == "-inf")
            return -std::numeric_limits<double>::infinity();
        if (s == "nan")
            return std::numeric_limits<double>::quiet_NaN();
    }
    throw UsageError("not a report number: " + j.dump());
}

json to_json(const CheckReport& r) {
    return {{"name", r.name},
            {"lhs", json_number(r.lhs)},
            {"rhs", json_number(r.rhs)},
            {"margin", json_number(r.margin)},
            {"passed", r.passed},
            {"tolerance", json_number(r.tolerance)}};
}

json to_json(const RateEstimate& e) {
    return {{"regime", to_string(e.regime)},
            {"beta", json_number(e.beta)},
            {"rate", json_number(e.rate)},
            {"fit_residual", json_number(e.fit_residual)},
            {"window", {json_number(e.Rmin), json_number(e.Rmax)}}};
}

json to_json(const GrowthSample& s) {
    return {{"R", json_number(s.R)}, {"logG", json_number(s.logG)}, {"quad_error", json_number(s.quad_error)}};
}

json to_json(const ComparisonConstants& cc) {
    json j = {{"eps", json_number(cc.eps)},
              {"c1", json_number(cc.c1)},
              {"c2", json_number(cc.c2)},
              {"c3", json_number(cc.c3)},
              {"C2", json_number(cc.C2)}};
    if (cc.c4)
        j["c4"] = json_number(*cc.c4);
    if (cc.c5)
        j["c5"] = json_number(*cc.c5);
    if (cc.c6)
        j["c6"] = json_number(*cc.c6);
    return j;
}

void emit_csv(const std::vector<GrowthSample>& samples, std::ostream& out) {
    if (samples.empty())
        throw UsageError("emit_csv: no growth samples to write");
    out << "R,logG,quad_error\n";
    for (const auto& s : samples)
        out << format_number(s.R) << ',' << format_number(s.logG) << ',' << format_number(s.quad_error) << '\n';
}

void emit_csv(const std::vector<CheckReport>& checks, std::ostream& out) {
    if (checks.empty())
        throw UsageError("emit_csv: no check reports to write");
    out << "name,lhs,rhs,margin,passed,tolerance\n";
    for (const auto& c : checks)
        out << c.name << ',' << format_number(c.lhs) << ',' << format_number(c.rhs) << ','
            << format_number(c.margin) << ',' << (c.passed ? "true" : "false") << ','
            << format_number(c.tolerance) << '\n';
}

namespace {

template <class Payload>
void emit_csv_to_path(const Payload& payload, const std::string& path) {
    if (payload.empty())
        throw UsageError("emit_csv: empty payload");
    std::ofstream file(path);
    if (!file)
        throw UsageError("cannot open output file '" + path + "'");
    emit_csv(payload, file);
    if (!file)
        throw UsageError("failed writing output file '" + path + "'");
}

} // namespace

void emit_csv(const std::vector<GrowthSample>& samples, const std::string& path) {
    emit_csv_to_path(samples, path);
}

void emit_csv(const std::vector<CheckReport>& checks, const std::string& path) { emit_csv_to_path(checks, path); }

namespace {

double require(const std::optional<double>& v, const char* field) {
    if (!v)
        throw UsageError(std::string("missing required field --") + field);
    return *v;
}

Params params_from(const RunConfig& cfg) {
    return Params(require(cfg.p, "p"), require(cfg.q, "q"), cfg.mu.value_or(0.0), require(cfg.lambda, "lambda"),
                  cfg.k);
}

SharpExample example_from(const RunConfig& cfg) {
    return build_sharp_example(require(cfg.p, "p"), require(cfg.q, "q"), require(cfg.mu, "mu"));
}

json config_echo(const RunConfig& cfg) {
    json j;
    j["command"] = to_string(cfg.command);
    auto put = [&](const char* key, const std::optional<double>& v) {
        if (v)
            j[key] = json_number(*v);
    };
    put("p", cfg.p);
    put("q", cfg.q);
    put("mu", cfg.mu);
    put("lambda", cfg.lambda);
    j["k"] = cfg.k;
    j["eps"] = cfg.eps;
    put("growth", cfg.growth);
    put("rmin", cfg.rmin);
    put("rmax", cfg.rmax);
    put("r", cfg.r_inner);
    put("R", cfg.r_outer);
    put("h", cfg.h);
    if (!cfg.radii.empty()) {
        j["radii"] = json::array();
        for (double r : cfg.radii)
            j["radii"].push_back(json_number(r));
    }
    j["tolerance"] = {{"absolute", cfg.tolerance.absolute}, {"quad_factor", cfg.tolerance.quad_factor}};
    return j;
}

json constants_block(const Params& prm, double eps) {
    const double C0 = compute_C0(prm);
    const auto ex = derive_exponents(prm);
    json j = {{"C0", json_number(C0)},
              {"C1", json_number(solve_C1(prm.p(), C0))},
              {"p_conj", json_number(ex.p_conj)},
              {"gamma", json_number(ex.gamma)},
              {"beta", json_number(ex.beta)}};
    j["comparison"] = to_json(comparison_constants(prm, eps));
    return j;
}

json example_block(const SharpExample& ex) {
    return {{"a", json_number(ex.a)},
            {"c", json_number(ex.c)},
            {"lambda", json_number(ex.params.lambda())},
            {"beta", json_number(ex.beta)},
            {"s0", json_number(ex.s0)},
            {"t0", json_number(ex.t0)},
            {"expected_rate", json_number(ex.expected_rate)},
            {"theorem_bound", json_number(ex.theorem_bound())},
            {"potential_safe_radius", json_number(ex.potential.safe_radius)},
            {"model", ex.model.warp.describe()},
            {"profile", ex.profile.describe()}};
}

std::vector<double> rate_radii(const RunConfig& cfg, const SharpExample& ex) {
    if (!cfg.radii.empty())
        return cfg.radii;
    if (!cfg.rmin && !cfg.rmax)
        return default_rate_radii(ex, cfg.nr);
    if (ex.critical()) {
        const double hi = cfg.rmax.value_or(1e6);
        const double lo = cfg.rmin.value_or(hi / 1e3);
        return log_spaced(lo, hi, cfg.nr);
    }
    const double hi = cfg.rmax ? *cfg.rmax : default_rate_radii(ex, cfg.nr).back();
    const double lo = cfg.rmin.value_or(std::max(ex.t0 + 1.0, 0.2 * hi));
    if (!(hi > lo) || cfg.nr < 2)
        throw UsageError("rate radii: need rmin < rmax and nr >= 2");
    std::vector<double> out;
    for (int i = 0; i < cfg.nr; ++i)
        out.push_back(lo + (hi - lo) * i / (cfg.nr - 1));
    return out;
}

CheckReport rate_check(const RunConfig& cfg, const SharpExample& ex, const RateEstimate& est) {
    const double tol = cfg.rate_tol.value_or(ex.critical() ? 0.005 : 0.01);
    const double rel = std::abs(est.rate - ex.expected_rate) / ex.expected_rate;
    return {"rate", est.rate, ex.expected_rate, -rel, rel <= tol, tol};
}

void add_rate(Report& rep, const RunConfig& cfg, const SharpExample& ex) {
    const auto radii = rate_radii(cfg, ex);
    rep.samples = sample_growth(ex.model, ex.profile, ex.params.q(), ex.s0, radii);
    const auto est = ex.critical() ? estimate_rate(rep.samples, RateRegime::logarithmic)
                                   : estimate_rate(rep.samples, RateRegime::power, ex.beta);
    json rate = to_json(est);
    rate["expected"] = json_number(ex.expected_rate);
    rep.body["rate"] = rate;
    rep.checks.push_back(rate_check(cfg, ex, est));
    json samples = json::array();
    for (const auto& s : rep.samples)
        samples.push_back(to_json(s));
    rep.body["samples"] = samples;
}

void run_verify(Report& rep, const RunConfig& cfg, const SharpExample& ex) {
    const double hi = cfg.rmax.value_or(1e3);
    const double lo = cfg.rmin.value_or(ex.t0 + 0.1);
    if (!(hi > lo))
        throw UsageError("verify: need rmin < rmax");
    const int count = cfg.nr > 8 ? cfg.nr : 200;
    std::vector<double> grid;
    for (int i = 0; i < count; ++i)
        grid.push_back(lo + (hi - lo) * i / (count - 1));

    Potential V = ex.potential;
    if (cfg.potential_scale != 1.0) {
        const double scale = cfg.potential_scale;
        V.eval = [inner = ex.potential.eval, scale](double r) { return scale * inner(r); };
    }
    const double signed_res = subsolution_residual(ex.model, ex.profile, V, ex.params.p(), ex.s0, grid);
    const double abs_res = max_abs_equation_residual(ex.model, ex.profile, V, ex.params.p(), ex.s0, grid);
    double fd = 0.0;
    for (double r : grid) {
        fd = std::max(fd, fd_cross_check(ex.model, ex.profile, ex.params.p(), r, fd_default_step(ex.profile, r)));
    }
    rep.checks.push_back({"subsolution_residual", signed_res, cfg.residual_tol, cfg.residual_tol - signed_res,
                          signed_res <= cfg.residual_tol, 0.0});
    rep.checks.push_back({"equation_residual", abs_res, cfg.residual_tol, cfg.residual_tol - abs_res,
                          abs_res <= cfg.residual_tol, 0.0});
    rep.checks.push_back({"fd_cross_check", fd, cfg.fd_tol, cfg.fd_tol - fd, fd <= cfg.fd_tol, 0.0});
    rep.body["grid"] = {{"rmin", lo}, {"rmax", hi}, {"count", count}};
}

void run_inequalities(Report& rep, const RunConfig& cfg, const SharpExample& ex) {
    std::vector<CheckPoint> points;
    if (cfg.r_inner || cfg.r_outer || cfg.h) {
        const double inner = require(cfg.r_inner, "r");
        const double outer = require(cfg.r_outer, "R");
        const double h = cfg.h.value_or(std::pow(inner, ex.params.mu() / ex.params.p()));
        points.push_back({inner, outer, h});
    } else {
        points = default_check_points(ex);
    }
    for (const auto& pt : points) {
        rep.checks.push_back(check_phi_lower_bound(ex, pt.inner, pt.outer, {}, cfg.tolerance));
        rep.checks.push_back(check_caccioppoli(ex, pt.inner, pt.h, cfg.tolerance));
        rep.checks.push_back(check_prop_pgp(ex, pt.inner, pt.outer, cfg.tolerance));
    }
}

void run_l1(Report& rep, const RunConfig& cfg) {
    const double p = require(cfg.p, "p");
    const double q = require(cfg.q, "q");
    std::optional<ModelManifold> model;
    std::optional<RadialProfile> profile;
    double s0 = 0.0;
    if (cfg.source == "rn") {
        model = ModelManifold::euclidean(cfg.n);
        profile = RadialProfile::p_harmonic_rn(cfg.n, p);
    } else if (cfg.source == "sharp") {
        auto ex = build_sharp_example(p, q, cfg.mu.value_or(p));
        model = ex.model;
        profile = ex.profile;
        s0 = ex.s0;
    } else {
        throw UsageError("l1: --source must be rn or sharp");
    }
    const auto radii = cfg.radii.empty() ? log_spaced(cfg.rmin.value_or(1e4), cfg.rmax.value_or(1e8), 9) : cfg.radii;
    const auto slope = estimate_sphere_log_slope(*model, *profile, q, s0, radii);
    // R^n: w vanishes on the initial ball {v <= s0}, so phi is +inf there. The
    // sharp models start at t_min with no origin ball, and the divergence
    // question is posed beyond t0.
    const bool initial_ball_empty = cfg.source == "rn" && profile->log_excess(profile->t_min(), s0) ==
                                                              -std::numeric_limits<double>::infinity();
    const auto verdict = classify_l1_condition(slope.rate, p, initial_ball_empty);
    rep.body["l1"] = {{"source", cfg.source},
                      {"sphere_log_slope", json_number(slope.rate)},
                      {"phi_exponent", json_number(phi_exponent(slope.rate, p))},
                      {"phi_infinite_near_origin", initial_ball_empty},
                      {"verdict", to_string(verdict)},
                      {"fit", to_json(slope)}};
}

} // namespace

Report run(const RunConfig& cfg) {
    Report rep;
    rep.body["config"] = config_echo(cfg);
    json provenance = json::array();

    switch (cfg.command) {
    case Command::constants: {
        const auto prm = params_from(cfg);
        rep.body["constants"] = constants_block(prm, cfg.eps);
        provenance.push_back("sharp growth constant C0 and root equation for C1");
        provenance.push_back("comparison constants of the differential inequality for G and H");
        break;
    }
    case Command::liouville: {
        const auto prm = params_from(cfg);
        const double C = require(cfg.growth, "growth");
        rep.body["constants"] = constants_block(prm, cfg.eps);
        rep.body["verdict"] = to_string(liouville_check(prm, C));
        provenance.push_back("Liouville threshold C < C0 for solutions with exp(C R) growth");
        break;
    }
    case Command::sharp: {
        const auto ex = example_from(cfg);
        rep.body["example"] = example_block(ex);
        rep.body["constants"] = constants_block(ex.params, cfg.eps);
        provenance.push_back("extremal model manifold, profile and potential with (a, c) on the sharp line");
        if (cfg.with_rate) {
            add_rate(rep, cfg, ex);
            provenance.push_back("log-domain ball integrals and least-squares tail rate");
        }
        break;
    }
    case Command::rate: {
        const auto ex = example_from(cfg);
        rep.body["example"] = example_block(ex);
        add_rate(rep, cfg, ex);
        provenance.push_back("log-domain ball integrals and least-squares tail rate");
        break;
    }
    case Command::verify: {
        const auto ex = example_from(cfg);
        rep.body["example"] = example_block(ex);
        run_verify(rep, cfg, ex);
        provenance.push_back("radial p-Laplacian on a model manifold against the extremal potential");
        break;
    }
    case Command::inequalities: {
        const auto ex = example_from(cfg);
        rep.body["example"] = example_block(ex);
        rep.body["constants"] = constants_block(ex.params, cfg.eps);
        run_inequalities(rep, cfg, ex);
        provenance.push_back("integrated lower bound for G + weighted H");
        provenance.push_back("cutoff estimate between G(R+h) and H(R)");
        provenance.push_back("energy bound by the sphere-integral capacity term");
        break;
    }
    case Command::l1: {
        run_l1(rep, cfg);
        provenance.push_back("divergence of the sphere-integral capacity term");
        break;
    }
    }

    json checks = json::array();
    for (const auto& c : rep.checks) {
        checks.push_back(to_json(c));
        rep.passed = rep.passed && c.passed;
    }
    rep.body["checks"] = checks;
    rep.body["passed"] = rep.passed;
    rep.body["provenance"] = provenance;
    return rep;
}

int exit_status(const Report& report) { return report.passed ? 0 : 1; }

namespace {

void write_report(const Report& rep, const RunConfig& cfg, std::ostream& out) {
    if (cfg.format == OutputFormat::csv) {
        const bool use_samples = cfg.command == Command::rate || rep.checks.empty();
        if (cfg.output) {
            if (use_samples)
                emit_csv(rep.samples, *cfg.output);
            else
                emit_csv(rep.checks, *cfg.output);
        } else if (use_samples) {
            emit_csv(rep.samples, out);
        } else {
            emit_csv(rep.checks, out);
        }
        return;
    }
    const auto text = rep.body.dump(2);
    if (cfg.output) {
        std::ofstream file(*cfg.output);
        if (!file)
            throw UsageError("cannot open output file '" + *cfg.output + "'");
        file << text << '\n';
        if (!file)
            throw UsageError("failed writing output file '" + *cfg.output + "'");
    } else {
        out << text << '\n';
    }
}

} // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    if (const char* env = std::getenv("GROWTHLAB_TOL")) {
        try {
            cfg.tolerance.absolute = std::stod(env);
        } catch (const std::exception&) {
            err << "error: GROWTHLAB_TOL is not a number: " << env << '\n';
            return 2;
        }
        if (!(cfg.tolerance.absolute >= 0.0)) {
            err << "error: GROWTHLAB_TOL must be non-negative\n";
            return 2;
        }
    }

    CLI::App app{"Growth-constant laboratory for p-Laplacian subsolutions on model manifolds"};
    app.set_config("--config", "", "Read options from a file of `key = value` lines");
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);

    app.add_option("--p", cfg.p, "Operator exponent p > 1");
    app.add_option("--q", cfg.q, "Integral exponent q > p - 1");
    app.add_option("--mu", cfg.mu, "Potential decay exponent in [0, p]");
    app.add_option("--lambda", cfg.lambda, "Potential level lambda > 0");
    app.add_option("--k", cfg.k, "Coercivity constant k > 0");
    app.add_option("--eps", cfg.eps, "Relaxation of lambda in the comparison constants");
    app.add_option("--growth", cfg.growth, "Claimed exponential growth rate C (liouville)");
    app.add_flag("--rate", cfg.with_rate, "Also measure the growth rate (sharp)");
    app.add_option("--radii", cfg.radii, "Explicit radii, comma separated")->delimiter(',');
    app.add_option("--rmin", cfg.rmin, "Smallest radius");
    app.add_option("--rmax", cfg.rmax, "Largest radius");
    app.add_option("--nr", cfg.nr, "Number of radii")->check(CLI::Range(2, 100000));
    app.add_option("--r", cfg.r_inner, "Inner radius for the inequality suite");
    app.add_option("--R", cfg.r_outer, "Outer radius for the inequality suite");
    app.add_option("--h", cfg.h, "Cutoff width for the cutoff estimate");
    app.add_option("--n", cfg.n, "Dimension of the R^n example (l1)")->check(CLI::PositiveNumber);
    app.add_option("--source", cfg.source, "Example for l1: rn or sharp")->check(CLI::IsMember({"rn", "sharp"}));
    app.add_option("--potential-scale", cfg.potential_scale, "Multiply the potential by this factor (verify)");
    app.add_option("--output,-o", cfg.output, "Output file (stdout when omitted)");
    std::string format = "json";
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--tol", cfg.tolerance.absolute, "Absolute tolerance of the inequality checks");
    app.add_option("--quad-factor", cfg.tolerance.quad_factor, "Multiplier of quadrature error in tolerances");
    app.add_option("--rate-tol", cfg.rate_tol, "Relative tolerance of the rate check");

    const std::pair<Command, const char*> commands[] = {
        {Command::constants, "Sharp constants C0, C1 and the comparison constants"},
        {Command::sharp, "Build the extremal example; --rate measures its growth"},
        {Command::verify, "Check the extremal example solves the equation"},
        {Command::rate, "Sample ball integrals and fit the growth rate"},
        {Command::inequalities, "Run the integral inequality suite on the extremal example"},
        {Command::l1, "Sphere-integral divergence condition"},
        {Command::liouville, "Liouville threshold for a claimed growth rate"},
    };
    for (const auto& [cmd, help] : commands) {
        auto* sub = app.add_subcommand(to_string(cmd), help);
        sub->fallthrough();
        sub->callback([&cfg, c = cmd] { cfg.command = c; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    cfg.format = format == "csv" ? OutputFormat::csv : OutputFormat::json;
    for (std::size_t i = 1; i < cfg.radii.size(); ++i) {
        if (!(cfg.radii[i] > cfg.radii[i - 1])) {
            err << "error: --radii must be strictly increasing\n";
            return 2;
        }
    }

    try {
        const auto rep = run(cfg);
        write_report(rep, cfg, out);
        return exit_status(rep);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const QuadratureError& e) {
        err << "error: " << e.what() << " (partial log value " << format_number(e.partial_log_value()) << ")\n";
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
    }
    return 2;
}

} // namespace growthlab
