#include "cli_app.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qosc/benchmark_solver.hpp"
#include "qosc/errors.hpp"
#include "qosc/ironing_solver.hpp"
#include "qosc/market_sim.hpp"
#include "qosc/oracle.hpp"
#include "qosc/regular_solver.hpp"

namespace qosc::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

struct MissingArtifact : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Collected flag values; optionals override the config file.
struct Options {
    std::string config;
    std::optional<double> a, sigma, q_bar;
    std::string dist;
    std::optional<std::uint64_t> seed;
    std::string out;
    int grid_n = 512;

    bool general = false;
    std::string menu;
    int m = 256;
    int probe_trials = 0;
    std::size_t users = 100000;
    int menu_resolution = 256;
    std::string per_user;
    std::string tie_break = "lowest-price";
    std::string param;
    std::vector<double> values;
    std::string histogram;
    std::optional<double> fit_lo, fit_hi;
};

struct Context {
    ModelParams params;
    std::optional<TypeDistribution> dist;
    json dist_json;
    std::uint64_t seed = 7;
    fs::path out = "out";
    int grid_n = 512;
};

json case_study_dist() {
    return json{{"kind", "exponential"}, {"rate", 0.952}, {"support", {0.0, 4.0}}};
}

json load_dist_arg(const std::string& s) {
    if (!s.empty() && s.front() == '{') {
        try {
            return json::parse(s);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("--dist: ") + e.what());
        }
    }
    if (!fs::exists(s)) throw ConfigError("--dist: no such file " + s);
    return io::read_json_file(s);
}

Context build_context(const Options& o) {
    json cfg = json::object();
    if (!o.config.empty()) {
        if (!fs::exists(o.config)) throw ConfigError("config file not found: " + o.config);
        cfg = io::read_json_file(o.config);
        if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    }
    Context ctx;
    ctx.dist_json = !o.dist.empty() ? load_dist_arg(o.dist)
                    : cfg.contains("dist") ? cfg.at("dist")
                                           : case_study_dist();
    ctx.dist.emplace(io::dist_from_json(ctx.dist_json));

    json pj = cfg.contains("params") ? cfg.at("params")
                                     : json{{"a", 0.47}, {"sigma", 0.16}, {"q_bar", 5.0}};
    if (o.a) pj["a"] = *o.a;
    if (o.sigma) pj["sigma"] = *o.sigma;
    if (o.q_bar) {
        pj.erase("qbar");
        pj["q_bar"] = *o.q_bar;
    }
    if (!o.dist.empty()) {
        pj.erase("delta_lo");
        pj.erase("delta_hi");
    }
    ctx.params = io::params_from_json(pj, &*ctx.dist);
    try {
        ctx.params.check_support(*ctx.dist);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("params and dist disagree: ") + e.what());
    }
    ctx.seed = o.seed ? *o.seed : cfg.value("seed", std::uint64_t{7});
    ctx.out = !o.out.empty() ? fs::path(o.out) : fs::path(cfg.value("out", std::string("out")));
    ctx.grid_n = cfg.value("grid_n", o.grid_n);
    if (ctx.grid_n < 16) throw ConfigError("grid_n must be >= 16");
    return ctx;
}

json vec_pairs(const std::vector<std::pair<double, double>>& v) {
    json j = json::array();
    for (const auto& [s, e] : v) j.push_back({s, e});
    return j;
}

struct Solved {
    ContractMenu menu;
    std::string route;
    bool reputation_binding = true;
    std::vector<std::string> warnings;
    json extra = json::object();
};

json certificates_json(const std::vector<IntervalCertificate>& certs) {
    json j = json::array();
    for (const auto& c : certs)
        j.push_back(json{{"index", c.index}, {"start", c.start}, {"end", c.end},
                         {"level", c.level}, {"integral_residual", c.integral_residual},
                         {"kind", to_string(c.kind)}, {"gap_start", c.gap_start},
                         {"gap_end", c.gap_end}, {"endpoint_ok", c.endpoint_ok}});
    return j;
}

Solved route_solve(const Context& ctx, bool general) {
    const auto& dist = *ctx.dist;
    const auto reg = regularity_check(dist);
    Solved s;
    s.extra["regularity"] = json{{"regular", reg.regular},
                                 {"violating_intervals", vec_pairs(reg.violating_intervals)}};
    if (!general && reg.regular) {
        auto r = solve_regular(ctx.params, dist, ctx.grid_n);
        s.menu = std::move(r.menu);
        s.route = "regular";
        s.reputation_binding = r.reputation_binding;
        s.warnings = std::move(r.warnings);
        return s;
    }
    auto r = solve_general(ctx.params, dist, ctx.grid_n);
    s.route = r.menu.provenance == Provenance::FullPooling ? "full_pooling" : "ironing";
    s.extra["merge_count"] = r.merge_count;
    s.extra["interval_certificates"] = certificates_json(r.interval_certificates);
    s.menu = std::move(r.menu);
    s.warnings = std::move(r.warnings);
    return s;
}

// Menu, meta and verification paths for an --out that is a directory or a .csv.
struct ArtifactPaths {
    fs::path menu, meta, verification;
};

ArtifactPaths artifact_paths(const fs::path& out, const std::string& stem) {
    if (out.extension() == ".csv") {
        fs::path v = out;
        v.replace_extension(".verification.json");
        return {out, io::meta_path_for(out), v};
    }
    return {out / (stem + ".csv"), out / (stem + ".meta.json"), out / "verification.json"};
}

bool report_passes(const VerificationReport& r, const ContractMenu& menu) {
    // Full-information menus are not meant to be incentive compatible.
    if (menu.provenance == Provenance::FullInfoBenchmark)
        return r.monotone && r.min_ir_slack >= -1e-9 && std::abs(r.reputation_residual) <= 1e-6;
    return r.passes();
}

json verification_json(const VerificationReport& r, const ContractMenu& menu) {
    json j = io::report_to_json(r);
    j["passes"] = report_passes(r, menu);
    return j;
}

VerificationReport write_solution(const Context& ctx, const Solved& s, const fs::path& out,
                                  const std::string& stem, json meta_extra = json::object()) {
    const auto paths = artifact_paths(out, stem);
    const auto report = verify(ctx.params, *ctx.dist, s.menu);
    json meta = io::menu_meta(s.menu);
    meta["route"] = s.route;
    meta["reputation_binding"] = s.reputation_binding;
    meta["warnings"] = s.warnings;
    meta["params"] = io::params_to_json(ctx.params);
    meta["dist"] = ctx.dist_json;
    for (auto it = s.extra.begin(); it != s.extra.end(); ++it) meta[it.key()] = it.value();
    for (auto it = meta_extra.begin(); it != meta_extra.end(); ++it) meta[it.key()] = it.value();
    io::write_menu_csv(paths.menu, s.menu, s.route != "regular" && s.route != "benchmark");
    io::write_json(paths.meta, meta);
    io::write_json(paths.verification, verification_json(report, s.menu));
    return report;
}

json infeasible_diagnostic(const Context& ctx, const std::string& what) {
    json j{{"error", "infeasible"}, {"message", what}, {"params", io::params_to_json(ctx.params)},
           {"dist", ctx.dist_json}};
    try {
        const double bmin = beta_lower_bound(*ctx.dist);
        j["beta_lower_bound"] = bmin;
        j["min_attainable_mean_qos"] = reputation_integral(ctx.params, *ctx.dist, bmin);
    } catch (const std::exception&) {
    }
    return j;
}

int cmd_solve(const Options& o, std::ostream& out) {
    const auto ctx = build_context(o);
    Solved s;
    try {
        s = route_solve(ctx, o.general);
    } catch (const InfeasibleError& e) {
        const auto diag = infeasible_diagnostic(ctx, e.what());
        const fs::path dir = ctx.out.extension() == ".csv" ? ctx.out.parent_path() : ctx.out;
        io::write_json(dir / "diagnostic.json", diag);
        out << diag.dump(2) << "\n";
        return kInfeasible;
    }
    const auto report = write_solution(ctx, s, ctx.out, "menu");
    json summary{{"route", s.route}, {"beta", s.menu.beta},
                 {"reputation_binding", s.reputation_binding},
                 {"verification", verification_json(report, s.menu)}};
    out << summary.dump(2) << "\n";
    return report_passes(report, s.menu) ? kOk : kNumericError;
}

int cmd_benchmark(const Options& o, std::ostream& out) {
    const auto ctx = build_context(o);
    const auto b = solve_full_info(ctx.params, *ctx.dist, ctx.grid_n);
    const auto cost = information_cost_detail(ctx.params, *ctx.dist, ctx.grid_n);
    const double mass = ctx.dist->support_mass();
    Solved s;
    s.menu = b.menu;
    s.route = "benchmark";
    s.reputation_binding = b.reputation_binding;
    json extra{{"information_cost",
                json{{"full_info_profit", cost.full_info_profit},
                     {"hidden_profit", cost.hidden_profit},
                     {"cost", cost.cost},
                     {"full_info_per_user", cost.full_info_profit / mass},
                     {"hidden_per_user", cost.hidden_profit / mass}}}};
    const auto report = write_solution(ctx, s, ctx.out, "benchmark", extra);
    extra["verification"] = verification_json(report, s.menu);
    extra["beta"] = b.beta;
    out << extra.dump(2) << "\n";
    return report_passes(report, s.menu) ? kOk : kNumericError;
}

ContractMenu load_menu(const std::string& path) {
    if (path.empty()) throw ConfigError("--menu is required");
    if (!fs::exists(path)) throw MissingArtifact("menu file not found: " + path);
    return io::read_menu_csv(path);
}

int cmd_verify(const Options& o, std::ostream& out) {
    const auto ctx = build_context(o);
    const auto menu = load_menu(o.menu);
    const auto report = verify(ctx.params, *ctx.dist, menu);
    const auto j = verification_json(report, menu);
    if (!o.out.empty()) io::write_json(ctx.out / "verification.json", j);
    out << j.dump(2) << "\n";
    return report_passes(report, menu) ? kOk : kNumericError;
}

int cmd_oracle(const Options& o, std::ostream& out) {
    const auto ctx = build_context(o);
    if (o.m < 2) throw ConfigError("--m must be >= 2");
    const auto inst = discretize(ctx.params, *ctx.dist, o.m);
    const auto sol = solve_discrete(inst);
    const auto hidden = solve_hidden(ctx.params, *ctx.dist, ctx.grid_n);
    const auto report = verify(ctx.params, *ctx.dist, hidden);
    const double analytic = report.expected_profit / report.support_mass;
    json j{{"m", o.m},
           {"oracle_profit", sol.profit},
           {"multiplier", sol.multiplier},
           {"iterations", sol.iterations},
           {"analytic_profit", analytic},
           {"relative_gap", (analytic - sol.profit) / std::abs(analytic)}};
    if (o.probe_trials > 0)
        j["probe_improvement"] = adversarial_probe(hidden, inst, *ctx.dist, o.probe_trials, ctx.seed);
    std::string csv = "delta,mass,q,p\n";
    for (std::size_t i = 0; i < inst.types.size(); ++i)
        csv += fmt::format("{},{},{},{}\n", io::format_double(inst.types[i]),
                           io::format_double(inst.masses[i]), io::format_double(sol.q[i]),
                           io::format_double(sol.p[i]));
    io::write_text(ctx.out / "oracle.csv", csv);
    io::write_json(ctx.out / "oracle.json", j);
    out << j.dump(2) << "\n";
    return kOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
    const auto ctx = build_context(o);
    const ContractMenu menu =
        o.menu.empty() ? solve_hidden(ctx.params, *ctx.dist, ctx.grid_n) : load_menu(o.menu);
    SimConfig cfg;
    cfg.n_users = o.users;
    cfg.seed = ctx.seed;
    cfg.menu_resolution = o.menu_resolution;
    if (o.tie_break == "truthful")
        cfg.tie_break = TieBreak::Truthful;
    else if (o.tie_break != "lowest-price")
        throw ConfigError("--tie-break must be lowest-price or truthful");
    if (menu.provenance == Provenance::FullInfoBenchmark) cfg.choice = ChoiceRule::Assigned;
    cfg.record_users = !o.per_user.empty();
    if (cfg.n_users < 1 || cfg.menu_resolution < 2)
        throw ConfigError("--users must be >= 1 and --menu-resolution >= 2");
    const auto res = simulate(menu, *ctx.dist, ctx.params, cfg);
    const auto report = verify(ctx.params, *ctx.dist, menu);
    json j{{"n_users", cfg.n_users},
           {"seed", cfg.seed},
           {"menu_resolution", cfg.menu_resolution},
           {"realized_profit", res.realized_profit},
           {"profit_std_error", res.profit_std_error},
           {"expected_profit_per_user", report.expected_profit / report.support_mass},
           {"truthfulness_rate", res.truthfulness_rate},
           {"mean_user_payoff", res.mean_user_payoff},
           {"participation_rate", res.participation_rate},
           {"per_type_histogram", res.per_type_histogram}};
    io::write_json(ctx.out / "simulation.json", j);
    if (!o.per_user.empty()) {
        std::string csv = "delta,choice_index,q,p,payoff\n";
        for (const auto& u : res.users)
            csv += fmt::format("{},{},{},{},{}\n", io::format_double(u.delta), u.choice_index,
                               io::format_double(u.q), io::format_double(u.p),
                               io::format_double(u.payoff));
        io::write_text(o.per_user, csv);
    }
    out << j.dump(2) << "\n";
    return kOk;
}

struct SweepPoint {
    int code = kOk;
    std::string error;
    ContractMenu menu;
    double beta = 0.0;
    double expected_profit = 0.0;
    bool passes = false;
};

int classify(const std::exception_ptr& ep, std::string& msg);

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
    static const std::vector<std::string> allowed{"a", "sigma", "q_bar", "rate"};
    if (std::find(allowed.begin(), allowed.end(), o.param) == allowed.end())
        throw ConfigError("--param must be one of a, sigma, q_bar, rate");
    if (o.values.empty()) throw ConfigError("--values is empty");
    const auto base = build_context(o);
    if (o.param == "rate" && base.dist_json.value("kind", "") != "exponential")
        throw ConfigError("sweeping rate needs an exponential distribution");

    auto dir_for = [&](double v) { return base.out / (o.param + "_" + io::format_double(v)); };
    auto run_point = [&](double v) {
        SweepPoint pt;
        try {
            Context ctx = base;
            if (o.param == "a") ctx.params.a = v;
            if (o.param == "sigma") ctx.params.sigma = v;
            if (o.param == "q_bar") ctx.params.q_bar = v;
            if (o.param == "rate") {
                ctx.dist_json["rate"] = v;
                ctx.dist.emplace(io::dist_from_json(ctx.dist_json));
            }
            ctx.params.validate();
            const auto s = route_solve(ctx, false);
            const auto report = write_solution(ctx, s, dir_for(v), "menu");
            pt.menu = s.menu;
            pt.beta = s.menu.beta;
            pt.expected_profit = report.expected_profit;
            pt.passes = report_passes(report, s.menu);
        } catch (...) {
            pt.code = classify(std::current_exception(), pt.error);
        }
        return pt;
    };
    std::vector<std::future<SweepPoint>> jobs;
    for (double v : o.values) jobs.push_back(std::async(std::launch::async, run_point, v));
    std::vector<SweepPoint> points;
    for (auto& j : jobs) points.push_back(j.get());

    json summary = json::array();
    int code = kOk;
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto& pt = points[k];
        if (pt.code != kOk) {
            err << fmt::format("sweep {}={}: {}\n", o.param, io::format_double(o.values[k]), pt.error);
            if (code == kOk) code = pt.code;
            continue;
        }
        summary.push_back(json{{"value", o.values[k]}, {"beta", pt.beta},
                               {"expected_profit", pt.expected_profit}, {"passes", pt.passes}});
        if (!pt.passes && code == kOk) code = kNumericError;
    }
    io::write_json(base.out / "sweep.json", summary);
    if (code != kOk && code != kNumericError) return code;
    for (const auto& pt : points)
        if (pt.code != kOk) return pt.code;

    std::string csv = "param_value,delta,q,p,U\n";
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto& m = points[k].menu;
        const auto v = io::format_double(o.values[k]);
        for (std::size_t i = 0; i < m.grid.size(); ++i)
            csv += fmt::format("{},{},{},{},{}\n", v, io::format_double(m.grid[i]),
                               io::format_double(m.q[i]), io::format_double(m.p[i]),
                               io::format_double(m.grid[i] * m.q[i] - m.p[i]));
    }
    io::write_text(base.out / "sweep.csv", csv);
    out << summary.dump(2) << "\n";
    return code;
}

int cmd_fit_dist(const Options& o, std::ostream& out) {
    if (o.histogram.empty()) throw ConfigError("--histogram is required");
    if (!fs::exists(o.histogram)) throw MissingArtifact("histogram not found: " + o.histogram);
    const auto bins = io::read_histogram_csv(o.histogram);
    const auto d = (o.fit_lo || o.fit_hi)
        ? fit_exponential(bins, o.fit_lo.value_or(0.0),
                          o.fit_hi.value_or(std::max_element(bins.begin(), bins.end(),
                                                             [](const auto& x, const auto& y) {
                                                                 return x.bin_center < y.bin_center;
                                                             })->bin_center))
        : fit_exponential(bins);
    const auto dj = io::dist_to_json(d);
    json j{{"rate", dj.at("rate")}, {"dist", dj}};
    if (!o.out.empty()) io::write_json(fs::path(o.out) / "fitted_dist.json", dj);
    out << j.dump(2) << "\n";
    return kOk;
}

int cmd_report(const Options& o, std::ostream& out) {
    const auto menu = load_menu(o.menu);
    const fs::path dir = o.out.empty() ? fs::path(o.menu).parent_path() : fs::path(o.out);
    // Calibrate once against the reference instance, independent of the menu.
    const ModelParams ref{0.47, 0.16, 5.0, 0.0, 4.0};
    const auto ref_menu =
        solve_regular(ref, TypeDistribution::exponential(0.952, 0.0, 4.0)).menu;
    const auto [qmin, qmax] = std::minmax_element(ref_menu.q.begin(), ref_menu.q.end());
    const auto map = VrMapping::calibrated(*qmin, *qmax);
    std::string csv = "delta,q,p,resolution,delay_s,reliability\n";
    for (std::size_t i = 0; i < menu.grid.size(); ++i) {
        const auto v = map.map(menu.q[i]);
        csv += fmt::format("{},{},{},{},{},{}\n", io::format_double(menu.grid[i]),
                           io::format_double(menu.q[i]), io::format_double(menu.p[i]),
                           io::format_double(v.resolution), io::format_double(v.delay_s),
                           io::format_double(v.reliability));
    }
    io::write_text(dir / "report.csv", csv);
    io::write_json(dir / "report.meta.json", map.to_json());
    out << map.to_json().dump(2) << "\n";
    return kOk;
}

int classify(const std::exception_ptr& ep, std::string& msg) {
    try {
        std::rethrow_exception(ep);
    } catch (const InfeasibleError& e) {
        msg = std::string("infeasible: ") + e.what();
        return kInfeasible;
    } catch (const MissingArtifact& e) {
        msg = e.what();
        return kInfeasible;
    } catch (const ConfigError& e) {
        msg = std::string("config error: ") + e.what();
        return kConfigError;
    } catch (const DomainError& e) {
        msg = std::string("invalid input: ") + e.what();
        return kConfigError;
    } catch (const json::exception& e) {
        msg = std::string("config error: ") + e.what();
        return kConfigError;
    } catch (const std::ios_base::failure& e) {
        msg = std::string("io error: ") + e.what();
        return kConfigError;
    } catch (const std::exception& e) {
        msg = std::string("numeric failure: ") + e.what();
        return kNumericError;
    }
}

}  // namespace

VrMapping VrMapping::calibrated(double q_min, double q_max) {
    VrMapping m;
    m.q_min = q_min;
    m.q_max = q_max;
    const double up = q_max - m.anchor_q, down = m.anchor_q - q_min;
    if (!(up > 0.0 && down > 0.0))
        throw DomainError("calibration range must straddle the anchor");
    m.resolution_slope = std::min((m.resolution_max - m.resolution_anchor) / up,
                                  (m.resolution_anchor - m.resolution_min) / down);
    m.delay_slope = -std::min((m.delay_anchor - m.delay_min) / up,
                              (m.delay_max - m.delay_anchor) / down);
    m.reliability_slope = std::min((m.reliability_max - m.reliability_anchor) / up,
                                   (m.reliability_anchor - m.reliability_min) / down);
    return m;
}

VrMetrics VrMapping::map(double q) const {
    const double d = q - anchor_q;
    return {std::clamp(resolution_anchor + resolution_slope * d, resolution_min, resolution_max),
            std::clamp(delay_anchor + delay_slope * d, delay_min, delay_max),
            std::clamp(reliability_anchor + reliability_slope * d, reliability_min,
                       reliability_max)};
}

json VrMapping::to_json() const {
    return json{{"anchor_q", anchor_q},
                {"anchor", {{"resolution", resolution_anchor}, {"delay_s", delay_anchor},
                            {"reliability", reliability_anchor}}},
                {"ranges", {{"resolution", {resolution_min, resolution_max}},
                            {"delay_s", {delay_min, delay_max}},
                            {"reliability", {reliability_min, reliability_max}}}},
                {"slopes", {{"resolution", resolution_slope}, {"delay_s", delay_slope},
                            {"reliability", reliability_slope}}},
                {"calibration_q_range", {q_min, q_max}}};
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Contract menus for QoS-differentiated sensing services"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--config", o.config, "JSON run config");
    app.add_option("--a", o.a, "cost curvature");
    app.add_option("--sigma", o.sigma, "cost scale");
    app.add_option("--qbar", o.q_bar, "mean QoS target");
    app.add_option("--dist", o.dist, "distribution JSON (inline or file)");
    app.add_option("--seed", o.seed, "RNG seed");
    app.add_option("--out", o.out, "output directory (solve also accepts a .csv path)");
    app.add_option("--grid", o.grid_n, "menu grid points");

    auto* solve = app.add_subcommand("solve", "solve the hidden-information menu");
    solve->add_flag("--general", o.general, "force the ironing solver");
    app.add_subcommand("benchmark", "solve the full-information benchmark");
    auto* ver = app.add_subcommand("verify", "check IC, IR and reputation for a menu CSV");
    ver->add_option("--menu", o.menu)->required();
    auto* orc = app.add_subcommand("oracle", "solve the discretized program");
    orc->add_option("--m", o.m, "number of types");
    orc->add_option("--probe", o.probe_trials, "adversarial probe trials");
    auto* sim = app.add_subcommand("simulate", "Monte-Carlo deployment of a menu");
    sim->add_option("--users", o.users);
    sim->add_option("--menu-resolution", o.menu_resolution);
    sim->add_option("--menu", o.menu, "menu CSV (default: solve)");
    sim->add_option("--per-user", o.per_user, "per-user CSV path");
    sim->add_option("--tie-break", o.tie_break, "lowest-price or truthful");
    auto* sw = app.add_subcommand("sweep", "solve over a list of parameter values");
    sw->add_option("--param", o.param)->required();
    sw->add_option("--values", o.values)->required()->delimiter(',');
    auto* fit = app.add_subcommand("fit-dist", "fit an exponential to a histogram");
    fit->add_option("--histogram", o.histogram)->required();
    fit->add_option("--lo", o.fit_lo);
    fit->add_option("--hi", o.fit_hi);
    auto* rep = app.add_subcommand("report", "VR metric columns for a menu");
    rep->add_option("--menu", o.menu)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kOk : kConfigError;
    }

    const auto* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    try {
        if (name == "solve") return cmd_solve(o, out);
        if (name == "benchmark") return cmd_benchmark(o, out);
        if (name == "verify") return cmd_verify(o, out);
        if (name == "oracle") return cmd_oracle(o, out);
        if (name == "simulate") return cmd_simulate(o, out);
        if (name == "sweep") return cmd_sweep(o, out, err);
        if (name == "fit-dist") return cmd_fit_dist(o, out);
        if (name == "report") return cmd_report(o, out);
    } catch (...) {
        std::string msg;
        const int rc = classify(std::current_exception(), msg);
        err << "error: " << msg << "\n";
        return rc;
    }
    return kConfigError;
}

}  // namespace qosc::cli
