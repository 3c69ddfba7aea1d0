#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli_app.hpp"
#include "qosc/io.hpp"
#include "qosc/regular_solver.hpp"
#include "support.hpp"

using namespace qosc;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "qosc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("qosc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    std::string at(const std::string& name) const { return (dir / name).string(); }
    fs::path dir;
};

const char* kBimodal =
    R"({"kind":"mixture","support":[0,4],"renormalize":true,"components":[)"
    R"({"weight":0.3,"kind":"uniform"},)"
    R"({"weight":0.35,"kind":"truncated_normal","mean":1,"stddev":0.25},)"
    R"({"weight":0.35,"kind":"truncated_normal","mean":3,"stddev":0.25}]})";

}  // namespace

TEST_F(Cli, SolveCaseStudy) {
    const auto r = run({"solve", "--out", at("s")});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* f : {"menu.csv", "menu.meta.json", "verification.json"}) EXPECT_TRUE(fs::exists(dir / "s" / f)) << f;
    const auto meta = io::read_json_file(dir / "s" / "menu.meta.json");
    EXPECT_NEAR(meta.at("beta").get<double>(), solve_beta(qtest::case_params(), qtest::case_dist()), 1e-12);
    EXPECT_EQ(meta.at("route"), "regular");
    EXPECT_TRUE(meta.at("reputation_binding").get<bool>());
    EXPECT_TRUE(io::read_json_file(dir / "s" / "verification.json").at("passes").get<bool>());
    EXPECT_EQ(slurp(dir / "s" / "menu.csv").substr(0, 10), "delta,q,p\n");
}

TEST_F(Cli, SolveFromConfigAndCsvTarget) {
    std::ofstream(at("cfg.json")) << R"({"params":{"a":0.49,"sigma":0.16,"q_bar":5},
        "dist":{"kind":"exponential","rate":0.952,"support":[0,4]},"seed":3})";
    const auto r = run({"--config", at("cfg.json"), "solve", "--out", at("m/case.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "m" / "case.csv"));
    EXPECT_TRUE(fs::exists(dir / "m" / "case.meta.json"));
    EXPECT_TRUE(fs::exists(dir / "m" / "case.verification.json"));
    const auto meta = io::read_json_file(dir / "m" / "case.meta.json");
    EXPECT_NEAR(meta.at("beta").get<double>(), solve_beta(qtest::case_params(0.49), qtest::case_dist()), 1e-12);
}

TEST_F(Cli, FlagsOverrideConfig) {
    std::ofstream(at("cfg.json")) << R"({"params":{"a":0.49,"sigma":0.16,"q_bar":5}})";
    ASSERT_EQ(run({"--config", at("cfg.json"), "solve", "--a", "0.51", "--out", at("s")}).code, 0);
    const auto meta = io::read_json_file(dir / "s" / "menu.meta.json");
    EXPECT_EQ(meta.at("params").at("a").get<double>(), 0.51);
}

TEST_F(Cli, SlackReputation) {
    const auto r = run({"solve", "--qbar", "1.0", "--out", at("s")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_FALSE(io::read_json_file(dir / "s" / "menu.meta.json").at("reputation_binding").get<bool>());
}

TEST_F(Cli, MalformedConfig) {
    std::ofstream(at("bad.json")) << "{\"params\": ";
    const auto r = run({"--config", at("bad.json"), "solve", "--out", at("s")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("parse error"), std::string::npos);
    EXPECT_EQ(run({"--config", at("missing.json"), "solve"}).code, 1);
    EXPECT_EQ(run({"solve", "--a", "-1", "--out", at("s")}).code, 1);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({"solve", "--dist", R"({"kind":"cauchy","support":[0,4]})"}).code, 1);
}

TEST_F(Cli, InfeasibleInstance) {
    const auto r = run({"solve", "--dist", R"({"kind":"uniform","support":[0,4]})", "--out", at("s")});
    EXPECT_EQ(r.code, 2);
    const auto diag = io::read_json_file(dir / "s" / "diagnostic.json");
    EXPECT_EQ(diag.at("error"), "infeasible");
    EXPECT_GT(diag.at("min_attainable_mean_qos").get<double>(), 5.0);
}

TEST_F(Cli, VerifyRoundTrip) {
    for (const auto& extra : std::vector<std::vector<std::string>>{{}, {"--general", "--dist", kBimodal, "--qbar", "12"}}) {
        fs::remove_all(dir / "s");
        std::vector<std::string> args{"solve", "--out", at("s")};
        args.insert(args.end(), extra.begin(), extra.end());
        ASSERT_EQ(run(args).code, 0);
        std::vector<std::string> vargs{"verify", "--menu", at("s/menu.csv"), "--out", at("v")};
        if (!extra.empty()) vargs.insert(vargs.end(), extra.begin() + 1, extra.end());
        ASSERT_EQ(run(vargs).code, 0);
        const auto a = io::read_json_file(dir / "s" / "verification.json");
        const auto b = io::read_json_file(dir / "v" / "verification.json");
        for (const char* k : {"max_ic_regret", "min_ir_slack", "reputation_residual", "expected_profit"})
            EXPECT_NEAR(a.at(k).get<double>(), b.at(k).get<double>(), 1e-12) << k;
        EXPECT_EQ(a.at("monotone"), b.at("monotone"));
    }
}

TEST_F(Cli, IroningRouteWritesPooledColumn) {
    const auto r = run({"solve", "--dist", kBimodal, "--qbar", "12", "--out", at("s")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(dir / "s" / "menu.csv").substr(0, 17), "delta,q,p,pooled\n");
    const auto meta = io::read_json_file(dir / "s" / "menu.meta.json");
    EXPECT_EQ(meta.at("route"), "ironing");
    EXPECT_FALSE(meta.at("pooling_intervals").empty());
    EXPECT_FALSE(meta.at("interval_certificates").empty());
}

TEST_F(Cli, FullPoolingRoute) {
    const auto r = run({"solve", "--dist", R"({"kind":"gamma","shape":0.5,"rate":4,"support":[0,4]})", "--out", at("s")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(io::read_json_file(dir / "s" / "menu.meta.json").at("route"), "full_pooling");
}

TEST_F(Cli, ByteIdenticalReruns) {
    for (int k = 0; k < 2; ++k) {
        const auto o = at("r" + std::to_string(k));
        ASSERT_EQ(run({"solve", "--out", o}).code, 0);
        ASSERT_EQ(run({"simulate", "--users", "3000", "--out", o, "--per-user", o + "/users.csv"}).code, 0);
        ASSERT_EQ(run({"sweep", "--param", "a", "--values", "0.47,0.49", "--out", o + "/sw"}).code, 0);
    }
    for (const char* f : {"menu.csv", "menu.meta.json", "verification.json", "simulation.json", "users.csv",
                          "sw/sweep.csv", "sw/a_0.47/menu.csv"})
        EXPECT_EQ(slurp(dir / "r0" / f), slurp(dir / "r1" / f)) << f;
}

TEST_F(Cli, Benchmark) {
    const auto r = run({"benchmark", "--out", at("b")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto meta = io::read_json_file(dir / "b" / "benchmark.meta.json");
    const auto& ic = meta.at("information_cost");
    EXPECT_GE(ic.at("cost").get<double>(), 0.0);
    EXPECT_NEAR(ic.at("full_info_per_user").get<double>(), 4.4, 0.44);
    EXPECT_EQ(slurp(dir / "b" / "benchmark.csv").substr(0, 10), "delta,q,p\n");
}

TEST_F(Cli, Oracle) {
    const auto r = run({"oracle", "--m", "64", "--probe", "50", "--out", at("o"),
                        "--dist", R"({"kind":"exponential","rate":0.952,"support":[0,4],"renormalize":true})"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = io::read_json_file(dir / "o" / "oracle.json");
    for (const char* k : {"analytic_profit", "oracle_profit", "relative_gap", "probe_improvement"})
        EXPECT_TRUE(j.contains(k)) << k;
    EXPECT_LT(std::abs(j.at("relative_gap").get<double>()), 0.005);
}

TEST_F(Cli, Simulate) {
    const auto r = run({"simulate", "--users", "2000", "--seed", "5", "--out", at("m"), "--per-user", at("m/u.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(dir / "m" / "u.csv").substr(0, 30), "delta,choice_index,q,p,payoff\n");
    const auto j = io::read_json_file(dir / "m" / "simulation.json");
    EXPECT_EQ(j.at("n_users").get<int>(), 2000);
    EXPECT_EQ(j.at("seed").get<int>(), 5);
}

TEST_F(Cli, SweepOverCostCurvature) {
    const auto r = run({"sweep", "--param", "a", "--values", "0.47,0.49,0.51", "--out", at("sw")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(dir / "sw" / "sweep.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "param_value,delta,q,p,U");
    std::map<std::string, std::vector<std::array<double, 4>>> series;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string v;
        std::getline(ss, v, ',');
        std::array<double, 4> row{};
        for (auto& x : row) {
            std::string c;
            std::getline(ss, c, ',');
            x = std::stod(c);
        }
        series[v].push_back(row);
    }
    ASSERT_EQ(series.size(), 3u);
    // QoS ordering flips between low and high types.
    const auto& lo = series["0.47"];
    const auto& hi = series["0.51"];
    ASSERT_EQ(lo.size(), hi.size());
    std::vector<double> crossings;
    for (std::size_t i = 1; i < lo.size(); ++i)
        if ((lo[i][1] - hi[i][1]) * (lo[i - 1][1] - hi[i - 1][1]) < 0) crossings.push_back(lo[i][0]);
    ASSERT_EQ(crossings.size(), 1u);
    EXPECT_NEAR(crossings[0], 0.47, 0.1);
    for (const auto& row : lo) EXPECT_NEAR(row[3], row[0] * row[1] - row[2], 1e-12);
    for (const char* sub : {"a_0.47", "a_0.49", "a_0.51"}) EXPECT_TRUE(fs::exists(dir / "sw" / sub / "menu.csv"));
}

TEST_F(Cli, SweepOverTarget) {
    ASSERT_EQ(run({"sweep", "--param", "q_bar", "--values", "4.8,5,5.5,6", "--out", at("sw")}).code, 0);
    const auto j = io::read_json_file(dir / "sw" / "sweep.json");
    ASSERT_EQ(j.size(), 4u);
    for (std::size_t k = 1; k < j.size(); ++k) EXPECT_GT(j[k].at("beta").get<double>(), j[k - 1].at("beta").get<double>());
}

TEST_F(Cli, SingleValueSweepMatchesSolve) {
    ASSERT_EQ(run({"sweep", "--param", "sigma", "--values", "0.16", "--out", at("sw")}).code, 0);
    ASSERT_EQ(run({"solve", "--out", at("s")}).code, 0);
    EXPECT_EQ(slurp(dir / "sw" / "sigma_0.16" / "menu.csv"), slurp(dir / "s" / "menu.csv"));
}

TEST_F(Cli, SweepFailureKeepsPartialArtifacts) {
    const auto r = run({"sweep", "--param", "q_bar", "--values", "5,1e-9,6", "--dist",
                        R"({"kind":"uniform","support":[0,4]})", "--out", at("sw")});
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(fs::exists(dir / "sw" / "sweep.csv"));
    const auto r2 = run({"sweep", "--param", "q_bar", "--values", "8,5", "--dist",
                         R"({"kind":"uniform","support":[0,4]})", "--out", at("sw2")});
    EXPECT_EQ(r2.code, 2);
    EXPECT_TRUE(fs::exists(dir / "sw2" / "q_bar_8" / "menu.csv"));
    EXPECT_EQ(run({"sweep", "--param", "rho", "--values", "1"}).code, 1);
    EXPECT_EQ(run({"sweep", "--param", "rate", "--values", "1", "--dist", R"({"kind":"uniform","support":[0,4]})"}).code, 1);
}

TEST_F(Cli, SweepOverRate) {
    ASSERT_EQ(run({"sweep", "--param", "rate", "--values", "0.9,0.952", "--out", at("sw")}).code, 0);
    const auto meta = io::read_json_file(dir / "sw" / "rate_0.952" / "menu.meta.json");
    EXPECT_NEAR(meta.at("beta").get<double>(), solve_beta(qtest::case_params(), qtest::case_dist()), 1e-12);
}

TEST_F(Cli, FitDist) {
    const auto r = run({"fit-dist", "--histogram", qtest::data_path("histogram_fixture.csv"), "--out", at("f")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = io::read_json_file(dir / "f" / "fitted_dist.json");
    EXPECT_NEAR(j.at("rate").get<double>(), 0.952, 5e-4);
    EXPECT_EQ(run({"solve", "--dist", at("f/fitted_dist.json"), "--out", at("s")}).code, 0);
    EXPECT_EQ(run({"fit-dist", "--histogram", at("none.csv")}).code, 2);
}

TEST_F(Cli, ReportMapping) {
    const auto m = cli::VrMapping::calibrated(1.6, 8.5);
    const auto anchor = m.map(5.0);
    EXPECT_DOUBLE_EQ(anchor.resolution, 720.0);
    EXPECT_DOUBLE_EQ(anchor.delay_s, 0.15);
    EXPECT_DOUBLE_EQ(anchor.reliability, 0.97);
    const auto top = m.map(1e3), bottom = m.map(-1e3);
    EXPECT_EQ(top.resolution, 1080.0);
    EXPECT_EQ(top.delay_s, 0.05);
    EXPECT_EQ(top.reliability, 0.99);
    EXPECT_EQ(bottom.resolution, 240.0);
    EXPECT_EQ(bottom.delay_s, 0.5);
    EXPECT_EQ(bottom.reliability, 0.95);
    // Calibration keeps the whole range inside the metric ranges.
    for (double q : {1.6, 8.5}) {
        const auto v = m.map(q);
        EXPECT_GE(v.resolution, 240.0 - 1e-9);
        EXPECT_LE(v.resolution, 1080.0 + 1e-9);
    }
    double prev_res = 0, prev_delay = 1e9, prev_rel = 0;
    for (double q = 0; q <= 10; q += 0.1) {
        const auto v = m.map(q);
        EXPECT_GE(v.resolution, prev_res);
        EXPECT_LE(v.delay_s, prev_delay);
        EXPECT_GE(v.reliability, prev_rel);
        prev_res = v.resolution;
        prev_delay = v.delay_s;
        prev_rel = v.reliability;
    }
}

TEST_F(Cli, Report) {
    ASSERT_EQ(run({"solve", "--out", at("s")}).code, 0);
    const auto r = run({"report", "--menu", at("s/menu.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string header = "delta,q,p,resolution,delay_s,reliability\n";
    EXPECT_EQ(slurp(dir / "s" / "report.csv").substr(0, header.size()), header);
    EXPECT_TRUE(io::read_json_file(dir / "s" / "report.meta.json").contains("slopes"));
    EXPECT_EQ(run({"report", "--menu", at("nothing.csv")}).code, 2);
}
