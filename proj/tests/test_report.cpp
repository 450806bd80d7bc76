#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "growthlab/errors.hpp"
#include "growthlab/report.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace growthlab;
using nlohmann::json;

namespace {

struct CliResult {
    int status;
    std::string out;
    std::string err;
};

CliResult cli(std::vector<std::string> args) {
    args.insert(args.begin(), "growthlab");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int status = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    return {status, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        lines.push_back(line);
    return lines;
}

std::filesystem::path scratch(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("growthlab_test_" + name);
}

} // namespace

TEST_CASE("format_number") {
    CHECK(format_number(INFINITY) == "inf");
    CHECK(format_number(-INFINITY) == "-inf");
    CHECK(format_number(NAN) == "nan");
    CHECK(format_number(2.0) == "2");
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("json numbers and sentinels round-trip exactly") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-300, 300);
    for (int i = 0; i < 2000; ++i) {
        const double x = std::ldexp(mant(rng), expo(rng));
        const auto text = json_number(x).dump();
        CHECK(parse_json_number(json::parse(text)) == x);
    }
    for (double x : {INFINITY, -INFINITY}) {
        const auto j = json_number(x);
        CHECK(j.is_string());
        CHECK(parse_json_number(json::parse(j.dump())) == x);
    }
    CHECK(std::isnan(parse_json_number(json_number(NAN))));
    CHECK_THROWS(parse_json_number(json("banana")));
}

TEST_CASE("report round-trip through JSON text") {
    RunConfig cfg;
    cfg.command = Command::rate;
    cfg.p = 2.0;
    cfg.q = 2.0;
    cfg.mu = 0.0;
    const auto rep = run(cfg);
    const auto parsed = json::parse(rep.body.dump(2));
    CHECK(parsed == rep.body);
    REQUIRE(parsed["samples"].size() == rep.samples.size());
    for (std::size_t i = 0; i < rep.samples.size(); ++i) {
        CHECK(parse_json_number(parsed["samples"][i]["R"]) == rep.samples[i].R);
        CHECK(parse_json_number(parsed["samples"][i]["logG"]) == rep.samples[i].logG);
        CHECK(parse_json_number(parsed["samples"][i]["quad_error"]) == rep.samples[i].quad_error);
    }
    CHECK(parse_json_number(parsed["rate"]["rate"]) == parse_json_number(rep.body["rate"]["rate"]));
}

TEST_CASE("growth sample CSV") {
    std::vector<GrowthSample> samples;
    for (int i = 1; i <= 5; ++i)
        samples.push_back({10.0 * i, std::log(i), 1e-14});
    samples[0].logG = -INFINITY;
    std::ostringstream out;
    emit_csv(samples, out);
    const auto lines = lines_of(out.str());
    REQUIRE(lines.size() == 6);
    CHECK(lines[0] == "R,logG,quad_error");
    CHECK(lines[1] == "10,-inf,1e-14");
    CHECK(lines[3] == "30," + format_number(std::log(3.0)) + ",1e-14");

    const auto path = scratch("samples.csv");
    emit_csv(samples, path.string());
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == out.str());
    std::filesystem::remove(path);
}

TEST_CASE("check report CSV") {
    std::vector<CheckReport> checks = {{"caccioppoli", 3.5, -INFINITY, INFINITY, true, 1e-8},
                                       {"energy_bound", 1.0, 0.5, -0.5, false, 1e-8}};
    std::ostringstream out;
    emit_csv(checks, out);
    const auto lines = lines_of(out.str());
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "name,lhs,rhs,margin,passed,tolerance");
    CHECK(lines[1] == "caccioppoli,3.5,-inf,inf,true,1e-08");
    CHECK(lines[2] == "energy_bound,1,0.5,-0.5,false,1e-08");
}

TEST_CASE("CSV errors") {
    std::ostringstream out;
    CHECK_THROWS_AS(emit_csv(std::vector<GrowthSample>{}, out), UsageError);
    CHECK_THROWS_AS(emit_csv(std::vector<CheckReport>{}, out), UsageError);
    const std::vector<GrowthSample> one = {{1.0, 0.0, 0.0}};
    CHECK_THROWS_AS(emit_csv(one, "/nonexistent-dir/x/out.csv"), UsageError);
}

TEST_CASE("constants command") {
    const auto r = cli({"constants", "--p", "2", "--q", "2", "--lambda", "1", "--k", "1"});
    CHECK(r.status == 0);
    const auto j = json::parse(r.out);
    CHECK(parse_json_number(j["constants"]["C0"]) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(parse_json_number(j["constants"]["C1"]) == doctest::Approx(1.0 + std::sqrt(5.0)).epsilon(1e-14));
    CHECK(parse_json_number(j["constants"]["comparison"]["C2"]) == doctest::Approx(17.0).epsilon(1e-14));
    CHECK(j["config"]["command"] == "constants");
    CHECK(j["passed"] == true);
    CHECK(j["provenance"].is_array());
}

TEST_CASE("liouville command") {
    auto r = cli({"liouville", "--p", "2", "--q", "2", "--lambda", "1", "--k", "1", "--growth", "1.9"});
    CHECK(r.status == 0);
    CHECK(json::parse(r.out)["verdict"] == "forced_zero");
    r = cli({"liouville", "--p", "2", "--q", "2", "--lambda", "1", "--growth", "2"});
    CHECK(json::parse(r.out)["verdict"] == "inconclusive");
    r = cli({"liouville", "--p", "2", "--q", "2", "--lambda", "1", "--growth", "2.5"});
    CHECK(json::parse(r.out)["verdict"] == "inconclusive");
    r = cli({"liouville", "--p", "2", "--q", "2", "--lambda", "1"});
    CHECK(r.status == 2);
    CHECK(r.err.find("growth") != std::string::npos);
}

TEST_CASE("sharp command with rate measurement") {
    const auto r = cli({"sharp", "--p", "2", "--q", "2", "--mu", "2", "--rate", "--rmax", "1e6"});
    CHECK(r.status == 0);
    const auto j = json::parse(r.out);
    CHECK(std::abs(parse_json_number(j["rate"]["rate"]) - 4.0) <= 0.02);
    CHECK(j["rate"]["regime"] == "logarithmic");
    CHECK(j["passed"] == true);
}

TEST_CASE("exit status 1 on failed checks") {
    // a potential 10% too large breaks the subsolution inequality
    auto r = cli({"verify", "--p", "2", "--q", "2", "--mu", "0", "--potential-scale", "1.1"});
    CHECK(r.status == 1);
    CHECK(json::parse(r.out)["passed"] == false);
    // a window too close to t0 misses the rate
    r = cli({"rate", "--p", "2", "--q", "1.5", "--mu", "1", "--radii", "4,5,6,7"});
    CHECK(r.status == 1);

    r = cli({"verify", "--p", "2", "--q", "2", "--mu", "0"});
    CHECK(r.status == 0);
}

TEST_CASE("exit status 2 on usage and domain errors") {
    CHECK(cli({}).status == 2);
    CHECK(cli({"frobnicate"}).status == 2);
    auto r = cli({"constants", "--p", "2", "--q", "abc", "--lambda", "1"});
    CHECK(r.status == 2);
    CHECK(r.err.find("--q") != std::string::npos);
    r = cli({"constants", "--p", "2", "--lambda", "1"});
    CHECK(r.status == 2);
    CHECK(r.err.find("q") != std::string::npos);
    // q <= p - 1
    CHECK(cli({"constants", "--p", "2", "--q", "0.5", "--lambda", "1"}).status == 2);
    CHECK(cli({"sharp", "--p", "2", "--q", "2", "--mu", "3"}).status == 2);
    CHECK(cli({"rate", "--p", "2", "--q", "2", "--mu", "0", "--radii", "5,4,6,7"}).status == 2);
    CHECK(cli({"rate", "--p", "2", "--q", "2", "--mu", "0", "--format", "xml"}).status == 2);
    r = cli({"rate", "--p", "2", "--q", "2", "--mu", "0", "--format", "csv", "-o", "/nonexistent-dir/x/out.csv"});
    CHECK(r.status == 2);
}

TEST_CASE("CSV output from the command line") {
    const auto path = scratch("rate.csv");
    auto r = cli({"rate", "--p", "2", "--q", "2", "--mu", "0", "--format", "csv", "-o", path.string()});
    CHECK(r.status == 0);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "R,logG,quad_error");
    std::filesystem::remove(path);

    r = cli({"inequalities", "--p", "2", "--q", "2", "--mu", "0", "--r", "10", "--R", "20", "--h", "1", "--format",
             "csv"});
    CHECK(r.status == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "name,lhs,rhs,margin,passed,tolerance");
}

TEST_CASE("config file") {
    const auto path = scratch("config.ini");
    {
        std::ofstream f(path);
        f << "# constants for the unit case\np = 2\nq = 2\nlambda = 1\nk = 1\n";
    }
    auto r = cli({"constants", "--config", path.string()});
    CHECK(r.status == 0);
    CHECK(parse_json_number(json::parse(r.out)["constants"]["C0"]) == doctest::Approx(2.0));
    // flags override the file
    r = cli({"constants", "--config", path.string(), "--lambda", "4"});
    CHECK(parse_json_number(json::parse(r.out)["constants"]["C0"]) == doctest::Approx(4.0));
    {
        std::ofstream f(path);
        f << "p = 2\nq = two\nlambda = 1\n";
    }
    r = cli({"constants", "--config", path.string()});
    CHECK(r.status == 2);
    CHECK(r.err.find("q") != std::string::npos);
    std::filesystem::remove(path);
    CHECK(cli({"constants", "--config", "/nonexistent-dir/none.ini"}).status == 2);
}

TEST_CASE("GROWTHLAB_TOL overrides the default tolerance") {
    ::setenv("GROWTHLAB_TOL", "0.001", 1);
    auto r = cli({"constants", "--p", "2", "--q", "2", "--lambda", "1"});
    CHECK(r.status == 0);
    CHECK(parse_json_number(json::parse(r.out)["config"]["tolerance"]["absolute"]) == 0.001);
    // an explicit flag wins
    r = cli({"constants", "--p", "2", "--q", "2", "--lambda", "1", "--tol", "0.5"});
    CHECK(parse_json_number(json::parse(r.out)["config"]["tolerance"]["absolute"]) == 0.5);
    ::setenv("GROWTHLAB_TOL", "lots", 1);
    r = cli({"constants", "--p", "2", "--q", "2", "--lambda", "1"});
    CHECK(r.status == 2);
    CHECK(r.err.find("GROWTHLAB_TOL") != std::string::npos);
    ::unsetenv("GROWTHLAB_TOL");
}

TEST_CASE("l1 command on the R^n example") {
    const auto r = cli({"l1", "--n", "2", "--p", "3", "--q", "3"});
    CHECK(r.status == 0);
    const auto j = json::parse(r.out);
    CHECK(std::abs(parse_json_number(j["l1"]["sphere_log_slope"]) - 2.5) <= 0.025);
    CHECK(j["l1"]["verdict"] == "holds_only_for_small_r");

    // critical sharp example: alpha = a + p - 1 + qc > p - 1
    const auto s = cli({"l1", "--source", "sharp", "--p", "2", "--q", "3", "--mu", "2"});
    CHECK(s.status == 0);
    const auto js = json::parse(s.out);
    CHECK(parse_json_number(js["l1"]["sphere_log_slope"]) == doctest::Approx(1.0 + 1.0 + 3.0 * 1.0).epsilon(1e-3));
    CHECK(js["l1"]["verdict"] == "condition_fails");
}

TEST_CASE("help exits cleanly") {
    const auto r = cli({"--help"});
    CHECK(r.status == 0);
    CHECK(r.out.find("constants") != std::string::npos);
}
