#pragma once

#include "growthlab/growth.hpp"

#include "json.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace growthlab {

enum class Command { constants, sharp, verify, rate, inequalities, l1, liouville };
enum class OutputFormat { json, csv };

const char* to_string(Command command);

/// Usage or configuration problem; maps to exit status 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    Command command = Command::constants;

    std::optional<double> p;
    std::optional<double> q;
    std::optional<double> mu;
    std::optional<double> lambda;
    double k = 1.0;
    double eps = 0.0;
    std::optional<double> growth; // claimed exponential rate for liouville

    bool with_rate = false;        // sharp: also measure the growth rate
    std::vector<double> radii;     // explicit radii, strictly increasing
    std::optional<double> rmin;
    std::optional<double> rmax;
    int nr = 8;

    // inequalities: a single (r, R, h) triple instead of the default set
    std::optional<double> r_inner;
    std::optional<double> r_outer;
    std::optional<double> h;

    int n = 2;                     // l1: dimension of the R^n example
    std::string source = "rn";     // l1: rn | sharp
    double potential_scale = 1.0;  // verify: multiply V by this factor

    std::optional<std::string> output;
    OutputFormat format = OutputFormat::json;

    CheckTolerance tolerance;
    std::optional<double> rate_tol; // relative; defaults 1% (power) / 0.5% (logarithmic)
    double residual_tol = 1e-9;
    double fd_tol = 1e-6;
};

struct Report {
    nlohmann::json body;
    std::vector<GrowthSample> samples;
    std::vector<CheckReport> checks;
    bool passed = true;
};

/// Throws UsageError for missing or invalid fields; domain failures
/// surface as the library's own exceptions.
Report run(const RunConfig& config);

/// Exit status for a finished report: 0 when every check passed, 1 otherwise.
int exit_status(const Report& report);

/// Cell formatting shared by CSV and the JSON sentinels: 17 significant
/// digits, and the literal strings inf, -inf, nan for non-finite values.
std::string format_number(double x);

/// Finite values as JSON numbers, non-finite ones as sentinel strings.
nlohmann::json json_number(double x);
/// Inverse of json_number.
double parse_json_number(const nlohmann::json& j);

nlohmann::json to_json(const CheckReport& report);
nlohmann::json to_json(const RateEstimate& estimate);
nlohmann::json to_json(const GrowthSample& sample);
nlohmann::json to_json(const ComparisonConstants& cc);

/// CSV writers. Growth samples use the header R,logG,quad_error; checks use
/// name,lhs,rhs,margin,passed,tolerance. Empty payloads throw UsageError.
void emit_csv(const std::vector<GrowthSample>& samples, std::ostream& out);
void emit_csv(const std::vector<CheckReport>& checks, std::ostream& out);
/// Path variants; an unwritable path throws UsageError.
void emit_csv(const std::vector<GrowthSample>& samples, const std::string& path);
void emit_csv(const std::vector<CheckReport>& checks, const std::string& path);

/// Full command-line entry point: parses argv (subcommand, flags, optional
/// --config file of `key = value` lines, GROWTHLAB_TOL), runs, writes the report and returns the
/// exit status (0 pass, 1 failed check, 2 usage or domain error).
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace growthlab
