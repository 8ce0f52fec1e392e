#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "warpcheck/suites.hpp"

namespace warpcheck {

// Raised for anything wrong with a manifest file: parse errors, unresolved
// names, dimension mismatches, malformed check entries. The message always
// starts with the file path and the node path inside it.
class ManifestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A named vector or scalar field, parsed against its manifold's coordinates.
struct FieldEntry {
    std::string manifold;
    bool is_scalar = false;
    CoordVectorField vec;
    ScalarField scalar{Expr::number(0.0)};
};

// One check as written in the manifest; references are validated at load
// time, evaluation happens in run_manifest.
struct CheckSpec {
    std::string id;
    std::string suite;  // canonical suite name; empty for operation checks
    std::string op;     // operation name; empty for suite checks
    std::string manifold;

    std::vector<std::pair<std::string, std::string>> pairs;  // S1/S3 (base, fiber) field names
    std::string zeta_base, zeta_fiber;                       // S4/S5/S9; empty means zero part
    std::string field;                                       // operation checks
    std::string scalar;                                      // S6/S8 and gradient operations
    double lambda = 0.0;
    int branch = 1;
    char part = 'a';
    int condition = 1;
    double a = 0.0;
    double b = 1.0;
    std::string zeta2;  // S7 branch 1 fiber field
    std::optional<Point> fiber_point, base_point;  // S6; default: domain midpoints

    std::optional<SamplePlan> plan;
    std::map<std::string, double> tol_overrides;  // by tolerance name
    std::map<std::string, Expectation> expect;
    std::optional<bool> expect_discrepancy;
};

struct Manifest {
    std::filesystem::path path;
    std::map<std::string, double> constants;
    std::map<std::string, ChartManifold> manifolds;  // for warped entries, the product chart
    std::map<std::string, WarpedProduct> products;   // warped entries only
    std::map<std::string, std::string> warped_base, warped_fiber;  // factor names of warped entries
    std::map<std::string, FieldEntry> fields;
    SamplePlan plan;
    std::vector<CheckSpec> checks;
};

Manifest load_manifest(const std::filesystem::path& path);

// Command-line overrides applied on top of manifest-level and per-check
// settings.
struct RunOptions {
    std::optional<int> samples;
    std::optional<std::uint64_t> seed;
    std::optional<double> margin;
    std::optional<double> tol_curvature;
    std::optional<double> tol_exact;
    DiffMode mode = DiffMode::jets;
    ExecPolicy policy = ExecPolicy::parallel;
    std::string only_suite;  // canonical suite name filter; empty runs everything
};

// Executes every (matching) check in manifest order. Evaluation failures are
// captured in the returned record; they never abort the remaining checks.
std::vector<CheckResult> run_manifest(const Manifest& m, const RunOptions& opts);

// Exit status for a finished run: 0 when nothing failed (discrepancies do
// not fail a run), 1 otherwise.
int exit_status(const std::vector<CheckResult>& results);

}  // namespace warpcheck
