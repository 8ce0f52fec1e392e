#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "warpcheck/manifest.hpp"
#include "warpcheck/report.hpp"

namespace fs = std::filesystem;
using namespace warpcheck;

namespace {

struct Cli {
    std::string manifest;
    std::string suite;
    std::string instance;
    std::string report;
    std::string diff = "jets";
    std::optional<int> samples;
    std::optional<std::uint64_t> seed;
    std::optional<double> margin, tol_curvature, tol_exact;
    bool serial = false;
};

void add_common(CLI::App* cmd, Cli& cli) {
    cmd->add_option("--samples", cli.samples, "points per check (default: manifest plan)");
    cmd->add_option("--seed", cli.seed, "sampling seed override");
    cmd->add_option("--margin", cli.margin, "domain margin override in (0, 0.5)");
    cmd->add_option("--tol-curvature", cli.tol_curvature, "curvature-level tolerance override");
    cmd->add_option("--tol-exact", cli.tol_exact, "jet-exact tolerance override");
    cmd->add_option("--diff", cli.diff, "derivative backend")
        ->check(CLI::IsMember({"jets", "fd"}));
    cmd->add_option("--report", cli.report, "machine-readable report path");
    cmd->add_flag("--serial", cli.serial, "evaluate sample loops on one thread");
}

fs::path manifest_dir() {
    if (const char* d = std::getenv("WARPCHECK_MANIFEST_DIR")) return d;
    return "manifests";
}

fs::path report_path_for(const Cli& cli, const fs::path& manifest, const std::string& suite) {
    if (!cli.report.empty()) return cli.report;
    std::string name = manifest.stem().string();
    if (!suite.empty()) name += "-" + suite;
    name += "-report.json";
    if (const char* d = std::getenv("WARPCHECK_REPORT_DIR")) return fs::path(d) / name;
    return name;
}

int run(const Cli& cli, const fs::path& path, const RunOptions& opts) {
    Manifest m;
    try {
        m = load_manifest(path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    const std::vector<CheckResult> results = run_manifest(m, opts);
    if (!opts.only_suite.empty() && results.empty()) {
        std::cerr << path.string() << ": no checks for suite '" << opts.only_suite << "'\n";
        return 2;
    }

    RunMeta meta;
    meta.manifest = path.string();
    meta.plan = m.plan;
    if (opts.samples) meta.plan.count = *opts.samples;
    if (opts.seed) meta.plan.seed = *opts.seed;
    if (opts.margin) meta.plan.margin = *opts.margin;
    meta.diff = cli.diff;
    if (opts.tol_curvature) meta.tol.curvature = *opts.tol_curvature;
    if (opts.tol_exact) meta.tol.exact = *opts.tol_exact;

    std::cout << report_table(results);

    const fs::path out = report_path_for(cli, path, opts.only_suite);
    if (out.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(out.parent_path(), ec);
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) {
        std::cerr << "cannot write report to " << out.string() << "\n";
        return 2;
    }
    f << report_json(meta, results);
    std::cout << "report: " << out.string() << "\n";
    return exit_status(results);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"warped-product Ricci soliton verifier"};
    app.require_subcommand(1);
    Cli cli;

    CLI::App* check = app.add_subcommand("check", "run every check in a manifest");
    check->add_option("manifest", cli.manifest, "manifest file")->required();
    add_common(check, cli);

    CLI::App* verify = app.add_subcommand("verify", "run one suite from a bundled instance");
    verify->add_option("--suite", cli.suite, "S1..S9 or a suite name")->required();
    verify
        ->add_option("--instance", cli.instance,
                     "manifest name under the manifest directory, or a path")
        ->required();
    add_common(verify, cli);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    RunOptions opts;
    opts.samples = cli.samples;
    opts.seed = cli.seed;
    opts.margin = cli.margin;
    opts.tol_curvature = cli.tol_curvature;
    opts.tol_exact = cli.tol_exact;
    opts.mode = cli.diff == "fd" ? DiffMode::finite_difference : DiffMode::jets;
    opts.policy = cli.serial ? ExecPolicy::serial : ExecPolicy::parallel;

    fs::path path;
    if (check->parsed()) {
        path = cli.manifest;
    } else {
        opts.only_suite = suite_name(cli.suite);
        if (opts.only_suite.empty()) {
            std::cerr << "unknown suite '" << cli.suite << "' (S1..S9 or suite names)\n";
            return 2;
        }
        path = cli.instance;
        if (!fs::exists(path)) path = manifest_dir() / (cli.instance + ".json");
    }
    return run(cli, path, opts);
}
