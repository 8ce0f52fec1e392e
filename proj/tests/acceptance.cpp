// Acceptance gate: one line per criterion, nonzero exit when any fails.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "warpcheck/analysis.hpp"
#include "warpcheck/expr.hpp"
#include "warpcheck/geometry.hpp"
#include "warpcheck/manifest.hpp"
#include "warpcheck/report.hpp"

using namespace warpcheck;
namespace fs = std::filesystem;

namespace {

fs::path manifests_dir() {
    if (const char* env = std::getenv("WARPCHECK_MANIFESTS")) return env;
    return "manifests";
}

const std::vector<CheckResult>& results_for(const std::string& file) {
    static std::map<std::string, std::vector<CheckResult>> cache;
    auto it = cache.find(file);
    if (it == cache.end()) {
        const Manifest m = load_manifest(manifests_dir() / file);
        it = cache.emplace(file, run_manifest(m, {})).first;
    }
    return it->second;
}

const CheckResult& check_named(const std::vector<CheckResult>& rs, const std::string& id) {
    for (const auto& r : rs) {
        if (r.id == id) return r;
    }
    throw std::runtime_error("no check with id '" + id + "'");
}

const CheckLine& line_named(const CheckResult& r, const std::string& name) {
    for (const auto& l : r.lines) {
        if (l.name == name) return l;
    }
    throw std::runtime_error("check '" + r.id + "' has no line '" + name + "'");
}

double value_of(const CheckResult& r, const std::string& name) {
    return line_named(r, name).value;
}

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return buf;
}

// --- C1: closed-form blocks agree with direct product-chart computation

std::string c1() {
    const auto& rs = results_for("family.json");
    int products = 0;
    int min_samples = 1 << 30;
    double conn = 0.0, lie = 0.0, ricci = 0.0, mixed = 0.0;
    for (const auto& r : rs) {
        require(r.status == CheckStatus::pass, "check '" + r.id + "' did not pass");
        min_samples = std::min(min_samples, r.samples);
        if (r.kind == "prop1-blocks") {
            conn = std::max(conn, value_of(r, "connection-agreement"));
        } else if (r.kind == "prop2-blocks") {
            ++products;
            ricci = std::max(ricci, value_of(r, "ricci-agreement"));
            mixed = std::max(mixed, value_of(r, "mixed-block-zero"));
        } else if (r.kind == "e2-blocks") {
            lie = std::max(lie, value_of(r, "lie-agreement"));
        }
    }
    require(products >= 6, fmt("only %d warped products exercised", products));
    require(min_samples >= 50, fmt("only %d sample points per check", min_samples));
    require(conn <= 1e-6, fmt("connection blocks off by %.3g", conn));
    require(lie <= 1e-6, fmt("lie blocks off by %.3g", lie));
    require(ricci <= 1e-5, fmt("ricci blocks off by %.3g", ricci));
    require(mixed <= 1e-7, fmt("mixed ricci block %.3g", mixed));
    return fmt("%d products, >=%d points, conn %.1e, lie %.1e, ricci %.1e, mixed %.1e",
               products, min_samples, conn, lie, ricci, mixed);
}

// --- C2: the radial field on the cone is a shrinking gradient soliton

std::string c2() {
    const CheckResult& r = check_named(results_for("cone.json"), "radial-soliton");
    const double conc = value_of(r, "concurrent");
    const double flat = value_of(r, "ricci-flat");
    const double lambda = value_of(r, "lambda");
    const double grad = value_of(r, "gradient-potential");
    const std::string verdict = line_named(r, "verdict").text;
    require(conc <= 1e-8, fmt("concurrent residual %.3g", conc));
    require(flat <= 1e-4, fmt("ricci inf-norm %.3g", flat));
    require(std::abs(lambda - 1.0) <= 1e-4, fmt("lambda %.6f", lambda));
    require(grad <= 1e-6, fmt("gradient residual %.3g", grad));
    require(verdict == "shrinking", "verdict '" + verdict + "'");
    require(r.status == CheckStatus::pass, "check did not pass");
    return fmt("concurrent %.1e, ricci %.1e, lambda %.6f, gradient %.1e, %s", conc, flat,
               lambda, grad, verdict.c_str());
}

// --- C3: both classification branches, plus the failing converse

std::string c3() {
    const CheckResult& b1 =
        check_named(results_for("product-concurrent.json"), "both-concurrent");
    const double p1 = value_of(b1, "product-concurrent");
    require(p1 <= 1e-8, fmt("branch 1 product residual %.3g", p1));
    require(b1.status == CheckStatus::pass, "branch 1 check did not pass");

    const CheckResult& b2 = check_named(results_for("cone.json"), "radial-classify");
    const double zf = value_of(b2, "zeta-of-f");
    const double p2 = value_of(b2, "product-concurrent");
    require(zf <= 1e-10, fmt("zeta(f) - f residual %.3g", zf));
    require(p2 <= 1e-8, fmt("branch 2 product residual %.3g", p2));

    const auto& coth = results_for("coth.json");
    const double compatible = value_of(check_named(coth, "warp-compatible"), "value");
    const double conc = value_of(check_named(coth, "not-concurrent"), "value");
    require(compatible <= 1e-10, fmt("coth field zeta(f) - f residual %.3g", compatible));
    require(conc >= 0.1, fmt("coth field concurrent residual only %.3g", conc));
    return fmt("branches %.1e / %.1e, converse witness %.1e vs %.2f", p1, p2, compatible,
               conc);
}

// --- C4: static gradient solitons; the time-oriented base is flagged

std::string c4() {
    const auto& rs = results_for("grw-gradient.json");
    double hess = 0.0, lam = 0.0;
    for (const char* id : {"exp-static", "cosh-static"}) {
        const CheckResult& r = check_named(rs, id);
        const double h = value_of(r, "hessian-identity");
        const double l = value_of(r, "lambda-consistency");
        require(h <= 1e-6, fmt("%s hessian residual %.3g", id, h));
        require(l <= 1e-4, fmt("%s lambda residual %.3g", id, l));
        require(r.status == CheckStatus::pass, std::string(id) + " did not pass");
        hess = std::max(hess, h);
        lam = std::max(lam, l);
    }
    const CheckResult& poly = check_named(rs, "poly-static");
    require(value_of(poly, "hessian-identity") <= 1e-6, "poly hessian residual");
    require(line_named(poly, "lambda-consistency").skipped,
            "poly lambda line should be skipped (ricci is not proportional there)");
    require(poly.status == CheckStatus::pass, "poly-static did not pass");

    const CheckResult& lor = check_named(rs, "exp-lorentzian");
    require(lor.error.empty(), "time-oriented run errored: " + lor.error);
    require(lor.paper_discrepancy, "time-oriented base did not raise the discrepancy flag");
    require(lor.status == CheckStatus::discrepancy,
            "time-oriented base should finish as a discrepancy, not a failure");
    return fmt("hessian %.1e, lambda %.1e, time-oriented base flagged", hess, lam);
}

// --- C5: classification implications on the bundled field family

std::string c5() {
    const Manifest m = load_manifest(manifests_dir() / "classify-family.json");
    const double eps = 1e-8;
    int fields = 0, concurrent = 0, killing = 0;
    for (const auto& [name, entry] : m.fields) {
        if (entry.is_scalar) continue;
        const ChartManifold& M = m.manifolds.at(entry.manifold);
        const auto pts = M.sample_points(m.plan);
        const FieldClassification c = classify_field(M, entry.vec, pts);
        ++fields;

        if (c.concurrent_residual <= eps) {
            ++concurrent;
            double lie_dev = 0.0;
            for (const auto& p : pts) {
                const PointFrame f = frame_at(M, p);
                const Eigen::MatrixXd L = lie_metric_at(f, entry.vec);
                lie_dev = std::max(lie_dev, (L - 2.0 * f.g).cwiseAbs().maxCoeff());
            }
            require(lie_dev <= 10.0 * eps,
                    fmt("concurrent field '%s' has |L - 2g| = %.3g", name.c_str(), lie_dev));
            require(c.gradient_potential_residual <= 10.0 * eps,
                    fmt("concurrent field '%s' is not a gradient: %.3g", name.c_str(),
                        c.gradient_potential_residual));
        }

        const bool is_killing = c.killing_residual <= eps;
        const bool rho_zero =
            std::abs(c.conformal.rho) <= 1e-6 && c.conformal.rho_spread <= 1e-6;
        const bool is_conformal = c.conformal.residual <= 10.0 * eps;
        require(is_killing == (rho_zero && is_conformal),
                fmt("field '%s' breaks the killing equivalence (killing %.3g, rho %.3g, "
                    "spread %.3g, conformal %.3g)",
                    name.c_str(), c.killing_residual, c.conformal.rho,
                    c.conformal.rho_spread, c.conformal.residual));
        if (is_killing) ++killing;
    }
    require(fields >= 12, fmt("only %d fields in the family", fields));
    require(concurrent >= 3, fmt("only %d concurrent fields in the family", concurrent));
    require(killing >= 5, fmt("only %d killing fields in the family", killing));
    return fmt("implications hold on %d fields (%d concurrent, %d killing)", fields,
               concurrent, killing);
}

// --- C6: randomized jets against central differences, print round-trips

Expr random_expr(std::mt19937_64& rng, int depth) {
    const auto pick = [&rng](int n) { return static_cast<int>(rng() % n); };
    if (depth >= 3 || pick(5) == 0) {
        if (pick(2) == 0) return Expr::variable(pick(3));
        return Expr::number(0.25 * (1 + pick(10)));
    }
    switch (pick(8)) {
        case 0: return random_expr(rng, depth + 1) + random_expr(rng, depth + 1);
        case 1: return random_expr(rng, depth + 1) - random_expr(rng, depth + 1);
        case 2: return random_expr(rng, depth + 1) * random_expr(rng, depth + 1);
        case 3: {
            const Expr s = random_expr(rng, depth + 1);
            return random_expr(rng, depth + 1) / (s * s + Expr::number(0.5));
        }
        case 4: return -random_expr(rng, depth + 1);
        case 5:
            return Expr::pow(random_expr(rng, depth + 1), Expr::number(2.0 + pick(2)));
        case 6: {
            static const Expr::Func funcs[] = {Expr::Func::sin,  Expr::Func::cos,
                                               Expr::Func::sinh, Expr::Func::cosh,
                                               Expr::Func::tanh, Expr::Func::exp};
            return Expr::apply(funcs[pick(6)], random_expr(rng, depth + 1));
        }
        default: {
            const Expr s = random_expr(rng, depth + 1);
            const Expr arg = s * s + Expr::number(1.1);
            return Expr::apply(pick(2) ? Expr::Func::sqrt : Expr::Func::ln, arg);
        }
    }
}

std::string c6() {
    std::mt19937_64 rng(42);
    const std::vector<std::string> vars = {"x", "y", "z"};
    const auto coord = [&rng] { return -2.0 + 4.0 * ((rng() >> 11) * 0x1.0p-53); };

    int accepted = 0, attempts = 0;
    double grad_dev = 0.0, hess_dev = 0.0;
    while (accepted < 1000) {
        require(++attempts <= 200000, "generator rejection rate is absurd");
        const Expr e = random_expr(rng, 0);
        const Point p = {coord(), coord(), coord()};
        Jet2 jet;
        try {
            jet = eval_jet2(e, p);
        } catch (const EvalError&) {
            continue;
        }
        const double scale = std::max({std::abs(jet.value), jet.grad.cwiseAbs().maxCoeff(),
                                       jet.hess.cwiseAbs().maxCoeff()});
        if (!std::isfinite(scale) || scale > 100.0) continue;

        // central differences, steps matched to the fd fallback backend
        bool domain_hit = false;
        try {
            for (int i = 0; i < 3 && !domain_hit; ++i) {
                const double h1 = 1e-5 * (1.0 + std::abs(p[i]));
                const double h2 = 1e-4 * (1.0 + std::abs(p[i]));
                Point up = p, dn = p;
                up[i] += h1;
                dn[i] -= h1;
                const double g = (eval(e, up) - eval(e, dn)) / (2.0 * h1);
                grad_dev = std::max(grad_dev, std::abs(jet.grad(i) - g) /
                                                  (1.0 + std::max(std::abs(jet.grad(i)),
                                                                  std::abs(g))));
                up = p, dn = p;
                up[i] += h2;
                dn[i] -= h2;
                const double hii =
                    (eval(e, up) - 2.0 * jet.value + eval(e, dn)) / (h2 * h2);
                hess_dev = std::max(hess_dev, std::abs(jet.hess(i, i) - hii) /
                                                  (1.0 + std::max(std::abs(jet.hess(i, i)),
                                                                  std::abs(hii))));
                for (int j = i + 1; j < 3; ++j) {
                    const double hj = 1e-4 * (1.0 + std::abs(p[j]));
                    Point pp = p, pm = p, mp = p, mm = p;
                    pp[i] += h2, pp[j] += hj;
                    pm[i] += h2, pm[j] -= hj;
                    mp[i] -= h2, mp[j] += hj;
                    mm[i] -= h2, mm[j] -= hj;
                    const double hij = (eval(e, pp) - eval(e, pm) - eval(e, mp) +
                                        eval(e, mm)) /
                                       (4.0 * h2 * hj);
                    hess_dev = std::max(hess_dev,
                                        std::abs(jet.hess(i, j) - hij) /
                                            (1.0 + std::max(std::abs(jet.hess(i, j)),
                                                            std::abs(hij))));
                }
            }
        } catch (const EvalError&) {
            domain_hit = true;
        }
        if (domain_hit) continue;

        const std::string printed = to_string(e, vars);
        const Expr back = parse_expr(printed, vars);
        require(structurally_equal(e, back), "round-trip changed: " + printed);
        ++accepted;

        require(grad_dev <= 1e-6, fmt("gradient deviates by %.3g at case %d (%s)", grad_dev,
                                      accepted, printed.c_str()));
        require(hess_dev <= 1e-4, fmt("hessian deviates by %.3g at case %d (%s)", hess_dev,
                                      accepted, printed.c_str()));
    }
    return fmt("%d cases (of %d drawn), grad dev %.1e, hess dev %.1e", accepted, attempts,
               grad_dev, hess_dev);
}

// --- C7: byte-stable reports across consecutive runs

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    require(static_cast<bool>(in), "cannot read " + p.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string c7() {
    const char* bin = std::getenv("WARPCHECK_BIN");
    require(bin != nullptr, "WARPCHECK_BIN is not set");
    const fs::path tmp = fs::temp_directory_path() / "warpcheck-acceptance";
    fs::create_directories(tmp);

    const char* names[] = {"cone.json",        "coth.json",   "product-concurrent.json",
                           "grw-linear.json",  "grw-gradient.json", "einstein.json",
                           "family.json",      "classify-family.json"};
    int count = 0;
    for (const char* name : names) {
        const fs::path manifest = manifests_dir() / name;
        std::string first;
        for (int run = 0; run < 2; ++run) {
            const fs::path out = tmp / (std::string(name) + ".report." +
                                        std::to_string(run) + ".json");
            const std::string cmd = std::string("\"") + bin + "\" check \"" +
                                    manifest.string() + "\" --report \"" + out.string() +
                                    "\" > /dev/null 2>&1";
            require(std::system(cmd.c_str()) == 0,
                    std::string(name) + " exited nonzero on run " + std::to_string(run));
            const std::string body = slurp(out);
            require(body.find(kReportSchema) != std::string::npos,
                    std::string(name) + " report lacks the schema marker");
            if (run == 0) {
                first = body;
            } else {
                require(body == first, std::string(name) + " reports differ between runs");
            }
        }
        ++count;
    }

    const Manifest m = load_manifest(manifests_dir() / "cone.json");
    RunMeta meta;
    meta.manifest = "cone.json";
    meta.plan = m.plan;
    const auto& rs = results_for("cone.json");
    require(report_json(meta, rs) == report_json(meta, rs),
            "in-process serialization is unstable");
    return fmt("%d manifests, byte-identical reports across paired runs", count);
}

}  // namespace

int main() {
    struct Criterion {
        const char* id;
        const char* what;
        std::string (*run)();
    };
    const Criterion criteria[] = {
        {"C1", "block formulas agree with direct computation", c1},
        {"C2", "radial cone field verifies as a shrinking gradient soliton", c2},
        {"C3", "classification branches accept, the converse witness rejects", c3},
        {"C4", "static gradient identities hold; time-oriented base is flagged", c4},
        {"C5", "field classification implications hold on the bundled family", c5},
        {"C6", "randomized jets match central differences and print round-trips", c6},
        {"C7", "reports are byte-stable across consecutive runs", c7},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        std::string detail;
        bool ok = true;
        try {
            detail = c.run();
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        std::printf("[%s] %s %s: %s\n", ok ? "PASS" : "FAIL", c.id, c.what, detail.c_str());
        if (!ok) ++failures;
    }
    if (failures) std::printf("%d of 7 criteria failed\n", failures);
    return failures;
}
