#include "warpcheck/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace warpcheck {
namespace {

std::string fmt(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.6g", v);
    return b;
}

CheckLine bounded_line(std::string name, LineRole role, double value, double bound) {
    CheckLine l;
    l.name = std::move(name);
    l.role = role;
    l.value = value;
    l.criterion = "<= " + fmt(bound);
    l.passed = l.default_passed = value <= bound;
    l.gates = true;
    return l;
}

CheckLine close_line(std::string name, LineRole role, double value, double center, double tol) {
    CheckLine l;
    l.name = std::move(name);
    l.role = role;
    l.value = value;
    l.criterion = "= " + fmt(center) + " +- " + fmt(tol);
    l.passed = l.default_passed = std::abs(value - center) <= tol;
    l.gates = true;
    return l;
}

CheckLine text_line(std::string name, LineRole role, std::string actual, std::string expected) {
    CheckLine l;
    l.name = std::move(name);
    l.role = role;
    l.text = std::move(actual);
    l.criterion = "= " + expected;
    l.passed = l.default_passed = l.text == expected;
    l.gates = true;
    return l;
}

CheckLine info_line(std::string name, double value, std::string note = {}) {
    CheckLine l;
    l.name = std::move(name);
    l.value = value;
    l.note = std::move(note);
    return l;
}

double inf_norm(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

double agreement(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const double scale = 1.0 + std::max(inf_norm(a), inf_norm(b));
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

double agreement(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double scale = 1.0 + std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

double metric_inner(const Eigen::MatrixXd& g_inv, const Eigen::MatrixXd& a,
                    const Eigen::MatrixXd& b) {
    return (g_inv * a * g_inv * b).trace();
}

double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

template <class Fn>
std::vector<double> per_point(std::span<const Point> pts, const EvalOptions& opt, Fn&& fn) {
    std::vector<double> out(pts.size(), 0.0);
    for_each_index(pts.size(), opt.policy, [&](std::size_t i) { out[i] = fn(pts[i]); });
    return out;
}

CoordVectorField zero_field(int n) {
    CoordVectorField z;
    z.components.assign(static_cast<std::size_t>(n), Expr::number(0.0));
    return z;
}

// max over points and components of |zeta^k|
double field_magnitude(const CoordVectorField& zeta, std::span<const Point> pts,
                       const EvalOptions& opt) {
    const auto vals = per_point(pts, opt, [&](const Point& p) {
        double m = 0.0;
        for (const Expr& c : zeta.components) m = std::max(m, std::abs(eval(c, p)));
        return m;
    });
    return max_of(vals);
}

// ||grad f||_g1 at each base point (absolute value under the root keeps
// Lorentzian bases meaningful).
double warp_gradient_norm(const WarpedProduct& W, const Point& p1, const EvalOptions& opt) {
    const PointFrame f = frame_at(W.base(), p1, opt.mode);
    const Jet2 jf = jet_of(W.warp().expr, p1, W.base_dim(), opt.mode);
    const Eigen::VectorXd grad = f.g_inv * jf.grad;
    return std::sqrt(std::abs(grad.dot(f.g * grad)));
}

double zeta1_of_f(const WarpedProduct& W, const CoordVectorField& zeta1, const Point& p1,
                  const EvalOptions& opt) {
    const Jet2 jf = jet_of(W.warp().expr, p1, W.base_dim(), opt.mode);
    double s = 0.0;
    for (int i = 0; i < W.base_dim(); ++i) {
        s += eval(zeta1.components[static_cast<std::size_t>(i)], p1) * jf.grad(i);
    }
    return s;
}

Eigen::MatrixXd assemble_blocks(const WarpedProduct& W, const BlockTensor& b) {
    const int n1 = W.base_dim();
    const int n2 = W.fiber_dim();
    Eigen::MatrixXd m(n1 + n2, n1 + n2);
    m.topLeftCorner(n1, n1) = b.base;
    m.bottomRightCorner(n2, n2) = b.fiber;
    m.topRightCorner(n1, n2) = b.mixed;
    m.bottomLeftCorner(n2, n1) = b.mixed.transpose();
    return m;
}

struct Samples {
    std::vector<Point> product, base, fiber;
};

Samples draw_samples(const WarpedProduct& W, const SamplePlan& plan) {
    Samples s;
    s.product = W.product().sample_points(plan);
    s.base = W.base().sample_points(plan);
    s.fiber = W.fiber().sample_points(plan);
    return s;
}

}  // namespace

const char* to_string(LineRole r) {
    switch (r) {
        case LineRole::hypothesis: return "hypothesis";
        case LineRole::conclusion: return "conclusion";
        case LineRole::info: return "info";
    }
    return "info";
}

const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::discrepancy: return "discrepancy";
        case CheckStatus::error: return "error";
    }
    return "error";
}

std::string suite_name(const std::string& id) {
    static const std::pair<const char*, const char*> table[] = {
        {"S1", "prop1-blocks"},        {"S2", "prop2-blocks"},
        {"S3", "e2-blocks"},           {"S4", "concurrent-classify"},
        {"S5", "concurrent-soliton"},  {"S6", "gradient-factorization"},
        {"S7", "grw-concurrent"},      {"S8", "grw-gradient"},
        {"S9", "einstein-conditions"},
    };
    std::string key = id;
    if (key.size() >= 2 && (key[0] == 's' || key[0] == 'S')) {
        key[0] = 'S';
    }
    for (const auto& [short_id, name] : table) {
        if (key == short_id || id == name) return name;
    }
    return {};
}

void finalize_status(CheckResult& r) {
    if (!r.error.empty()) {
        r.status = CheckStatus::error;
        return;
    }
    bool has_hyp = false, hyp_default_ok = true, concl_default_fail = false;
    bool any_fail = false, fail_outside_conclusions = false;
    for (const CheckLine& l : r.lines) {
        if (l.skipped) continue;
        if (!l.criterion.empty() && l.role == LineRole::hypothesis) {
            has_hyp = true;
            if (!l.default_passed) hyp_default_ok = false;
        }
        if (!l.criterion.empty() && l.role == LineRole::conclusion && !l.default_passed) {
            concl_default_fail = true;
        }
        if (l.gates && !l.passed) {
            any_fail = true;
            if (l.role != LineRole::conclusion) fail_outside_conclusions = true;
        }
    }
    r.paper_discrepancy = has_hyp && hyp_default_ok && concl_default_fail;

    if (r.expected_discrepancy.has_value()) {
        CheckLine meta;
        meta.name = "paper-discrepancy";
        meta.text = r.paper_discrepancy ? "true" : "false";
        meta.criterion = std::string("= ") + (*r.expected_discrepancy ? "true" : "false");
        meta.passed = meta.default_passed = r.paper_discrepancy == *r.expected_discrepancy;
        meta.gates = true;
        if (!meta.passed) {
            any_fail = true;
            fail_outside_conclusions = true;
        }
        r.lines.push_back(std::move(meta));
        r.expected_discrepancy.reset();
    }

    if (!any_fail) {
        r.status = CheckStatus::pass;
    } else if (r.paper_discrepancy && !fail_outside_conclusions) {
        r.status = CheckStatus::discrepancy;
    } else {
        r.status = CheckStatus::fail;
    }
}

void apply_expectations(CheckResult& r, const std::map<std::string, Expectation>& expect,
                        std::optional<bool> expect_discrepancy) {
    for (const auto& [name, e] : expect) {
        CheckLine* target = nullptr;
        for (CheckLine& l : r.lines) {
            if (l.name == name) {
                target = &l;
                break;
            }
        }
        if (target == nullptr) {
            throw std::invalid_argument("expectation names unknown line '" + name + "'");
        }
        target->gates = true;
        target->skipped = false;
        switch (e.kind) {
            case Expectation::Kind::at_most:
                target->criterion = "<= " + fmt(e.bound);
                target->passed = target->value <= e.bound;
                break;
            case Expectation::Kind::at_least:
                target->criterion = ">= " + fmt(e.bound);
                target->passed = target->value >= e.bound;
                break;
            case Expectation::Kind::close_to:
                target->criterion = "= " + fmt(e.bound) + " +- " + fmt(e.tol);
                target->passed = std::abs(target->value - e.bound) <= e.tol;
                break;
            case Expectation::Kind::text:
                target->criterion = "= " + e.text;
                target->passed = target->text == e.text;
                break;
        }
    }
    r.expected_discrepancy = expect_discrepancy;
    finalize_status(r);
}

CheckResult run_s1(const WarpedProduct& W, std::span<const LiftedPair> pairs,
                   const SuiteContext& ctx) {
    if (pairs.empty()) throw std::invalid_argument("prop1-blocks needs at least one field pair");
    CheckResult r;
    r.kind = suite_name("S1");
    const auto pts = W.product().sample_points(ctx.plan);
    r.samples = static_cast<int>(pts.size());

    std::vector<CoordVectorField> lifted;
    lifted.reserve(pairs.size());
    for (const LiftedPair& z : pairs) lifted.push_back(W.lift(z));

    double worst = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        for (std::size_t j = 0; j < pairs.size(); ++j) {
            const auto devs = per_point(pts, ctx.opt, [&](const Point& p) {
                const Eigen::VectorXd direct = covariant_derivative_at(
                    W.product(), lifted[i], lifted[j], p, ctx.opt.mode);
                const Eigen::VectorXd blocks =
                    connection_blocks_at(W, pairs[i], pairs[j], p, ctx.opt.mode);
                return agreement(direct, blocks);
            });
            worst = std::max(worst, max_of(devs));
        }
    }
    r.lines.push_back(
        bounded_line("connection-agreement", LineRole::conclusion, worst, ctx.tol.exact));
    finalize_status(r);
    return r;
}

CheckResult run_s2(const WarpedProduct& W, const SuiteContext& ctx) {
    CheckResult r;
    r.kind = suite_name("S2");
    const auto pts = W.product().sample_points(ctx.plan);
    r.samples = static_cast<int>(pts.size());
    const int n1 = W.base_dim();
    const int n2 = W.fiber_dim();

    std::vector<double> devs(pts.size()), mixed(pts.size());
    for_each_index(pts.size(), ctx.opt.policy, [&](std::size_t i) {
        const Eigen::MatrixXd direct = ricci_at(W.product(), pts[i], ctx.opt.mode);
        const BlockTensor blocks = ricci_blocks_at(W, pts[i], ctx.opt.mode);
        const double base_dev =
            agreement(Eigen::MatrixXd(direct.topLeftCorner(n1, n1)), blocks.base);
        const double fiber_dev =
            agreement(Eigen::MatrixXd(direct.bottomRightCorner(n2, n2)), blocks.fiber);
        devs[i] = std::max(base_dev, fiber_dev);
        mixed[i] = direct.topRightCorner(n1, n2).cwiseAbs().maxCoeff();
    });

    r.lines.push_back(
        bounded_line("ricci-agreement", LineRole::conclusion, max_of(devs), ctx.tol.curvature));
    r.lines.push_back(bounded_line("mixed-block-zero", LineRole::conclusion, max_of(mixed),
                                   ctx.tol.mixed_ricci));
    finalize_status(r);
    return r;
}

CheckResult run_s3(const WarpedProduct& W, std::span<const LiftedPair> pairs,
                   const SuiteContext& ctx) {
    if (pairs.empty()) throw std::invalid_argument("e2-blocks needs at least one field pair");
    CheckResult r;
    r.kind = suite_name("S3");
    const auto pts = W.product().sample_points(ctx.plan);
    r.samples = static_cast<int>(pts.size());

    double worst = 0.0;
    for (const LiftedPair& z : pairs) {
        const CoordVectorField lifted = W.lift(z);
        const auto devs = per_point(pts, ctx.opt, [&](const Point& p) {
            const Eigen::MatrixXd direct = lie_metric_at(W.product(), lifted, p, ctx.opt.mode);
            const Eigen::MatrixXd blocks = assemble_blocks(W, lie_blocks_at(W, z, p, ctx.opt.mode));
            return agreement(direct, blocks);
        });
        worst = std::max(worst, max_of(devs));
    }
    r.lines.push_back(
        bounded_line("lie-agreement", LineRole::conclusion, worst, ctx.tol.lie_agreement));
    finalize_status(r);
    return r;
}

CheckResult run_s4(const WarpedProduct& W, const LiftedPair& zeta, int branch,
                   const SuiteContext& ctx) {
    if (branch != 1 && branch != 2) {
        throw std::invalid_argument("concurrent-classify branch must be 1 or 2");
    }
    CheckResult r;
    r.kind = suite_name("S4");
    const Samples s = draw_samples(W, ctx.plan);
    r.samples = static_cast<int>(s.product.size());

    r.lines.push_back(bounded_line(
        "base-concurrent", LineRole::hypothesis,
        concurrent_residual(W.base(), zeta.base, s.base, ctx.opt), ctx.tol.exact));
    if (branch == 1) {
        r.lines.push_back(bounded_line(
            "fiber-concurrent", LineRole::hypothesis,
            concurrent_residual(W.fiber(), zeta.fiber, s.fiber, ctx.opt), ctx.tol.exact));
        const auto grads = per_point(s.base, ctx.opt,
                                     [&](const Point& p1) { return warp_gradient_norm(W, p1, ctx.opt); });
        r.lines.push_back(
            bounded_line("warp-constant", LineRole::hypothesis, max_of(grads), ctx.tol.exact));
    } else {
        r.lines.push_back(bounded_line("fiber-part-zero", LineRole::hypothesis,
                                       field_magnitude(zeta.fiber, s.fiber, ctx.opt),
                                       ctx.tol.exact));
        r.lines.push_back(bounded_line("zeta-of-f", LineRole::hypothesis,
                                       zeta_of_f_residual(W, zeta.base, s.base, ctx.opt),
                                       ctx.tol.exact));
    }
    r.lines.push_back(bounded_line(
        "product-concurrent", LineRole::conclusion,
        concurrent_residual(W.product(), W.lift(zeta), s.product, ctx.opt), ctx.tol.exact));
    finalize_status(r);
    return r;
}

CheckResult run_s5(const WarpedProduct& W, const LiftedPair& zeta, const SuiteContext& ctx) {
    CheckResult r;
    r.kind = suite_name("S5");
    const auto pts = W.product().sample_points(ctx.plan);
    r.samples = static_cast<int>(pts.size());
    const CoordVectorField lifted = W.lift(zeta);

    r.lines.push_back(bounded_line(
        "concurrent", LineRole::hypothesis,
        concurrent_residual(W.product(), lifted, pts, ctx.opt), ctx.tol.exact));

    const SolitonFit sf = soliton_fit(W.product(), lifted, pts, ctx.tol, ctx.opt);
    r.lines.push_back(close_line("lambda", LineRole::conclusion, sf.lambda, 1.0, ctx.tol.fit));
    r.lines.push_back(
        bounded_line("soliton-residual", LineRole::conclusion, sf.residual_max, ctx.tol.fit));
    r.lines.push_back(
        text_line("verdict", LineRole::conclusion, to_string(sf.verdict), "shrinking"));

    const auto flat = per_point(pts, ctx.opt, [&](const Point& p) {
        const PointFrame f = frame_at(W.product(), p, ctx.opt.mode);
        return inf_norm(ricci_at(f)) / inf_norm(f.g);
    });
    r.lines.push_back(
        bounded_line("ricci-flat", LineRole::conclusion, max_of(flat), ctx.tol.fit));
    r.lines.push_back(bounded_line(
        "gradient-potential", LineRole::conclusion,
        gradient_potential_check(W.product(), lifted, pts, ctx.opt), ctx.tol.exact));
    r.lines.push_back(info_line("residual-mean", sf.residual_mean));
    finalize_status(r);
    return r;
}

CheckResult run_s6(const WarpedProduct& W, const ScalarField& u, double lambda,
                   const Point& fiber_point, const Point& base_point, const SuiteContext& ctx) {
    const int n1 = W.base_dim();
    const int n2 = W.fiber_dim();
    if (static_cast<int>(fiber_point.size()) != n2 ||
        static_cast<int>(base_point.size()) != n1) {
        throw std::invalid_argument("gradient-factorization fixed points have wrong dimension");
    }
    CheckResult r;
    r.kind = suite_name("S6");
    const Samples s = draw_samples(W, ctx.plan);
    r.samples = static_cast<int>(s.product.size());

    r.lines.push_back(bounded_line(
        "product-gradient-soliton", LineRole::hypothesis,
        gradient_soliton_residual(W.product(), u, lambda, s.product, ctx.opt),
        ctx.tol.curvature));

    std::map<int, double> fix_fiber;
    for (int a = 0; a < n2; ++a) fix_fiber[n1 + a] = fiber_point[static_cast<std::size_t>(a)];
    const Expr u1 = u.expr.substituted(fix_fiber);
    const Expr phi1 = u1 - Expr::number(static_cast<double>(n2)) *
                               Expr::apply(Expr::Func::ln, W.warp().expr);
    r.lines.push_back(bounded_line(
        "base-gradient-soliton", LineRole::conclusion,
        gradient_soliton_residual(W.base(), ScalarField{phi1}, lambda, s.base, ctx.opt),
        ctx.tol.curvature));

    const auto grads = per_point(s.base, ctx.opt,
                                 [&](const Point& p1) { return warp_gradient_norm(W, p1, ctx.opt); });
    const double constancy = max_of(grads);
    r.lines.push_back(info_line("warp-constancy", constancy));

    std::map<int, double> fix_base;
    for (int i = 0; i < n1; ++i) fix_base[i] = base_point[static_cast<std::size_t>(i)];
    const Expr phi2 = u.expr.substituted(fix_base).shifted_variables(-n1);
    const double f0 = eval(W.warp().expr, base_point);
    const double lambda2 = lambda * f0 * f0 + f_star_at(W, base_point, ctx.opt.mode);
    r.lines.push_back(info_line("lambda2", lambda2));

    CheckLine fiber_line = bounded_line(
        "fiber-gradient-soliton", LineRole::conclusion,
        gradient_soliton_residual(W.fiber(), ScalarField{phi2}, lambda2, s.fiber, ctx.opt),
        ctx.tol.curvature);
    if (constancy > ctx.tol.exact) {
        fiber_line.skipped = true;
        fiber_line.passed = fiber_line.default_passed = true;
        fiber_line.note = "warp function is not constant; fiber statement does not apply";
    }
    r.lines.push_back(std::move(fiber_line));
    finalize_status(r);
    return r;
}

CheckResult run_s7(const WarpedProduct& W, int branch, double a, double b,
                   const CoordVectorField* zeta2, const SuiteContext& ctx) {
    if (W.base_dim() != 1) {
        throw std::invalid_argument("grw-concurrent needs a one-dimensional base");
    }
    if (branch != 1 && branch != 2) {
        throw std::invalid_argument("grw-concurrent branch must be 1 or 2");
    }
    CheckResult r;
    r.kind = suite_name("S7");
    const Samples s = draw_samples(W, ctx.plan);
    r.samples = static_cast<int>(s.product.size());

    LiftedPair pair;
    pair.base.components.push_back(Expr::variable(0) + Expr::number(a));
    pair.fiber = (branch == 1 && zeta2 != nullptr) ? *zeta2 : zero_field(W.fiber_dim());

    r.lines.push_back(info_line("base-signature", eval(W.base().metric_entry(0, 0), s.base.front())));

    if (branch == 1) {
        const auto fdot = per_point(s.base, ctx.opt, [&](const Point& p1) {
            return std::abs(jet_of(W.warp().expr, p1, 1, ctx.opt.mode).grad(0));
        });
        r.lines.push_back(bounded_line("warp-derivative-zero", LineRole::hypothesis,
                                       max_of(fdot), ctx.tol.exact));
        if (zeta2 == nullptr) {
            throw std::invalid_argument("grw-concurrent branch 1 needs a fiber field");
        }
        r.lines.push_back(bounded_line(
            "fiber-concurrent", LineRole::hypothesis,
            concurrent_residual(W.fiber(), pair.fiber, s.fiber, ctx.opt), ctx.tol.exact));
    } else {
        const auto lin = per_point(s.base, ctx.opt, [&](const Point& p1) {
            return std::abs(eval(W.warp().expr, p1) - b * (p1[0] + a));
        });
        r.lines.push_back(
            bounded_line("warp-linear", LineRole::hypothesis, max_of(lin), ctx.tol.exact));
    }

    r.lines.push_back(bounded_line(
        "product-concurrent", LineRole::conclusion,
        concurrent_residual(W.product(), W.lift(pair), s.product, ctx.opt), ctx.tol.exact));
    finalize_status(r);
    return r;
}

CheckResult run_s8(const WarpedProduct& W, const ScalarField& u_base, const SuiteContext& ctx) {
    if (W.base_dim() != 1) {
        throw std::invalid_argument("grw-gradient needs a one-dimensional base");
    }
    CheckResult r;
    r.kind = suite_name("S8");
    const Samples s = draw_samples(W, ctx.plan);
    r.samples = static_cast<int>(s.product.size());

    r.lines.push_back(info_line("base-signature", eval(W.base().metric_entry(0, 0), s.base.front())));

    const auto hyp = per_point(s.base, ctx.opt, [&](const Point& p1) {
        const double du = jet_of(u_base.expr, p1, 1, ctx.opt.mode).grad(0);
        return std::abs(du - eval(W.warp().expr, p1));
    });
    r.lines.push_back(
        bounded_line("potential-derivative", LineRole::hypothesis, max_of(hyp), ctx.tol.exact));

    struct Row {
        double hess_dev = 0.0, prop_dev = 0.0, cons_dev = 0.0, lambda = 0.0;
    };
    std::vector<Row> rows(s.product.size());
    for_each_index(s.product.size(), ctx.opt.policy, [&](std::size_t i) {
        const Point& p = s.product[i];
        const PointFrame f = frame_at(W.product(), p, ctx.opt.mode);
        const Point p1{p[0]};
        const double fdot = jet_of(W.warp().expr, p1, 1, ctx.opt.mode).grad(0);
        const Eigen::MatrixXd hu = hessian_at(f, u_base, ctx.opt.mode);
        const Eigen::MatrixXd ric = ricci_at(f);
        const double g_scale = inf_norm(f.g);
        const double mu =
            metric_inner(f.g_inv, ric, f.g) / metric_inner(f.g_inv, f.g, f.g);
        Row& row = rows[i];
        row.hess_dev = inf_norm(hu - fdot * f.g) / g_scale;
        row.prop_dev = inf_norm(ric - mu * f.g) / g_scale;
        row.lambda = fdot + mu;
        row.cons_dev = inf_norm(hu + ric - row.lambda * f.g) / g_scale;
    });

    double hess = 0.0, prop = 0.0, cons = 0.0;
    double lam_lo = rows.front().lambda, lam_hi = lam_lo;
    for (const Row& row : rows) {
        hess = std::max(hess, row.hess_dev);
        prop = std::max(prop, row.prop_dev);
        cons = std::max(cons, row.cons_dev);
        lam_lo = std::min(lam_lo, row.lambda);
        lam_hi = std::max(lam_hi, row.lambda);
    }

    r.lines.push_back(bounded_line("hessian-identity", LineRole::conclusion, hess, ctx.tol.exact));
    r.lines.push_back(info_line("ricci-proportional", prop));
    CheckLine cons_line =
        bounded_line("lambda-consistency", LineRole::conclusion, cons, ctx.tol.fit);
    if (prop > ctx.tol.fit) {
        cons_line.skipped = true;
        cons_line.passed = cons_line.default_passed = true;
        cons_line.note = "Ricci tensor is not proportional to the metric here";
    }
    r.lines.push_back(std::move(cons_line));
    r.lines.push_back(info_line("lambda-range", lam_hi - lam_lo));
    finalize_status(r);
    return r;
}

namespace {

double conformal_rho_at(const ChartManifold& M, const CoordVectorField& zeta, const Point& p,
                        const EvalOptions& opt) {
    const PointFrame f = frame_at(M, p, opt.mode);
    return (f.g_inv * lie_metric_at(f, zeta, opt.mode)).trace() / M.dim();
}

}  // namespace

CheckResult run_s9(const WarpedProduct& W, char part, const LiftedPair& zeta, int condition,
                   const SuiteContext& ctx) {
    CheckResult r;
    r.kind = suite_name("S9");
    const Samples s = draw_samples(W, ctx.plan);
    r.samples = static_cast<int>(s.product.size());
    const CoordVectorField lifted = W.lift(zeta);
    const int n2 = W.fiber_dim();

    if (part == 'a') {
        const SolitonFit sf = soliton_fit(W.product(), lifted, s.product, ctx.tol, ctx.opt);
        r.lines.push_back(bounded_line("product-soliton", LineRole::hypothesis,
                                       sf.residual_max, ctx.tol.fit));
        r.lines.push_back(info_line("lambda", sf.lambda));

        const ConformalFit c1 = conformal_fit(W.base(), zeta.base, s.base, ctx.tol, ctx.opt);
        const ConformalFit c2 = conformal_fit(W.fiber(), zeta.fiber, s.fiber, ctx.tol, ctx.opt);
        r.lines.push_back(
            bounded_line("base-conformal", LineRole::hypothesis, c1.residual, ctx.tol.exact));
        r.lines.push_back(
            bounded_line("fiber-conformal", LineRole::hypothesis, c2.residual, ctx.tol.exact));
        r.lines.push_back(info_line("rho1", c1.rho));
        r.lines.push_back(info_line("rho2", c2.rho));

        std::vector<double> rel(s.base.size(), 0.0);
        for_each_index(s.base.size(), ctx.opt.policy, [&](std::size_t i) {
            const double rho1 = conformal_rho_at(W.base(), zeta.base, s.base[i], ctx.opt);
            const double rho2 = conformal_rho_at(W.fiber(), zeta.fiber, s.fiber[i], ctx.opt);
            const double zlnf = zeta1_of_f(W, zeta.base, s.base[i], ctx.opt) /
                                eval(W.warp().expr, s.base[i]);
            rel[i] = std::abs(rho1 - rho2 - 2.0 * zlnf);
        });
        r.lines.push_back(
            bounded_line("factor-relation", LineRole::hypothesis, max_of(rel), ctx.tol.fit));

        const EinsteinFit ef = einstein_fit(W.product(), s.product, ctx.opt);
        r.lines.push_back(bounded_line("product-einstein", LineRole::conclusion,
                                       ef.residual_max, ctx.tol.fit));
        r.lines.push_back(info_line("mu", ef.mu));
    } else if (part == 'b') {
        if (condition < 1 || condition > 3) {
            throw std::invalid_argument("einstein-conditions part b condition must be 1, 2 or 3");
        }
        const SolitonFit sf = soliton_fit(W.product(), lifted, s.product, ctx.tol, ctx.opt);
        r.lines.push_back(bounded_line("product-soliton", LineRole::hypothesis,
                                       sf.residual_max, ctx.tol.fit));
        r.lines.push_back(info_line("lambda", sf.lambda));

        if (condition == 1 || condition == 3) {
            r.lines.push_back(bounded_line(
                "base-killing", LineRole::hypothesis,
                killing_residual(W.base(), zeta.base, s.base, ctx.opt), ctx.tol.exact));
        }
        if (condition == 2 || condition == 3) {
            r.lines.push_back(bounded_line(
                "fiber-killing", LineRole::hypothesis,
                killing_residual(W.fiber(), zeta.fiber, s.fiber, ctx.opt), ctx.tol.exact));
        }
        if (condition == 1) {
            r.lines.push_back(bounded_line("fiber-part-zero", LineRole::hypothesis,
                                           field_magnitude(zeta.fiber, s.fiber, ctx.opt),
                                           ctx.tol.exact));
        }
        if (condition == 2) {
            r.lines.push_back(bounded_line("base-part-zero", LineRole::hypothesis,
                                           field_magnitude(zeta.base, s.base, ctx.opt),
                                           ctx.tol.exact));
        }
        if (condition == 3) {
            const auto zf = per_point(s.base, ctx.opt, [&](const Point& p1) {
                return std::abs(zeta1_of_f(W, zeta.base, p1, ctx.opt));
            });
            r.lines.push_back(bounded_line("zeta1-f-zero", LineRole::hypothesis, max_of(zf),
                                           ctx.tol.exact));
        }

        const EinsteinFit ef = einstein_fit(W.product(), s.product, ctx.opt);
        r.lines.push_back(bounded_line("product-einstein", LineRole::conclusion,
                                       ef.residual_max, ctx.tol.fit));
        r.lines.push_back(info_line("mu", ef.mu));
    } else if (part == 'c') {
        const SolitonFit bsf = soliton_fit(W.base(), zeta.base, s.base, ctx.tol, ctx.opt);
        r.lines.push_back(
            bounded_line("base-soliton", LineRole::hypothesis, bsf.residual_max, ctx.tol.fit));
        r.lines.push_back(info_line("lambda", bsf.lambda));

        const EinsteinFit ef = einstein_fit(W.fiber(), s.fiber, ctx.opt);
        r.lines.push_back(
            bounded_line("fiber-einstein", LineRole::hypothesis, ef.residual_max, ctx.tol.fit));
        r.lines.push_back(info_line("mu", ef.mu));

        const ConformalFit cf = conformal_fit(W.fiber(), zeta.fiber, s.fiber, ctx.tol, ctx.opt);
        r.lines.push_back(
            bounded_line("fiber-conformal", LineRole::hypothesis, cf.residual, ctx.tol.exact));
        r.lines.push_back(
            bounded_line("rho-constancy", LineRole::hypothesis, cf.rho_spread, ctx.tol.fit));
        const double rho = cf.rho / 2.0;
        r.lines.push_back(info_line("rho", rho));

        const auto cvals = per_point(s.base, ctx.opt, [&](const Point& p1) {
            return warp_gradient_norm(W, p1, ctx.opt);
        });
        double c_lo = cvals.front(), c_hi = c_lo, c_sum = 0.0;
        for (double c : cvals) {
            c_lo = std::min(c_lo, c);
            c_hi = std::max(c_hi, c);
            c_sum += c;
        }
        const double c_bar = c_sum / static_cast<double>(cvals.size());
        r.lines.push_back(bounded_line("warp-gradient-constancy", LineRole::hypothesis,
                                       c_hi - c_lo, ctx.tol.fit));
        r.lines.push_back(info_line("c", c_bar));

        const double lambda = bsf.lambda;
        const auto rel = per_point(s.base, ctx.opt, [&](const Point& p1) {
            const double f = eval(W.warp().expr, p1);
            const double zf = zeta1_of_f(W, zeta.base, p1, ctx.opt);
            return std::abs((lambda - rho) * f * f - 2.0 * f * zf - ef.mu -
                            (n2 - 1) * c_bar * c_bar);
        });
        r.lines.push_back(
            bounded_line("factor-relation", LineRole::hypothesis, max_of(rel), ctx.tol.fit));

        const auto dev = per_point(s.product, ctx.opt, [&](const Point& p) {
            const PointFrame f = frame_at(W.product(), p, ctx.opt.mode);
            const Eigen::MatrixXd sm =
                0.5 * lie_metric_at(f, lifted, ctx.opt.mode) + ricci_at(f);
            return inf_norm(sm - lambda * f.g) / inf_norm(f.g);
        });
        r.lines.push_back(
            bounded_line("product-soliton", LineRole::conclusion, max_of(dev), ctx.tol.fit));
        const SolitonFit psf = soliton_fit(W.product(), lifted, s.product, ctx.tol, ctx.opt);
        r.lines.push_back(info_line("product-lambda-fit", psf.lambda));
    } else if (part == 'd') {
        const SolitonFit sf = soliton_fit(W.product(), lifted, s.product, ctx.tol, ctx.opt);
        r.lines.push_back(bounded_line("product-soliton", LineRole::hypothesis,
                                       sf.residual_max, ctx.tol.fit));
        r.lines.push_back(info_line("lambda", sf.lambda));
        r.lines.push_back(bounded_line(
            "concurrent", LineRole::hypothesis,
            concurrent_residual(W.product(), lifted, s.product, ctx.opt), ctx.tol.exact));

        const auto cvals = per_point(s.base, ctx.opt, [&](const Point& p1) {
            return warp_gradient_norm(W, p1, ctx.opt);
        });
        double c_lo = cvals.front(), c_hi = c_lo, c_sum = 0.0;
        for (double c : cvals) {
            c_lo = std::min(c_lo, c);
            c_hi = std::max(c_hi, c);
            c_sum += c;
        }
        const double c_bar = c_sum / static_cast<double>(cvals.size());
        r.lines.push_back(bounded_line("warp-gradient-constancy", LineRole::hypothesis,
                                       c_hi - c_lo, ctx.tol.fit));
        r.lines.push_back(info_line("c", c_bar));

        const EinsteinFit ef = einstein_fit(W.fiber(), s.fiber, ctx.opt);
        r.lines.push_back(
            bounded_line("fiber-einstein", LineRole::conclusion, ef.residual_max, ctx.tol.fit));
        r.lines.push_back(info_line("mu", ef.mu));

        const double c2 = c_bar * c_bar;
        r.lines.push_back(bounded_line("fiber-factor-paper", LineRole::conclusion,
                                       std::abs(ef.mu - (n2 - 1) * c2), ctx.tol.fit));
        r.lines.push_back(info_line("factor-candidate-fiber-dim", (n2 - 1) * c2));
        r.lines.push_back(info_line("factor-candidate-product-dim", n2 * c2));
        r.lines.push_back(info_line("factor-candidate-fiber-dim-signed", -(n2 - 1) * c2));
        r.lines.push_back(info_line("factor-candidate-product-dim-signed", -n2 * c2));
    } else {
        throw std::invalid_argument("einstein-conditions part must be a, b, c or d");
    }
    finalize_status(r);
    return r;
}

}  // namespace warpcheck
