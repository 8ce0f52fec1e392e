#include "warpcheck/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace warpcheck {
namespace {

double inf_norm(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

// <A,B>_g = g^ik g^jl A_ij B_kl
double metric_inner(const Eigen::MatrixXd& g_inv, const Eigen::MatrixXd& a,
                    const Eigen::MatrixXd& b) {
    return (g_inv * a * g_inv * b).trace();
}

double g_norm(const Eigen::MatrixXd& g, const Eigen::VectorXd& v) {
    return std::sqrt(std::abs(v.dot(g * v)));
}

template <class Fn>
std::vector<double> per_point(std::span<const Point> pts, ExecPolicy policy, Fn&& fn) {
    std::vector<double> out(pts.size(), 0.0);
    for_each_index(pts.size(), policy, [&](std::size_t i) { out[i] = fn(pts[i]); });
    return out;
}

double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

}  // namespace

const char* to_string(SolitonVerdict v) {
    switch (v) {
        case SolitonVerdict::shrinking: return "shrinking";
        case SolitonVerdict::steady: return "steady";
        case SolitonVerdict::expanding: return "expanding";
        case SolitonVerdict::not_a_soliton: return "not-a-soliton";
    }
    return "not-a-soliton";
}

double killing_residual(const ChartManifold& M, const CoordVectorField& zeta,
                        std::span<const Point> pts, const EvalOptions& opt) {
    const int n = M.dim();
    const auto vals = per_point(pts, opt.policy, [&](const Point& p) {
        const PointFrame f = frame_at(M, p, opt.mode);
        const double g_scale = inf_norm(f.g);
        const Eigen::MatrixXd lie = lie_metric_at(f, zeta, opt.mode);
        double r = inf_norm(lie) / (2.0 * g_scale);

        Eigen::VectorXd zv(n);
        for (int k = 0; k < n; ++k) {
            zv(k) = eval(zeta.components[static_cast<std::size_t>(k)], p);
        }
        const double z_scale = 1.0 + g_norm(f.g, zv);
        for (int i = 0; i < n; ++i) {
            CoordVectorField ei;
            ei.components.assign(static_cast<std::size_t>(n), Expr::number(0.0));
            ei.components[static_cast<std::size_t>(i)] = Expr::number(1.0);
            const Eigen::VectorXd dz = covariant_derivative_at(f, M, ei, zeta, opt.mode);
            const double diag = std::abs(dz.dot(f.g.col(i)));
            r = std::max(r, diag / (g_scale * z_scale));
        }
        return r;
    });
    return max_of(vals);
}

ConformalFit conformal_fit(const ChartManifold& M, const CoordVectorField& zeta,
                           std::span<const Point> pts, const Tolerances& tol,
                           const EvalOptions& opt) {
    const int n = M.dim();
    struct Row {
        double rho = 0.0, residual = 0.0, num = 0.0, den = 0.0;
    };
    std::vector<Row> rows(pts.size());
    for_each_index(pts.size(), opt.policy, [&](std::size_t i) {
        const PointFrame f = frame_at(M, pts[i], opt.mode);
        const Eigen::MatrixXd lie = lie_metric_at(f, zeta, opt.mode);
        Row& r = rows[i];
        r.rho = (f.g_inv * lie).trace() / n;
        r.residual = inf_norm(lie - r.rho * f.g) / inf_norm(f.g);
        r.num = metric_inner(f.g_inv, lie, f.g);
        r.den = metric_inner(f.g_inv, f.g, f.g);
    });

    ConformalFit fit;
    double num = 0.0, den = 0.0;
    double lo = rows.empty() ? 0.0 : rows.front().rho;
    double hi = lo;
    for (const Row& r : rows) {
        num += r.num;
        den += r.den;
        lo = std::min(lo, r.rho);
        hi = std::max(hi, r.rho);
        fit.residual = std::max(fit.residual, r.residual);
    }
    fit.rho = den == 0.0 ? 0.0 : num / den;
    fit.rho_spread = hi - lo;
    fit.conformal = fit.residual <= tol.exact;
    fit.homothetic = fit.conformal && fit.rho_spread <= tol.exact;
    fit.killing = fit.homothetic && std::abs(fit.rho) <= tol.exact;
    return fit;
}

double concurrent_residual(const ChartManifold& M, const CoordVectorField& zeta,
                           std::span<const Point> pts, const EvalOptions& opt) {
    const int n = M.dim();
    const auto vals = per_point(pts, opt.policy, [&](const Point& p) {
        const PointFrame f = frame_at(M, p, opt.mode);
        double r = 0.0;
        for (int i = 0; i < n; ++i) {
            CoordVectorField ei;
            ei.components.assign(static_cast<std::size_t>(n), Expr::number(0.0));
            ei.components[static_cast<std::size_t>(i)] = Expr::number(1.0);
            Eigen::VectorXd err = covariant_derivative_at(f, M, ei, zeta, opt.mode);
            err(i) -= 1.0;
            const double ei_norm = std::sqrt(std::abs(f.g(i, i)));
            r = std::max(r, g_norm(f.g, err) / ei_norm);
        }
        return r;
    });
    return max_of(vals);
}

ScalarField half_norm_squared(const ChartManifold& M, const CoordVectorField& zeta) {
    const int n = M.dim();
    Expr sum = Expr::number(0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            sum = sum + M.metric_entry(i, j) * zeta.components[static_cast<std::size_t>(i)] *
                            zeta.components[static_cast<std::size_t>(j)];
        }
    }
    return ScalarField{Expr::number(0.5) * sum};
}

double gradient_potential_check(const ChartManifold& M, const CoordVectorField& zeta,
                                std::span<const Point> pts, const EvalOptions& opt) {
    const int n = M.dim();
    const ScalarField u = half_norm_squared(M, zeta);
    const auto vals = per_point(pts, opt.policy, [&](const Point& p) {
        const PointFrame f = frame_at(M, p, opt.mode);
        Eigen::VectorXd err = gradient_at(f, u, opt.mode);
        for (int k = 0; k < n; ++k) {
            err(k) -= eval(zeta.components[static_cast<std::size_t>(k)], p);
        }
        return g_norm(f.g, err);
    });
    return max_of(vals);
}

SolitonFit soliton_fit(const ChartManifold& M, const CoordVectorField& zeta,
                       std::span<const Point> pts, const Tolerances& tol,
                       const EvalOptions& opt) {
    struct Row {
        Eigen::MatrixXd s;
        double g_scale = 0.0, num = 0.0, den = 0.0, s_vs_g = 0.0;
    };
    std::vector<Row> rows(pts.size());
    std::vector<PointFrame> frames(pts.size());
    for_each_index(pts.size(), opt.policy, [&](std::size_t i) {
        PointFrame f = frame_at(M, pts[i], opt.mode);
        Row& r = rows[i];
        r.s = 0.5 * lie_metric_at(f, zeta, opt.mode) + ricci_at(f);
        r.g_scale = inf_norm(f.g);
        r.num = metric_inner(f.g_inv, r.s, f.g);
        r.den = metric_inner(f.g_inv, f.g, f.g);
        frames[i] = std::move(f);
    });

    SolitonFit fit;
    double num = 0.0, den = 0.0;
    for (const Row& r : rows) {
        num += r.num;
        den += r.den;
    }
    fit.lambda = den == 0.0 ? 0.0 : num / den;

    double sum = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double res =
            inf_norm(rows[i].s - fit.lambda * frames[i].g) / rows[i].g_scale;
        fit.residual_max = std::max(fit.residual_max, res);
        sum += res;
    }
    fit.residual_mean = rows.empty() ? 0.0 : sum / static_cast<double>(rows.size());

    if (fit.residual_max > tol.soliton_reject) {
        fit.verdict = SolitonVerdict::not_a_soliton;
    } else if (std::abs(fit.lambda) <= tol.steady_eps) {
        fit.verdict = SolitonVerdict::steady;
    } else {
        fit.verdict =
            fit.lambda > 0.0 ? SolitonVerdict::shrinking : SolitonVerdict::expanding;
    }
    return fit;
}

EinsteinFit einstein_fit(const ChartManifold& M, std::span<const Point> pts,
                         const EvalOptions& opt) {
    struct Row {
        Eigen::MatrixXd ric, g;
        double num = 0.0, den = 0.0;
    };
    std::vector<Row> rows(pts.size());
    for_each_index(pts.size(), opt.policy, [&](std::size_t i) {
        const PointFrame f = frame_at(M, pts[i], opt.mode);
        Row& r = rows[i];
        r.ric = ricci_at(f);
        r.g = f.g;
        r.num = metric_inner(f.g_inv, r.ric, f.g);
        r.den = metric_inner(f.g_inv, f.g, f.g);
    });

    EinsteinFit fit;
    double num = 0.0, den = 0.0;
    for (const Row& r : rows) {
        num += r.num;
        den += r.den;
    }
    fit.mu = den == 0.0 ? 0.0 : num / den;
    for (const Row& r : rows) {
        fit.residual_max =
            std::max(fit.residual_max, inf_norm(r.ric - fit.mu * r.g) / inf_norm(r.g));
    }
    return fit;
}

double gradient_soliton_residual(const ChartManifold& M, const ScalarField& u, double lambda,
                                 std::span<const Point> pts, const EvalOptions& opt) {
    const auto vals = per_point(pts, opt.policy, [&](const Point& p) {
        const PointFrame f = frame_at(M, p, opt.mode);
        return inf_norm(hessian_at(f, u, opt.mode) + ricci_at(f) - lambda * f.g);
    });
    return max_of(vals);
}

double zeta_of_f_residual(const WarpedProduct& W, const CoordVectorField& zeta1,
                          std::span<const Point> base_pts, const EvalOptions& opt) {
    const int n1 = W.base_dim();
    const auto vals = per_point(base_pts, opt.policy, [&](const Point& p1) {
        const Jet2 jf = jet_of(W.warp().expr, p1, n1, opt.mode);
        double zf = 0.0;
        for (int i = 0; i < n1; ++i) {
            zf += eval(zeta1.components[static_cast<std::size_t>(i)], p1) * jf.grad(i);
        }
        return std::abs(zf - jf.value);
    });
    return max_of(vals);
}

FieldClassification classify_field(const ChartManifold& M, const CoordVectorField& zeta,
                                   std::span<const Point> pts, const Tolerances& tol,
                                   const EvalOptions& opt) {
    FieldClassification c;
    c.killing_residual = killing_residual(M, zeta, pts, opt);
    c.conformal = conformal_fit(M, zeta, pts, tol, opt);
    c.concurrent_residual = concurrent_residual(M, zeta, pts, opt);
    c.gradient_potential_residual = gradient_potential_check(M, zeta, pts, opt);
    return c;
}

}  // namespace warpcheck
