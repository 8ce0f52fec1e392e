#include "warpcheck/warped.hpp"

#include <set>

namespace warpcheck {
namespace {

// X(f) = X^i d_i f, everything on the base chart.
double directional_derivative(const CoordVectorField& X, const Jet2& jf, const Point& p1) {
    double s = 0.0;
    for (int i = 0; i < jf.grad.size(); ++i) {
        s += eval(X.components[static_cast<std::size_t>(i)], p1) * jf.grad(i);
    }
    return s;
}

Eigen::VectorXd field_values(const CoordVectorField& X, const Point& p) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(X.components.size()));
    for (std::size_t i = 0; i < X.components.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = eval(X.components[i], p);
    }
    return v;
}

}  // namespace

WarpedProduct WarpedProduct::build(ChartManifold base, ChartManifold fiber, ScalarField f) {
    std::set<std::string> names(base.coords().begin(), base.coords().end());
    for (const std::string& c : fiber.coords()) {
        if (names.count(c) != 0) {
            throw WarpingError("coordinate name '" + c +
                               "' appears in both factors; rename the fiber chart");
        }
    }
    if (f.expr.max_variable_index() >= base.dim()) {
        throw WarpingError("warping function uses a variable outside the base chart");
    }

    SamplePlan plan;
    for (const Point& p1 : base.sample_points(plan)) {
        const double v = eval(f.expr, p1);
        if (!(v > 0.0)) {
            throw WarpingError("warping function is not positive on the base domain");
        }
    }

    const int n1 = base.dim();
    const int n2 = fiber.dim();
    std::vector<std::string> coords = base.coords();
    coords.insert(coords.end(), fiber.coords().begin(), fiber.coords().end());
    std::vector<std::array<double, 2>> domain = base.domain();
    domain.insert(domain.end(), fiber.domain().begin(), fiber.domain().end());

    const Expr zero = Expr::number(0.0);
    const Expr f2 = f.expr * f.expr;
    std::vector<std::vector<Expr>> metric(static_cast<std::size_t>(n1 + n2),
                                          std::vector<Expr>(static_cast<std::size_t>(n1 + n2),
                                                            zero));
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n1; ++j) {
            metric[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                base.metric_entry(i, j);
        }
    }
    for (int a = 0; a < n2; ++a) {
        for (int b = 0; b < n2; ++b) {
            metric[static_cast<std::size_t>(n1 + a)][static_cast<std::size_t>(n1 + b)] =
                f2 * fiber.metric_entry(a, b).shifted_variables(n1);
        }
    }

    WarpedProduct W;
    W.base_ = std::move(base);
    W.fiber_ = std::move(fiber);
    W.f_ = std::move(f);
    W.product_ = ChartManifold::from_metric(std::move(coords), std::move(domain),
                                            std::move(metric));
    return W;
}

std::pair<Point, Point> WarpedProduct::split_point(std::span<const double> p) const {
    const int n1 = base_.dim();
    Point p1(p.begin(), p.begin() + n1);
    Point p2(p.begin() + n1, p.end());
    return {std::move(p1), std::move(p2)};
}

CoordVectorField WarpedProduct::lift(const LiftedPair& zeta) const {
    const int n1 = base_.dim();
    CoordVectorField out;
    out.components = zeta.base.components;
    for (const Expr& c : zeta.fiber.components) {
        out.components.push_back(c.shifted_variables(n1));
    }
    return out;
}

BlockTensor WarpedProduct::split_matrix(const Eigen::MatrixXd& m) const {
    const int n1 = base_.dim();
    const int n2 = fiber_.dim();
    BlockTensor b;
    b.base = m.topLeftCorner(n1, n1);
    b.fiber = m.bottomRightCorner(n2, n2);
    b.mixed = m.topRightCorner(n1, n2);
    return b;
}

double f_star_at(const WarpedProduct& W, std::span<const double> p1, DiffMode mode) {
    const int n2 = W.fiber_dim();
    const PointFrame fr = frame_at(W.base(), p1, mode);
    const Jet2 jf = jet_of(W.warp().expr, p1, W.base_dim(), mode);
    const Eigen::MatrixXd hess = hessian_at(fr, W.warp(), mode);
    const double lap = (fr.g_inv * hess).trace();
    const Eigen::VectorXd grad = fr.g_inv * jf.grad;
    const double grad_sq = grad.dot(fr.g * grad);
    return jf.value * lap + (n2 - 1) * grad_sq;
}

Eigen::VectorXd connection_blocks_at(const WarpedProduct& W, const LiftedPair& X,
                                     const LiftedPair& Y, std::span<const double> p,
                                     DiffMode mode) {
    const int n1 = W.base_dim();
    const int n2 = W.fiber_dim();
    const auto [p1, p2] = W.split_point(p);

    const PointFrame f1 = frame_at(W.base(), p1, mode);
    const Jet2 jf = jet_of(W.warp().expr, p1, n1, mode);
    const double fval = jf.value;
    const Eigen::VectorXd grad_f = f1.g_inv * jf.grad;

    const Eigen::VectorXd x2 = field_values(X.fiber, p2);
    const Eigen::VectorXd y2 = field_values(Y.fiber, p2);
    const Eigen::MatrixXd g2 = W.fiber().metric_at(p2);
    const double g2xy = x2.dot(g2 * y2);

    const Eigen::VectorXd d1 = covariant_derivative_at(f1, W.base(), X.base, Y.base, mode);
    const Eigen::VectorXd d2 =
        covariant_derivative_at(W.fiber(), X.fiber, Y.fiber, p2, mode);
    const double xf_over_f = directional_derivative(X.base, jf, p1) / fval;
    const double yf_over_f = directional_derivative(Y.base, jf, p1) / fval;

    Eigen::VectorXd out(n1 + n2);
    out.head(n1) = d1 - fval * g2xy * grad_f;
    out.tail(n2) = xf_over_f * y2 + yf_over_f * x2 + d2;
    return out;
}

BlockTensor ricci_blocks_at(const WarpedProduct& W, std::span<const double> p, DiffMode mode) {
    const int n1 = W.base_dim();
    const int n2 = W.fiber_dim();
    const auto [p1, p2] = W.split_point(p);

    const PointFrame f1 = frame_at(W.base(), p1, mode);
    const double fval = eval(W.warp().expr, p1);

    BlockTensor b;
    b.base = ricci_at(f1) - (n2 / fval) * hessian_at(f1, W.warp(), mode);
    b.fiber = ricci_at(W.fiber(), p2, mode) - f_star_at(W, p1, mode) * W.fiber().metric_at(p2);
    b.mixed = Eigen::MatrixXd::Zero(n1, n2);
    return b;
}

BlockTensor lie_blocks_at(const WarpedProduct& W, const LiftedPair& zeta,
                          std::span<const double> p, DiffMode mode) {
    const int n1 = W.base_dim();
    const int n2 = W.fiber_dim();
    const auto [p1, p2] = W.split_point(p);

    const Jet2 jf = jet_of(W.warp().expr, p1, n1, mode);
    const double fval = jf.value;
    const double zf = directional_derivative(zeta.base, jf, p1);

    BlockTensor b;
    b.base = lie_metric_at(W.base(), zeta.base, p1, mode);
    b.fiber = fval * fval * lie_metric_at(W.fiber(), zeta.fiber, p2, mode) +
              2.0 * fval * zf * W.fiber().metric_at(p2);
    b.mixed = Eigen::MatrixXd::Zero(n1, n2);
    return b;
}

}  // namespace warpcheck
