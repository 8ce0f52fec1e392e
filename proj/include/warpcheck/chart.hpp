#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "warpcheck/expr.hpp"

namespace warpcheck {

class DegenerateMetricError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SamplingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// How many points to draw, where the RNG starts, and how much of each
// coordinate interval is trimmed to keep samples strictly interior.
struct SamplePlan {
    int count = 200;
    std::uint64_t seed = 0;
    double margin = 0.05;
};

using Point = std::vector<double>;

// A (pseudo-)Riemannian manifold on a single coordinate chart. The metric is
// a symmetric matrix of expressions over the chart coordinates; g_ij and
// g_ji share the same tree. Immutable after construction.
class ChartManifold {
public:
    static ChartManifold from_metric(std::vector<std::string> coords,
                                     std::vector<std::array<double, 2>> domain,
                                     std::vector<std::vector<Expr>> metric);

    int dim() const { return dim_; }
    const std::vector<std::string>& coords() const { return coords_; }
    const std::vector<std::array<double, 2>>& domain() const { return domain_; }
    const Expr& metric_entry(int i, int j) const {
        return metric_[static_cast<std::size_t>(i * dim_ + j)];
    }

    Eigen::MatrixXd metric_at(std::span<const double> p) const;
    Eigen::MatrixXd inverse_metric_at(std::span<const double> p) const;

    // |det g| at p together with the degeneracy threshold it is judged by.
    bool metric_invertible_at(std::span<const double> p) const;

    // Deterministic rejection sampling: points are uniform on the
    // margin-trimmed domain and points with near-degenerate metric are
    // redrawn (bounded retries).
    std::vector<Point> sample_points(const SamplePlan& plan) const;

    // Same chart with renamed coordinates (expressions are index-based, so
    // the metric carries over unchanged).
    ChartManifold renamed(std::vector<std::string> new_coords) const;
    ChartManifold with_domain(std::vector<std::array<double, 2>> domain) const;

private:
    ChartManifold() = default;
    int dim_ = 0;
    std::vector<std::string> coords_;
    std::vector<std::array<double, 2>> domain_;
    std::vector<Expr> metric_;  // row-major dim x dim
};

// A vector field given by one component expression per chart coordinate.
struct CoordVectorField {
    std::vector<Expr> components;
};

struct ScalarField {
    Expr expr;
};

// --- standard charts ---------------------------------------------------------

// Flat R^n, identity metric. Coordinates x,y,z,w for n <= 4, else x1..xn;
// default sampling box (-3, 3)^n.
ChartManifold euclidean(int n);

// Round sphere of the given radius in (theta, phi), metric
// diag(r^2, r^2 sin^2 theta); domain (0, pi) x (0, 2 pi).
ChartManifold sphere_chart(double radius);

// Hyperbolic plane of constant curvature -k, upper half-plane model in
// (x, y): metric (1 / (k y^2)) * (dx^2 + dy^2), y > 0.
ChartManifold hyperbolic_chart(double k);

// One-dimensional chart in t with constant metric (signature), signature
// +1 or -1; the -1 case is the -dt^2 line of a spacetime product.
ChartManifold interval(int signature, std::array<double, 2> bounds);

}  // namespace warpcheck
