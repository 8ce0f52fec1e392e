#pragma once

#include <span>
#include <utility>

#include <Eigen/Dense>

#include "warpcheck/chart.hpp"
#include "warpcheck/geometry.hpp"

namespace warpcheck {

class WarpingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The three blocks of a symmetric bilinear form on a product chart:
// base (n1 x n1), fiber (n2 x n2), mixed (n1 x n2).
struct BlockTensor {
    Eigen::MatrixXd base;
    Eigen::MatrixXd fiber;
    Eigen::MatrixXd mixed;
};

// A vector field on the product that splits as zeta1 (components over base
// coords only) plus zeta2 (components over fiber coords only). This is the
// class the closed-form block identities quantify over.
struct LiftedPair {
    CoordVectorField base;   // n1 components, variables 0..n1-1
    CoordVectorField fiber;  // n2 components, variables 0..n2-1 (fiber's own chart)
};

// M1 x_f M2 with metric g1 + f^2 g2. Holds the factors, the warping
// function, and the assembled product chart.
class WarpedProduct {
public:
    // Rejects fiber/base coordinate-name collisions and warping functions
    // that fail to be strictly positive at sampled base points.
    static WarpedProduct build(ChartManifold base, ChartManifold fiber, ScalarField f);

    const ChartManifold& base() const { return base_; }
    const ChartManifold& fiber() const { return fiber_; }
    const ChartManifold& product() const { return product_; }
    const ScalarField& warp() const { return f_; }
    int base_dim() const { return base_.dim(); }
    int fiber_dim() const { return fiber_.dim(); }

    std::pair<Point, Point> split_point(std::span<const double> p) const;

    // Product-chart field for a lifted pair: base components as-is, fiber
    // components with their variables shifted past the base coordinates.
    CoordVectorField lift(const LiftedPair& zeta) const;

    BlockTensor split_matrix(const Eigen::MatrixXd& m) const;

private:
    WarpedProduct() = default;
    ChartManifold base_{euclidean(1)};
    ChartManifold fiber_{euclidean(1)};
    ChartManifold product_{euclidean(2)};
    ScalarField f_{Expr::number(1.0)};
};

// f* = f Lap f + (n2 - 1) g1(grad f, grad f), all on the base factor.
double f_star_at(const WarpedProduct& W, std::span<const double> p1,
                 DiffMode mode = DiffMode::jets);

// Closed-form covariant derivative D_X Y for lifted pairs, assembled per
// block and returned in product components:
//   base part  = D1_{X1}Y1 - f g2(X2,Y2) grad f
//   fiber part = (X1(f)/f) Y2 + (Y1(f)/f) X2 + D2_{X2}Y2
Eigen::VectorXd connection_blocks_at(const WarpedProduct& W, const LiftedPair& X,
                                     const LiftedPair& Y, std::span<const double> p,
                                     DiffMode mode = DiffMode::jets);

// Ricci of the product from base/fiber quantities only:
//   base  = Ric1 - (n2/f) Hess1 f,  mixed = 0,  fiber = Ric2 - f* g2
BlockTensor ricci_blocks_at(const WarpedProduct& W, std::span<const double> p,
                            DiffMode mode = DiffMode::jets);

// Lie derivative of the product metric along a lifted pair:
//   base  = L1_{zeta1} g1,  mixed = 0,
//   fiber = f^2 L2_{zeta2} g2 + 2 f zeta1(f) g2
BlockTensor lie_blocks_at(const WarpedProduct& W, const LiftedPair& zeta,
                          std::span<const double> p, DiffMode mode = DiffMode::jets);

}  // namespace warpcheck
