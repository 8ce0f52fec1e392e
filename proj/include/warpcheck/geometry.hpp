#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "warpcheck/chart.hpp"

namespace warpcheck {

// Derivative backend. Jets are the primary path; central finite differences
// of plain evaluation are the independent cross-check (CLI --diff fd).
enum class DiffMode { jets, finite_difference };

// dim^3 array with value(k, i, j) = Gamma^k_ij; symmetric in (i, j).
class Tensor3 {
public:
    explicit Tensor3(int dim = 0) : dim_(dim), v_(static_cast<std::size_t>(dim * dim * dim), 0.0) {}
    double& operator()(int k, int i, int j) {
        return v_[static_cast<std::size_t>((k * dim_ + i) * dim_ + j)];
    }
    double operator()(int k, int i, int j) const {
        return v_[static_cast<std::size_t>((k * dim_ + i) * dim_ + j)];
    }
    int dim() const { return dim_; }

private:
    int dim_;
    std::vector<double> v_;
};

// Everything pointwise tensor operations need at one chart point: metric,
// inverse, metric derivatives up to second order, and Christoffel symbols.
struct PointFrame {
    Point point;
    Eigen::MatrixXd g, g_inv;
    std::vector<Eigen::MatrixXd> dg;                // dg[k](i,j)    = d_k g_ij
    std::vector<std::vector<Eigen::MatrixXd>> d2g;  // d2g[k][l](i,j) = d_k d_l g_ij
    Tensor3 gamma;

    int dim() const { return static_cast<int>(point.size()); }
};

// Jet of a single expression under the chosen backend; chart supplies the
// coordinate count.
Jet2 jet_of(const Expr& e, std::span<const double> p, int dim, DiffMode mode);

PointFrame frame_at(const ChartManifold& M, std::span<const double> p,
                    DiffMode mode = DiffMode::jets);

// Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij)
Tensor3 christoffel_at(const ChartManifold& M, std::span<const double> p,
                       DiffMode mode = DiffMode::jets);

// (D_X zeta)^k = X^i d_i zeta^k + Gamma^k_ij X^i zeta^j
Eigen::VectorXd covariant_derivative_at(const ChartManifold& M, const CoordVectorField& X,
                                        const CoordVectorField& zeta, std::span<const double> p,
                                        DiffMode mode = DiffMode::jets);
Eigen::VectorXd covariant_derivative_at(const PointFrame& f, const ChartManifold& M,
                                        const CoordVectorField& X, const CoordVectorField& zeta,
                                        DiffMode mode = DiffMode::jets);

// Ric_ij = d_k Gamma^k_ij - d_i Gamma^k_kj + Gamma^k_kl Gamma^l_ij
//          - Gamma^k_il Gamma^l_kj
Eigen::MatrixXd ricci_at(const ChartManifold& M, std::span<const double> p,
                         DiffMode mode = DiffMode::jets);
Eigen::MatrixXd ricci_at(const PointFrame& f);

double scalar_curvature_at(const ChartManifold& M, std::span<const double> p,
                           DiffMode mode = DiffMode::jets);

// (grad u)^i = g^ij d_j u
Eigen::VectorXd gradient_at(const ChartManifold& M, const ScalarField& u,
                            std::span<const double> p, DiffMode mode = DiffMode::jets);
Eigen::VectorXd gradient_at(const PointFrame& f, const ScalarField& u,
                            DiffMode mode = DiffMode::jets);

// H^u_ij = d_i d_j u - Gamma^k_ij d_k u
Eigen::MatrixXd hessian_at(const ChartManifold& M, const ScalarField& u,
                           std::span<const double> p, DiffMode mode = DiffMode::jets);
Eigen::MatrixXd hessian_at(const PointFrame& f, const ScalarField& u,
                           DiffMode mode = DiffMode::jets);

double laplacian_at(const ChartManifold& M, const ScalarField& u, std::span<const double> p,
                    DiffMode mode = DiffMode::jets);

// (L_zeta g)_ij = zeta^k d_k g_ij + g_kj d_i zeta^k + g_ik d_j zeta^k,
// assembled from metric derivatives directly; the covariant E1 form
// g(D_i zeta, j) + g(i, D_j zeta) is kept as an independent cross-check.
Eigen::MatrixXd lie_metric_at(const ChartManifold& M, const CoordVectorField& zeta,
                              std::span<const double> p, DiffMode mode = DiffMode::jets);
Eigen::MatrixXd lie_metric_at(const PointFrame& f, const CoordVectorField& zeta,
                              DiffMode mode = DiffMode::jets);

// d_m Gamma^k_ij from the closed-form Gamma expression, using second metric
// derivatives and d g^-1 = -g^-1 (dg) g^-1.
std::vector<Tensor3> christoffel_derivatives(const PointFrame& f);

}  // namespace warpcheck
