#include "warpcheck/geometry.hpp"

#include <cmath>

namespace warpcheck {
namespace {

// Central differences of plain evaluation. Steps scale with coordinate
// magnitude: h1 ~ 1e-5, h2 ~ 1e-4 per axis.
double fd_step1(double x) { return 1e-5 * (1.0 + std::abs(x)); }
double fd_step2(double x) { return 1e-4 * (1.0 + std::abs(x)); }

Jet2 fd_jet(const Expr& e, std::span<const double> p, int dim) {
    Jet2 out;
    out.value = eval(e, p);
    out.grad = Eigen::VectorXd::Zero(dim);
    out.hess = Eigen::MatrixXd::Zero(dim, dim);
    std::vector<double> q(p.begin(), p.end());
    for (int k = 0; k < dim; ++k) {
        const double h = fd_step1(p[k]);
        q[k] = p[k] + h;
        const double up = eval(e, q);
        q[k] = p[k] - h;
        const double dn = eval(e, q);
        q[k] = p[k];
        out.grad(k) = (up - dn) / (2.0 * h);
    }
    for (int k = 0; k < dim; ++k) {
        const double hk = fd_step2(p[k]);
        q[k] = p[k] + hk;
        const double up = eval(e, q);
        q[k] = p[k] - hk;
        const double dn = eval(e, q);
        q[k] = p[k];
        out.hess(k, k) = (up - 2.0 * out.value + dn) / (hk * hk);
        for (int l = k + 1; l < dim; ++l) {
            const double hl = fd_step2(p[l]);
            q[k] = p[k] + hk;
            q[l] = p[l] + hl;
            const double pp = eval(e, q);
            q[l] = p[l] - hl;
            const double pm = eval(e, q);
            q[k] = p[k] - hk;
            const double mm = eval(e, q);
            q[l] = p[l] + hl;
            const double mp = eval(e, q);
            q[k] = p[k];
            q[l] = p[l];
            const double mixed = (pp - pm - mp + mm) / (4.0 * hk * hl);
            out.hess(k, l) = mixed;
            out.hess(l, k) = mixed;
        }
    }
    return out;
}

}  // namespace

Jet2 jet_of(const Expr& e, std::span<const double> p, int dim, DiffMode mode) {
    if (mode == DiffMode::jets) return eval_jet2(e, p);
    return fd_jet(e, p, dim);
}

PointFrame frame_at(const ChartManifold& M, std::span<const double> p, DiffMode mode) {
    const int n = M.dim();
    PointFrame f;
    f.point.assign(p.begin(), p.end());
    f.g = Eigen::MatrixXd::Zero(n, n);
    f.dg.assign(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(n, n));
    f.d2g.assign(static_cast<std::size_t>(n),
                 std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(n),
                                              Eigen::MatrixXd::Zero(n, n)));
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const Jet2 jet = jet_of(M.metric_entry(i, j), p, n, mode);
            f.g(i, j) = jet.value;
            f.g(j, i) = jet.value;
            for (int k = 0; k < n; ++k) {
                f.dg[static_cast<std::size_t>(k)](i, j) = jet.grad(k);
                f.dg[static_cast<std::size_t>(k)](j, i) = jet.grad(k);
                for (int l = 0; l < n; ++l) {
                    f.d2g[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)](i, j) =
                        jet.hess(k, l);
                    f.d2g[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)](j, i) =
                        jet.hess(k, l);
                }
            }
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(f.g);
    if (!lu.isInvertible()) {
        throw DegenerateMetricError("metric is numerically singular at sample point");
    }
    f.g_inv = lu.inverse();

    f.gamma = Tensor3(n);
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l) {
                    s += f.g_inv(k, l) *
                         (f.dg[static_cast<std::size_t>(i)](j, l) +
                          f.dg[static_cast<std::size_t>(j)](i, l) -
                          f.dg[static_cast<std::size_t>(l)](i, j));
                }
                s *= 0.5;
                f.gamma(k, i, j) = s;
                f.gamma(k, j, i) = s;
            }
        }
    }
    return f;
}

Tensor3 christoffel_at(const ChartManifold& M, std::span<const double> p, DiffMode mode) {
    return frame_at(M, p, mode).gamma;
}

std::vector<Tensor3> christoffel_derivatives(const PointFrame& f) {
    const int n = f.dim();
    // d_m g^kl = -(g^-1 dg_m g^-1)^kl
    std::vector<Eigen::MatrixXd> dginv(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        dginv[static_cast<std::size_t>(m)] =
            -f.g_inv * f.dg[static_cast<std::size_t>(m)] * f.g_inv;
    }
    std::vector<Tensor3> dgamma(static_cast<std::size_t>(n), Tensor3(n));
    for (int m = 0; m < n; ++m) {
        Tensor3& out = dgamma[static_cast<std::size_t>(m)];
        const Eigen::MatrixXd& dinv = dginv[static_cast<std::size_t>(m)];
        for (int k = 0; k < n; ++k) {
            for (int i = 0; i < n; ++i) {
                for (int j = i; j < n; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < n; ++l) {
                        const double first = f.dg[static_cast<std::size_t>(i)](j, l) +
                                             f.dg[static_cast<std::size_t>(j)](i, l) -
                                             f.dg[static_cast<std::size_t>(l)](i, j);
                        const double second =
                            f.d2g[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)](j, l) +
                            f.d2g[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)](i, l) -
                            f.d2g[static_cast<std::size_t>(m)][static_cast<std::size_t>(l)](i, j);
                        s += dinv(k, l) * first + f.g_inv(k, l) * second;
                    }
                    s *= 0.5;
                    out(k, i, j) = s;
                    out(k, j, i) = s;
                }
            }
        }
    }
    return dgamma;
}

Eigen::MatrixXd ricci_at(const PointFrame& f) {
    const int n = f.dim();
    const std::vector<Tensor3> dgamma = christoffel_derivatives(f);
    Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) {
                s += dgamma[static_cast<std::size_t>(k)](k, i, j);
                s -= dgamma[static_cast<std::size_t>(i)](k, k, j);
                for (int l = 0; l < n; ++l) {
                    s += f.gamma(k, k, l) * f.gamma(l, i, j);
                    s -= f.gamma(k, i, l) * f.gamma(l, k, j);
                }
            }
            ric(i, j) = s;
        }
    }
    // d2g symmetry makes ric symmetric up to rounding; symmetrize to keep
    // downstream contractions clean.
    return 0.5 * (ric + ric.transpose());
}

Eigen::MatrixXd ricci_at(const ChartManifold& M, std::span<const double> p, DiffMode mode) {
    return ricci_at(frame_at(M, p, mode));
}

double scalar_curvature_at(const ChartManifold& M, std::span<const double> p, DiffMode mode) {
    const PointFrame f = frame_at(M, p, mode);
    const Eigen::MatrixXd ric = ricci_at(f);
    return (f.g_inv * ric).trace();
}

Eigen::VectorXd covariant_derivative_at(const PointFrame& f, const ChartManifold& M,
                                        const CoordVectorField& X, const CoordVectorField& zeta,
                                        DiffMode mode) {
    const int n = f.dim();
    Eigen::VectorXd xv(n), zv(n);
    Eigen::MatrixXd dz(n, n);  // dz(i, k) = d_i zeta^k
    for (int k = 0; k < n; ++k) {
        xv(k) = eval(X.components[static_cast<std::size_t>(k)], f.point);
        const Jet2 jz = jet_of(zeta.components[static_cast<std::size_t>(k)], f.point, n, mode);
        zv(k) = jz.value;
        for (int i = 0; i < n; ++i) dz(i, k) = jz.grad(i);
    }
    (void)M;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            s += xv(i) * dz(i, k);
            for (int j = 0; j < n; ++j) s += f.gamma(k, i, j) * xv(i) * zv(j);
        }
        out(k) = s;
    }
    return out;
}

Eigen::VectorXd covariant_derivative_at(const ChartManifold& M, const CoordVectorField& X,
                                        const CoordVectorField& zeta, std::span<const double> p,
                                        DiffMode mode) {
    return covariant_derivative_at(frame_at(M, p, mode), M, X, zeta, mode);
}

Eigen::VectorXd gradient_at(const PointFrame& f, const ScalarField& u, DiffMode mode) {
    const int n = f.dim();
    const Jet2 ju = jet_of(u.expr, f.point, n, mode);
    return f.g_inv * ju.grad;
}

Eigen::VectorXd gradient_at(const ChartManifold& M, const ScalarField& u,
                            std::span<const double> p, DiffMode mode) {
    return gradient_at(frame_at(M, p, mode), u, mode);
}

Eigen::MatrixXd hessian_at(const PointFrame& f, const ScalarField& u, DiffMode mode) {
    const int n = f.dim();
    const Jet2 ju = jet_of(u.expr, f.point, n, mode);
    Eigen::MatrixXd h(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = ju.hess(i, j);
            for (int k = 0; k < n; ++k) s -= f.gamma(k, i, j) * ju.grad(k);
            h(i, j) = s;
        }
    }
    return h;
}

Eigen::MatrixXd hessian_at(const ChartManifold& M, const ScalarField& u, std::span<const double> p,
                           DiffMode mode) {
    return hessian_at(frame_at(M, p, mode), u, mode);
}

double laplacian_at(const ChartManifold& M, const ScalarField& u, std::span<const double> p,
                    DiffMode mode) {
    const PointFrame f = frame_at(M, p, mode);
    return (f.g_inv * hessian_at(f, u, mode)).trace();
}

Eigen::MatrixXd lie_metric_at(const PointFrame& f, const CoordVectorField& zeta, DiffMode mode) {
    const int n = f.dim();
    Eigen::VectorXd zv(n);
    Eigen::MatrixXd dz(n, n);  // dz(i, k) = d_i zeta^k
    for (int k = 0; k < n; ++k) {
        const Jet2 jz = jet_of(zeta.components[static_cast<std::size_t>(k)], f.point, n, mode);
        zv(k) = jz.value;
        for (int i = 0; i < n; ++i) dz(i, k) = jz.grad(i);
    }
    Eigen::MatrixXd lie(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) {
                s += zv(k) * f.dg[static_cast<std::size_t>(k)](i, j);
                s += f.g(k, j) * dz(i, k);
                s += f.g(i, k) * dz(j, k);
            }
            lie(i, j) = s;
        }
    }
    return lie;
}

Eigen::MatrixXd lie_metric_at(const ChartManifold& M, const CoordVectorField& zeta,
                              std::span<const double> p, DiffMode mode) {
    return lie_metric_at(frame_at(M, p, mode), zeta, mode);
}

}  // namespace warpcheck
