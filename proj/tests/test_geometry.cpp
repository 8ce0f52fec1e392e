#include <doctest.h>

#include <cmath>
#include <vector>

#include "warpcheck/geometry.hpp"

using namespace warpcheck;

namespace {

// flat plane in polar coordinates: g = dr^2 + r^2 dphi^2
ChartManifold polar() {
    const Expr r = Expr::variable(0);
    const Expr zero = Expr::number(0.0);
    return ChartManifold::from_metric({"r", "phi"}, {{0.5, 3.0}, {0.1, 6.1}},
                                      {{Expr::number(1.0), zero}, {zero, r * r}});
}

double tensor3_max(const Tensor3& t) {
    double m = 0.0;
    for (int k = 0; k < t.dim(); ++k)
        for (int i = 0; i < t.dim(); ++i)
            for (int j = 0; j < t.dim(); ++j) m = std::max(m, std::abs(t(k, i, j)));
    return m;
}

CoordVectorField basis(int n, int i) {
    CoordVectorField e;
    e.components.assign(static_cast<std::size_t>(n), Expr::number(0.0));
    e.components[static_cast<std::size_t>(i)] = Expr::number(1.0);
    return e;
}

// (L_zeta g)_ij = g(D_{e_i} zeta, e_j) + g(e_i, D_{e_j} zeta)
Eigen::MatrixXd lie_via_covariant(const ChartManifold& M, const CoordVectorField& zeta,
                                  const Point& p) {
    const int n = M.dim();
    const PointFrame f = frame_at(M, p);
    Eigen::MatrixXd dz(n, n);  // column i holds D_{e_i} zeta
    for (int i = 0; i < n; ++i) dz.col(i) = covariant_derivative_at(f, M, basis(n, i), zeta);
    Eigen::MatrixXd lie(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            lie(i, j) = dz.col(i).dot(f.g.col(j)) + dz.col(j).dot(f.g.col(i));
    return lie;
}

}  // namespace

TEST_CASE("christoffel symbols in polar coordinates") {
    // nonzero: Gamma^r_pp = -r, Gamma^p_rp = Gamma^p_pr = 1/r
    const ChartManifold m = polar();
    const double p[] = {2.0, 1.0};
    const Tensor3 g = christoffel_at(m, p);
    CHECK(g(0, 1, 1) == doctest::Approx(-2.0).epsilon(1e-13));
    CHECK(g(1, 0, 1) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(g(1, 1, 0) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(std::abs(g(0, 0, 0)) < 1e-13);
    CHECK(std::abs(g(0, 0, 1)) < 1e-13);
    CHECK(std::abs(g(1, 0, 0)) < 1e-13);
    CHECK(std::abs(g(1, 1, 1)) < 1e-13);
}

TEST_CASE("christoffel symbols on the round sphere") {
    // Gamma^theta_pp = -sin cos, Gamma^phi_tp = cot
    const ChartManifold s = sphere_chart(1.0);
    const double theta = 0.8;
    const double p[] = {theta, 2.0};
    const Tensor3 g = christoffel_at(s, p);
    CHECK(g(0, 1, 1) == doctest::Approx(-std::sin(theta) * std::cos(theta)).epsilon(1e-12));
    CHECK(g(1, 0, 1) == doctest::Approx(std::cos(theta) / std::sin(theta)).epsilon(1e-12));
    CHECK(std::abs(g(0, 0, 0)) < 1e-12);
    CHECK(std::abs(g(1, 1, 1)) < 1e-12);
}

TEST_CASE("ricci matches constant-curvature values") {
    const std::vector<Point> pts = {{0.7, 1.1}, {2.0, 4.0}, {1.4, 0.6}};
    for (const Point& p : pts) {
        CAPTURE(p[0]);

        const ChartManifold s1 = sphere_chart(1.0);
        CHECK((ricci_at(s1, p) - s1.metric_at(p)).cwiseAbs().maxCoeff() < 1e-9);

        // Ric = (1/r^2) g on a radius-r sphere
        const ChartManifold s2 = sphere_chart(2.0);
        CHECK((ricci_at(s2, p) - 0.25 * s2.metric_at(p)).cwiseAbs().maxCoeff() < 1e-9);
    }

    const std::vector<Point> hp = {{0.3, 1.0}, {-1.0, 2.5}};
    for (const Point& p : hp) {
        const ChartManifold h1 = hyperbolic_chart(1.0);
        CHECK((ricci_at(h1, p) + h1.metric_at(p)).cwiseAbs().maxCoeff() < 1e-9);
        const ChartManifold hq = hyperbolic_chart(0.25);
        CHECK((ricci_at(hq, p) + 0.25 * hq.metric_at(p)).cwiseAbs().maxCoeff() < 1e-9);
    }

    const double q3[] = {0.2, -0.4, 1.0};
    CHECK(ricci_at(euclidean(3), q3).cwiseAbs().maxCoeff() < 1e-14);

    const double pol[] = {1.5, 2.0};
    CHECK(ricci_at(polar(), pol).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("scalar curvature of the model spaces") {
    const double p[] = {1.1, 2.2};
    CHECK(scalar_curvature_at(sphere_chart(1.0), p) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(scalar_curvature_at(sphere_chart(2.0), p) == doctest::Approx(0.5).epsilon(1e-9));
    const double h[] = {0.5, 1.5};
    CHECK(scalar_curvature_at(hyperbolic_chart(1.0), h) == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(scalar_curvature_at(hyperbolic_chart(4.0), h) == doctest::Approx(-8.0).epsilon(1e-9));
    CHECK(std::abs(scalar_curvature_at(euclidean(2), h)) < 1e-14);
}

TEST_CASE("laplace eigenfunction on the unit sphere") {
    // u = cos(theta) has Lap u = -2u and Hess u = -u g
    const ChartManifold s = sphere_chart(1.0);
    const ScalarField u{Expr::apply(Expr::Func::cos, Expr::variable(0))};
    for (const Point& p : std::vector<Point>{{0.9, 2.1}, {1.7, 0.4}}) {
        const double c = std::cos(p[0]);
        CHECK(laplacian_at(s, u, p) == doctest::Approx(-2.0 * c).epsilon(1e-11));
        CHECK((hessian_at(s, u, p) + c * s.metric_at(p)).cwiseAbs().maxCoeff() < 1e-11);
        const Eigen::VectorXd grad = gradient_at(s, u, p);
        CHECK(grad(0) == doctest::Approx(-std::sin(p[0])).epsilon(1e-12));
        CHECK(std::abs(grad(1)) < 1e-13);
    }
}

TEST_CASE("flat gradient, hessian and laplacian") {
    const ChartManifold e2 = euclidean(2);
    const Expr x = Expr::variable(0), y = Expr::variable(1);
    const ScalarField u{x * x + y * y};
    const double p[] = {1.2, -0.7};
    const Eigen::VectorXd grad = gradient_at(e2, u, p);
    CHECK(grad(0) == doctest::Approx(2.4).epsilon(1e-15));
    CHECK(grad(1) == doctest::Approx(-1.4).epsilon(1e-15));
    CHECK((hessian_at(e2, u, p) - 2.0 * Eigen::MatrixXd::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() < 1e-14);
    CHECK(laplacian_at(e2, u, p) == doctest::Approx(4.0).epsilon(1e-15));

    const ScalarField v{x * y};
    const Eigen::MatrixXd h = hessian_at(e2, v, p);
    CHECK(h(0, 1) == 1.0);
    CHECK(h(0, 0) == 0.0);
}

TEST_CASE("covariant derivative recognizes the polar radial field") {
    // zeta = r d_r: D_X zeta = X for every X
    const ChartManifold m = polar();
    CoordVectorField zeta;
    zeta.components = {Expr::variable(0), Expr::number(0.0)};
    const double p[] = {1.7, 2.3};
    for (int i = 0; i < 2; ++i) {
        Eigen::VectorXd d = covariant_derivative_at(m, basis(2, i), zeta, p);
        d(i) -= 1.0;
        CHECK(d.cwiseAbs().maxCoeff() < 1e-13);
    }

    // frame overload agrees with the chart overload
    const PointFrame f = frame_at(m, p);
    const Eigen::VectorXd a = covariant_derivative_at(f, m, basis(2, 0), zeta);
    const Eigen::VectorXd b = covariant_derivative_at(m, basis(2, 0), zeta, p);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lie derivative agrees with its covariant assembly") {
    const ChartManifold s = sphere_chart(1.0);
    CoordVectorField zeta;
    zeta.components = {Expr::variable(1) * Expr::variable(0),
                       Expr::apply(Expr::Func::sin, Expr::variable(0))};
    for (const Point& p : std::vector<Point>{{0.9, 2.1}, {1.9, 4.8}}) {
        const Eigen::MatrixXd direct = lie_metric_at(s, zeta, p);
        CHECK((direct - lie_via_covariant(s, zeta, p)).cwiseAbs().maxCoeff() < 1e-9);
    }

    const ChartManifold h = hyperbolic_chart(1.0);
    CoordVectorField w;
    w.components = {Expr::variable(0) * Expr::variable(0),
                    Expr::variable(0) * Expr::variable(1)};
    const Point p = {0.4, 1.2};
    CHECK((lie_metric_at(h, w, p) - lie_via_covariant(h, w, p)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("killing fields annihilate the metric") {
    const ChartManifold s = sphere_chart(1.0);
    CoordVectorField dphi;
    dphi.components = {Expr::number(0.0), Expr::number(1.0)};
    const double p[] = {0.8, 1.3};
    CHECK(lie_metric_at(s, dphi, p).cwiseAbs().maxCoeff() < 1e-14);

    const ChartManifold e2 = euclidean(2);
    CoordVectorField rot;
    rot.components = {-Expr::variable(1), Expr::variable(0)};
    CHECK(lie_metric_at(e2, rot, p).cwiseAbs().maxCoeff() == 0.0);

    // the half-plane dilation (x, y) is hyperbolic-isometric
    const ChartManifold h = hyperbolic_chart(1.0);
    CoordVectorField dil;
    dil.components = {Expr::variable(0), Expr::variable(1)};
    const double q[] = {0.6, 2.0};
    CHECK(lie_metric_at(h, dil, q).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("finite differences corroborate jets") {
    const ChartManifold s = sphere_chart(1.0);
    const double p[] = {0.9, 2.0};

    const Tensor3 gj = christoffel_at(s, p, DiffMode::jets);
    const Tensor3 gf = christoffel_at(s, p, DiffMode::finite_difference);
    double dmax = 0.0;
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) dmax = std::max(dmax, std::abs(gj(k, i, j) - gf(k, i, j)));
    CHECK(dmax < 1e-6);

    CHECK((ricci_at(s, p, DiffMode::jets) - ricci_at(s, p, DiffMode::finite_difference))
              .cwiseAbs()
              .maxCoeff() < 1e-5);

    const ChartManifold h = hyperbolic_chart(1.0);
    const double q[] = {0.3, 1.4};
    CHECK(scalar_curvature_at(h, q, DiffMode::finite_difference) ==
          doctest::Approx(-2.0).epsilon(1e-5));

    const ScalarField u{Expr::apply(Expr::Func::cos, Expr::variable(0))};
    CHECK((gradient_at(s, u, p, DiffMode::jets) -
           gradient_at(s, u, p, DiffMode::finite_difference))
              .cwiseAbs()
              .maxCoeff() < 1e-6);
    CHECK((hessian_at(s, u, p, DiffMode::jets) -
           hessian_at(s, u, p, DiffMode::finite_difference))
              .cwiseAbs()
              .maxCoeff() < 1e-4);
}

TEST_CASE("point frames are internally consistent") {
    const ChartManifold s = sphere_chart(1.5);
    const double p[] = {1.1, 0.7};
    const PointFrame f = frame_at(s, p);

    CHECK((f.g - s.metric_at(p)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((f.g_inv * f.g).isIdentity(1e-13));
    for (int k = 0; k < 2; ++k) {
        CHECK((f.dg[k] - f.dg[k].transpose()).cwiseAbs().maxCoeff() == 0.0);
        for (int l = 0; l < 2; ++l)
            CHECK((f.d2g[k][l] - f.d2g[l][k]).cwiseAbs().maxCoeff() == 0.0);
    }

    const Expr x = Expr::variable(0);
    const ChartManifold pinched = ChartManifold::from_metric(
        {"x"}, {{-1.0, 1.0}}, {{x * x}});
    const double zero[] = {0.0};
    CHECK_THROWS_AS(frame_at(pinched, zero), DegenerateMetricError);
}

TEST_CASE("christoffel derivatives match finite differences") {
    const ChartManifold s = sphere_chart(1.0);
    const Point p = {1.1, 0.7};
    const std::vector<Tensor3> dg = christoffel_derivatives(frame_at(s, p));

    const double h = 1e-5;
    for (int m = 0; m < 2; ++m) {
        Point up = p, dn = p;
        up[static_cast<std::size_t>(m)] += h;
        dn[static_cast<std::size_t>(m)] -= h;
        const Tensor3 gu = christoffel_at(s, up);
        const Tensor3 gd = christoffel_at(s, dn);
        Tensor3 fd(2);
        double dev = 0.0;
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    fd(k, i, j) = (gu(k, i, j) - gd(k, i, j)) / (2.0 * h);
                    dev = std::max(dev, std::abs(fd(k, i, j) - dg[m](k, i, j)));
                }
        CHECK(dev < 1e-5);
    }
    CHECK(tensor3_max(dg[0]) > 0.1);  // phi-derivatives vanish, theta's do not
    CHECK(tensor3_max(dg[1]) < 1e-12);
}
