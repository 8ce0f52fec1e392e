#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "warpcheck/chart.hpp"

using namespace warpcheck;

namespace {

// diag(x^2, 1): degenerate exactly on the x = 0 line
ChartManifold pinched() {
    const Expr x = Expr::variable(0);
    const Expr zero = Expr::number(0.0);
    return ChartManifold::from_metric(
        {"x", "y"}, {{-1.0, 1.0}, {-1.0, 1.0}},
        {{x * x, zero}, {zero, Expr::number(1.0)}});
}

}  // namespace

TEST_CASE("from_metric validates its inputs") {
    const Expr one = Expr::number(1.0);
    CHECK_THROWS_AS(ChartManifold::from_metric({}, {}, {}), std::invalid_argument);
    CHECK_THROWS_AS(
        ChartManifold::from_metric({"x"}, {{0.0, 1.0}, {0.0, 1.0}}, {{one}}),
        std::invalid_argument);
    CHECK_THROWS_AS(ChartManifold::from_metric({"x", "y"}, {{0.0, 1.0}, {0.0, 1.0}}, {{one}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(ChartManifold::from_metric({"x"}, {{0.0, 1.0}}, {{one, one}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(ChartManifold::from_metric({"x", "x"},
                                               {{0.0, 1.0}, {0.0, 1.0}},
                                               {{one, one}, {one, one}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(ChartManifold::from_metric({"x"}, {{1.0, 1.0}}, {{one}}),
                    std::invalid_argument);
}

TEST_CASE("standard charts have the documented metrics") {
    const ChartManifold e2 = euclidean(2);
    CHECK(e2.dim() == 2);
    CHECK(e2.coords() == std::vector<std::string>{"x", "y"});
    const double p[] = {1.0, 2.0};
    CHECK(e2.metric_at(p).isIdentity(0.0));

    const ChartManifold e5 = euclidean(5);
    CHECK(e5.coords().front() == "x1");
    CHECK(e5.coords().back() == "x5");
    CHECK_THROWS_AS(euclidean(0), std::invalid_argument);

    const ChartManifold s = sphere_chart(2.0);
    const double q[] = {1.0, 0.3};
    const Eigen::MatrixXd gs = s.metric_at(q);
    CHECK(gs(0, 0) == 4.0);
    CHECK(gs(1, 1) == doctest::Approx(4.0 * std::sin(1.0) * std::sin(1.0)).epsilon(1e-15));
    CHECK(gs(0, 1) == 0.0);
    CHECK(s.domain()[0][0] == 0.0);
    CHECK(s.domain()[0][1] == doctest::Approx(std::acos(-1.0)));
    CHECK_THROWS_AS(sphere_chart(-1.0), std::invalid_argument);

    const ChartManifold h = hyperbolic_chart(0.5);
    const double r[] = {0.3, 2.0};
    const Eigen::MatrixXd gh = h.metric_at(r);
    CHECK(gh(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(gh(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(gh(0, 1) == 0.0);
    CHECK_THROWS_AS(hyperbolic_chart(0.0), std::invalid_argument);

    const ChartManifold line = interval(-1, {0.0, 1.0});
    const double t[] = {0.5};
    CHECK(line.metric_at(t)(0, 0) == -1.0);
    CHECK(line.coords() == std::vector<std::string>{"t"});
    CHECK_THROWS_AS(interval(2, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("inverse metric and degeneracy detection") {
    const ChartManifold e3 = euclidean(3);
    const double p[] = {0.1, 0.2, 0.3};
    CHECK(e3.inverse_metric_at(p).isIdentity(1e-14));
    CHECK(e3.metric_invertible_at(p));

    const ChartManifold m = pinched();
    const double on_line[] = {0.0, 0.5};
    const double off_line[] = {1.0, 0.5};
    CHECK_FALSE(m.metric_invertible_at(on_line));
    CHECK_THROWS_AS(m.inverse_metric_at(on_line), DegenerateMetricError);
    CHECK(m.metric_invertible_at(off_line));
    CHECK(m.inverse_metric_at(off_line).isIdentity(1e-14));
}

TEST_CASE("sampling is deterministic and margin-trimmed") {
    const ChartManifold box = euclidean(2).with_domain({{0.0, 1.0}, {2.0, 4.0}});
    const SamplePlan plan{40, 9, 0.1};

    const auto a = box.sample_points(plan);
    const auto b = box.sample_points(plan);
    CHECK(a.size() == 40);
    CHECK(a == b);

    SamplePlan other = plan;
    other.seed = 10;
    CHECK(a != box.sample_points(other));

    for (const Point& p : a) {
        CHECK(p[0] >= 0.1);
        CHECK(p[0] <= 0.9);
        CHECK(p[1] >= 2.2);
        CHECK(p[1] <= 3.8);
    }
}

TEST_CASE("sampling redraws near-degenerate points") {
    const ChartManifold m = pinched();
    const auto pts = m.sample_points({100, 3, 0.05});
    CHECK(pts.size() == 100);
    for (const Point& p : pts) {
        CHECK(m.metric_invertible_at(p));
        CHECK(std::abs(p[0]) > 1e-7);
    }

    // identically zero metric: every draw is rejected
    const Expr x = Expr::variable(0);
    const ChartManifold dead =
        ChartManifold::from_metric({"x"}, {{0.0, 1.0}}, {{x - x}});
    CHECK_THROWS_AS(dead.sample_points({5, 0, 0.05}), SamplingError);
}

TEST_CASE("sampling plan validation") {
    const ChartManifold e1 = euclidean(1);
    CHECK_THROWS_AS(e1.sample_points({0, 0, 0.05}), SamplingError);
    CHECK_THROWS_AS(e1.sample_points({5, 0, 0.0}), SamplingError);
    CHECK_THROWS_AS(e1.sample_points({5, 0, 0.5}), SamplingError);

    const double inf = std::numeric_limits<double>::infinity();
    const ChartManifold ray = euclidean(1).with_domain({{0.0, inf}});
    CHECK_THROWS_AS(ray.sample_points({5, 0, 0.05}), SamplingError);
}

TEST_CASE("renaming and redomaining") {
    const ChartManifold s = sphere_chart(1.0);
    const ChartManifold r = s.renamed({"a", "b"});
    CHECK(r.coords() == std::vector<std::string>{"a", "b"});
    const double p[] = {0.8, 1.0};
    CHECK((r.metric_at(p) - s.metric_at(p)).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(s.renamed({"a"}), std::invalid_argument);
    CHECK_THROWS_AS(s.renamed({"a", "a"}), std::invalid_argument);

    const ChartManifold d = s.with_domain({{0.5, 2.5}, {0.0, 1.0}});
    CHECK(d.domain()[0][0] == 0.5);
    CHECK((d.metric_at(p) - s.metric_at(p)).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(s.with_domain({{0.5, 2.5}}), std::invalid_argument);
    CHECK_THROWS_AS(s.with_domain({{0.5, 0.5}, {0.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("the upper triangle is authoritative and shared") {
    const Expr x = Expr::variable(0);
    const Expr one = Expr::number(1.0);
    // lower entry deliberately different; it must be ignored
    const ChartManifold m = ChartManifold::from_metric(
        {"x", "y"}, {{0.1, 1.0}, {0.1, 1.0}},
        {{one, x}, {Expr::number(7.0), one}});
    CHECK(structurally_equal(m.metric_entry(0, 1), m.metric_entry(1, 0)));
    const double p[] = {0.5, 0.5};
    CHECK(m.metric_at(p)(1, 0) == 0.5);
}
