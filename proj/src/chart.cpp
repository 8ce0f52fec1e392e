#include "warpcheck/chart.hpp"

#include <cmath>
#include <random>

namespace warpcheck {

namespace {

constexpr double kDegeneracyEps = 1e-12;

// 53-bit mapping to [0,1); keeps sampling identical across standard library
// implementations, unlike uniform_real_distribution.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double degeneracy_threshold(const Eigen::MatrixXd& g) {
    double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    return kDegeneracyEps * std::pow(scale, g.rows());
}

}  // namespace

ChartManifold ChartManifold::from_metric(std::vector<std::string> coords,
                                         std::vector<std::array<double, 2>> domain,
                                         std::vector<std::vector<Expr>> metric) {
    const int n = static_cast<int>(coords.size());
    if (n < 1) throw std::invalid_argument("chart needs at least one coordinate");
    if (static_cast<int>(domain.size()) != n)
        throw std::invalid_argument("domain entries must match coordinate count");
    if (static_cast<int>(metric.size()) != n)
        throw std::invalid_argument("metric matrix rows must match coordinate count");
    for (const auto& row : metric)
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("metric matrix must be square");
    for (std::size_t i = 0; i < coords.size(); ++i)
        for (std::size_t j = i + 1; j < coords.size(); ++j)
            if (coords[i] == coords[j])
                throw std::invalid_argument("duplicate coordinate name '" + coords[i] + "'");
    for (const auto& [lo, hi] : domain)
        if (!(lo < hi)) throw std::invalid_argument("empty coordinate interval");

    ChartManifold m;
    m.dim_ = n;
    m.coords_ = std::move(coords);
    m.domain_ = std::move(domain);
    m.metric_.resize(static_cast<std::size_t>(n * n));
    // upper triangle is authoritative; g_ji shares g_ij's tree
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const Expr& e = metric[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (!e.valid()) throw std::invalid_argument("missing metric entry");
            m.metric_[static_cast<std::size_t>(i * n + j)] = e;
            m.metric_[static_cast<std::size_t>(j * n + i)] = e;
        }
    return m;
}

Eigen::MatrixXd ChartManifold::metric_at(std::span<const double> p) const {
    Eigen::MatrixXd g(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) {
            double v = eval(metric_entry(i, j), p);
            g(i, j) = v;
            g(j, i) = v;
        }
    return g;
}

Eigen::MatrixXd ChartManifold::inverse_metric_at(std::span<const double> p) const {
    Eigen::MatrixXd g = metric_at(p);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
    if (std::abs(lu.determinant()) < degeneracy_threshold(g))
        throw DegenerateMetricError("metric is degenerate at the requested point");
    return lu.inverse();
}

bool ChartManifold::metric_invertible_at(std::span<const double> p) const {
    Eigen::MatrixXd g = metric_at(p);
    return std::abs(g.determinant()) >= degeneracy_threshold(g);
}

std::vector<Point> ChartManifold::sample_points(const SamplePlan& plan) const {
    if (plan.count < 1) throw SamplingError("sample count must be at least 1");
    if (!(plan.margin > 0.0) || !(plan.margin < 0.5))
        throw SamplingError("sample margin must lie in (0, 0.5)");
    for (const auto& [lo, hi] : domain_)
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw SamplingError("sampling requires finite domain bounds");

    std::vector<std::array<double, 2>> trimmed(domain_.size());
    for (std::size_t k = 0; k < domain_.size(); ++k) {
        double lo = domain_[k][0], hi = domain_[k][1];
        double pad = plan.margin * (hi - lo);
        trimmed[k] = {lo + pad, hi - pad};
    }

    std::mt19937_64 rng(plan.seed);
    std::vector<Point> points;
    points.reserve(static_cast<std::size_t>(plan.count));
    const long max_draws = 1000L * plan.count;
    long draws = 0;
    Point p(static_cast<std::size_t>(dim_));
    while (static_cast<int>(points.size()) < plan.count) {
        if (draws++ >= max_draws)
            throw SamplingError("sampling exhausted: too many near-degenerate points");
        for (std::size_t k = 0; k < p.size(); ++k)
            p[k] = trimmed[k][0] + uniform01(rng) * (trimmed[k][1] - trimmed[k][0]);
        try {
            if (!metric_invertible_at(p)) continue;
        } catch (const EvalError&) {
            continue;  // metric expression pole; redraw
        }
        points.push_back(p);
    }
    return points;
}

ChartManifold ChartManifold::renamed(std::vector<std::string> new_coords) const {
    if (static_cast<int>(new_coords.size()) != dim_)
        throw std::invalid_argument("renamed() needs one name per coordinate");
    for (std::size_t i = 0; i < new_coords.size(); ++i)
        for (std::size_t j = i + 1; j < new_coords.size(); ++j)
            if (new_coords[i] == new_coords[j])
                throw std::invalid_argument("duplicate coordinate name '" + new_coords[i] + "'");
    ChartManifold m = *this;
    m.coords_ = std::move(new_coords);
    return m;
}

ChartManifold ChartManifold::with_domain(std::vector<std::array<double, 2>> domain) const {
    if (static_cast<int>(domain.size()) != dim_)
        throw std::invalid_argument("with_domain() needs one interval per coordinate");
    for (const auto& [lo, hi] : domain)
        if (!(lo < hi)) throw std::invalid_argument("empty coordinate interval");
    ChartManifold m = *this;
    m.domain_ = std::move(domain);
    return m;
}

// --- standard charts ---------------------------------------------------------

ChartManifold euclidean(int n) {
    if (n < 1) throw std::invalid_argument("euclidean dimension must be >= 1");
    static const char* named[] = {"x", "y", "z", "w"};
    std::vector<std::string> coords;
    for (int i = 0; i < n; ++i)
        coords.push_back(n <= 4 ? named[i] : "x" + std::to_string(i + 1));
    std::vector<std::array<double, 2>> domain(static_cast<std::size_t>(n),
                                              std::array<double, 2>{-3.0, 3.0});
    std::vector<std::vector<Expr>> g(static_cast<std::size_t>(n),
                                     std::vector<Expr>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g[i][j] = Expr::number(i == j ? 1.0 : 0.0);
    return ChartManifold::from_metric(std::move(coords), std::move(domain), std::move(g));
}

ChartManifold sphere_chart(double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("sphere radius must be positive");
    const double pi = std::acos(-1.0);
    Expr r2 = Expr::number(radius * radius);
    Expr theta = Expr::variable(0);
    Expr zero = Expr::number(0.0);
    std::vector<std::vector<Expr>> g = {
        {r2, zero},
        {zero, r2 * Expr::apply(Expr::Func::sin, theta) * Expr::apply(Expr::Func::sin, theta)},
    };
    return ChartManifold::from_metric({"theta", "phi"}, {{0.0, pi}, {0.0, 2.0 * pi}},
                                      std::move(g));
}

ChartManifold hyperbolic_chart(double k) {
    if (!(k > 0.0)) throw std::invalid_argument("hyperbolic curvature scale must be positive");
    // conformal factor 1/(k y^2); scaling the standard half-plane metric by
    // 1/k moves the curvature from -1 to -k
    Expr y = Expr::variable(1);
    Expr conf = Expr::number(1.0) / (Expr::number(k) * y * y);
    Expr zero = Expr::number(0.0);
    std::vector<std::vector<Expr>> g = {{conf, zero}, {zero, conf}};
    return ChartManifold::from_metric({"x", "y"}, {{-2.0, 2.0}, {0.25, 4.0}}, std::move(g));
}

ChartManifold interval(int signature, std::array<double, 2> bounds) {
    if (signature != 1 && signature != -1)
        throw std::invalid_argument("interval signature must be +1 or -1");
    Expr gtt = signature == 1 ? Expr::number(1.0) : -Expr::number(1.0);
    return ChartManifold::from_metric({"t"}, {bounds}, {{gtt}});
}

}  // namespace warpcheck
