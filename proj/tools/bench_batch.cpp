#include <benchmark/benchmark.h>

#include "warpcheck/analysis.hpp"

using namespace warpcheck;

namespace {

// Cone over the unit sphere with its radial field: enough curvature to keep
// the kernels honest, cheap enough to sweep sample counts.
const WarpedProduct& cone() {
    static const WarpedProduct W = WarpedProduct::build(
        interval(1, {0.5, 3.0}), sphere_chart(1.0),
        ScalarField{Expr::variable(0)});
    return W;
}

CoordVectorField radial3() {
    CoordVectorField z;
    z.components = {Expr::variable(0), Expr::number(0.0), Expr::number(0.0)};
    return z;
}

std::vector<Point> points(int count) {
    SamplePlan plan;
    plan.count = count;
    plan.seed = 11;
    return cone().product().sample_points(plan);
}

void bm_soliton_fit(benchmark::State& state, ExecPolicy policy) {
    const auto pts = points(static_cast<int>(state.range(0)));
    const CoordVectorField zeta = radial3();
    const EvalOptions opt{DiffMode::jets, policy};
    for (auto _ : state) {
        SolitonFit f = soliton_fit(cone().product(), zeta, pts, Tolerances{}, opt);
        benchmark::DoNotOptimize(f);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_ricci_blocks(benchmark::State& state, ExecPolicy policy) {
    const auto pts = points(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        std::vector<double> worst(pts.size());
        for_each_index(pts.size(), policy, [&](std::size_t i) {
            const BlockTensor b = ricci_blocks_at(cone(), pts[i]);
            worst[i] = b.base.cwiseAbs().maxCoeff() + b.fiber.cwiseAbs().maxCoeff();
        });
        benchmark::DoNotOptimize(worst.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_concurrent(benchmark::State& state, ExecPolicy policy) {
    const auto pts = points(static_cast<int>(state.range(0)));
    const CoordVectorField zeta = radial3();
    const EvalOptions opt{DiffMode::jets, policy};
    for (auto _ : state) {
        double r = concurrent_residual(cone().product(), zeta, pts, opt);
        benchmark::DoNotOptimize(r);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(bm_soliton_fit, serial, ExecPolicy::serial)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(bm_soliton_fit, parallel, ExecPolicy::parallel)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(bm_ricci_blocks, serial, ExecPolicy::serial)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(bm_ricci_blocks, parallel, ExecPolicy::parallel)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(bm_concurrent, serial, ExecPolicy::serial)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(bm_concurrent, parallel, ExecPolicy::parallel)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
