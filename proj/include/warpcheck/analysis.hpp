#pragma once

#include <span>
#include <vector>

#include "warpcheck/batch.hpp"
#include "warpcheck/geometry.hpp"
#include "warpcheck/tolerances.hpp"
#include "warpcheck/warped.hpp"

namespace warpcheck {

// Shared knobs for every sampled residual: which points, which derivative
// backend, and whether point loops run on one thread or many.
struct EvalOptions {
    DiffMode mode = DiffMode::jets;
    ExecPolicy policy = ExecPolicy::parallel;
};

struct ConformalFit {
    double rho = 0.0;         // least-squares constant factor of L_zeta g against g
    double rho_spread = 0.0;  // max - min of the pointwise factor trace(g^-1 L)/dim
    double residual = 0.0;    // max_p ||L - rho(p) g||_inf / ||g(p)||_inf
    bool killing = false;     // residual, spread and |rho| all below tolerance
    bool homothetic = false;  // residual and spread below tolerance
    bool conformal = false;   // residual below tolerance
};

enum class SolitonVerdict { shrinking, steady, expanding, not_a_soliton };

struct SolitonFit {
    double lambda = 0.0;
    double residual_max = 0.0;
    double residual_mean = 0.0;
    SolitonVerdict verdict = SolitonVerdict::not_a_soliton;
};

struct EinsteinFit {
    double mu = 0.0;
    double residual_max = 0.0;
};

struct FieldClassification {
    double killing_residual = 0.0;
    ConformalFit conformal;
    double concurrent_residual = 0.0;
    double gradient_potential_residual = 0.0;
};

const char* to_string(SolitonVerdict v);

// max over samples of ||L_zeta g||_inf / (2 ||g||_inf) and of the
// |g(D_i zeta, e_i)| diagonal probe; zero exactly when zeta is Killing.
double killing_residual(const ChartManifold& M, const CoordVectorField& zeta,
                        std::span<const Point> pts, const EvalOptions& opt = {});

// Pointwise factor rho(p) = trace(g^-1 L)/dim, least-squares constant, and
// the residual of L against the pointwise-conformal model.
ConformalFit conformal_fit(const ChartManifold& M, const CoordVectorField& zeta,
                           std::span<const Point> pts, const Tolerances& tol = {},
                           const EvalOptions& opt = {});

// max over samples and coordinate directions of ||D_i zeta - e_i||_g / ||e_i||_g.
double concurrent_residual(const ChartManifold& M, const CoordVectorField& zeta,
                           std::span<const Point> pts, const EvalOptions& opt = {});

// u = 1/2 g_ij zeta^i zeta^j assembled symbolically.
ScalarField half_norm_squared(const ChartManifold& M, const CoordVectorField& zeta);

// max over samples of ||zeta - grad(1/2 ||zeta||^2)||_g.
double gradient_potential_check(const ChartManifold& M, const CoordVectorField& zeta,
                                std::span<const Point> pts, const EvalOptions& opt = {});

// S = 1/2 L_zeta g + Ric; lambda* = sum<S,g>_g / sum<g,g>_g over samples with
// <A,B>_g = g^ik g^jl A_ij B_kl; residuals of S - lambda* g, normalized
// per point by ||g||_inf.
SolitonFit soliton_fit(const ChartManifold& M, const CoordVectorField& zeta,
                       std::span<const Point> pts, const Tolerances& tol = {},
                       const EvalOptions& opt = {});

// Same fit applied to Ric against g.
EinsteinFit einstein_fit(const ChartManifold& M, std::span<const Point> pts,
                         const EvalOptions& opt = {});

// max over samples of ||H^u + Ric - lambda g||_inf.
double gradient_soliton_residual(const ChartManifold& M, const ScalarField& u, double lambda,
                                 std::span<const Point> pts, const EvalOptions& opt = {});

// max over base samples of |zeta1(f) - f| for a base field of a warped
// product; zero characterizes the warp-compatible radial fields.
double zeta_of_f_residual(const WarpedProduct& W, const CoordVectorField& zeta1,
                          std::span<const Point> base_pts, const EvalOptions& opt = {});

FieldClassification classify_field(const ChartManifold& M, const CoordVectorField& zeta,
                                   std::span<const Point> pts, const Tolerances& tol = {},
                                   const EvalOptions& opt = {});

}  // namespace warpcheck
