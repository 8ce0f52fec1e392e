#pragma once

namespace warpcheck {

// Central tolerance ladder. "exact" covers identities the jet pipeline
// satisfies to rounding, "curvature" covers second-derivative pipelines,
// "fit" covers fitted constants.
struct Tolerances {
    double algebraic = 1e-9;       // metric compatibility, E1 assembly
    double lie_agreement = 1e-8;   // Lie-derivative block assembly vs direct
    double exact = 1e-6;           // jet-exact identities, jet-vs-FD gradients
    double curvature = 1e-5;       // Ricci-level oracle agreement
    double fit = 1e-4;             // fitted constants (lambda, mu, Einstein factors)
    double mixed_ricci = 1e-7;     // direct mixed Ricci block bound
    double soliton_reject = 1e-3;  // above this the fit is not a soliton
    double steady_eps = 1e-8;      // |lambda| below this counts as steady
};

}  // namespace warpcheck
