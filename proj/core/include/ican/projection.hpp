#pragma once

#include "ican/curve.hpp"
#include "ican/dependence.hpp"
#include "ican/sample.hpp"

#include <span>

namespace ican {

// Latent coordinates outside this window are clamped inside the objective;
// unconstrained values far from the data produce spuriously independent
// residuals.
inline constexpr double kLatentClampLo = -0.5;
inline constexpr double kLatentClampHi = 1.5;

// HSIC(NX, NY) + HSIC(NX, T) + HSIC(NY, T) with residuals
// (NX_k, NY_k) = (x_k, y_k) - s(T_k) and bandwidths recomputed from the
// actual arguments at every call.
double dependence_objective(std::span<const double> latents, const CurvePath& curve,
                            const PairedSample& data);

struct ProjectionResult {
    LatentAssignment latents;
    DependenceReport nx_ny;
    DependenceReport nx_t;
    DependenceReport ny_t;
    double objective = 0.0;
    bool budget_exhausted = false;
};

// Adjust all latent coordinates jointly with Nelder-Mead to minimize the
// three-term dependence objective; the curve stays fixed. Never returns an
// assignment whose objective exceeds the start's.
ProjectionResult optimize_projection(const CurvePath& curve, const PairedSample& data,
                                     const LatentAssignment& start, long eval_budget = 20000);

}  // namespace ican
