#pragma once

#include "ican/curve.hpp"
#include "ican/dependence.hpp"
#include "ican/projection.hpp"
#include "ican/sample.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ican {

enum class Decision { XtoY, YtoX, Confounder, NoCanFit };

const char* to_string(Decision d);

struct IcanConfig {
    double alpha = 0.05;
    int max_iterations = 10;   // K
    long eval_budget = 20000;
    double ratio_low = 0.2;
    double ratio_high = 5.0;
    std::uint64_t seed = 0;
};

struct IterationLog {
    double objective = 0.0;
    double p_nx_ny = 0.0;
    double p_nx_t = 0.0;
    double p_ny_t = 0.0;
};

struct IcanResult {
    Decision decision = Decision::NoCanFit;
    LatentAssignment t_hat;
    CurveModel curve;
    double var_ratio = 1.0;               // Var(NX_hat) / Var(NY_hat)
    DependenceReport nx_ny;
    DependenceReport nx_t;
    DependenceReport ny_t;
    int iterations_used = 0;
    std::vector<IterationLog> log;
    std::vector<double> init_l2_log;      // principal-curve alternation objectives
};

// True when the posterior mean is strictly monotone (margin 1e-6) on a
// 500-node grid over [t_lo, t_hi].
bool check_invertible(const GPModel& component, double t_lo, double t_hi);

// Decision rule once a CAN fit is accepted: XtoY when the X residual
// variance is small and u invertible, YtoX symmetrically, else Confounder.
Decision decide(double var_ratio, const CurveModel& curve, const IcanConfig& config);

// Direct additive-noise check: GP-regress y on x and test the residuals
// against x.
DependenceReport fit_direct_anm(std::span<const double> x, std::span<const double> y,
                                std::uint64_t seed = 0);

// Full driver: principal-curve initialization, then up to K rounds of
// dependence-minimizing projection with GP re-regression between rounds.
// Expects normalized data (see normalize()).
IcanResult run_ican(const PairedSample& data, const IcanConfig& config = {});

}  // namespace ican
