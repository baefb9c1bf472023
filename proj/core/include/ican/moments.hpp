#pragma once

#include "ican/rng.hpp"
#include "ican/sample.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ican {

// One moment-reconstruction instance: the order-n moments of Z + c_j W
// observed at n+1 distinct mixing coefficients c_j.
struct MomentProblem {
    int order = 1;
    std::vector<double> c_values;
    std::vector<double> observed;
};

struct MomentEstimate {
    std::vector<double> z;  // E(Z^m) resp. E(NX^m), index m-1
    std::vector<double> w;  // E(W^m) resp. E(NY^m)
    bool ill_conditioned = false;
};

// Solve M q = b per order with M_jk = c_j^k * binom(n, k); E(Z^n) and
// E(W^n) are the first and last components of q. Problems must be supplied
// for orders 1..n. Duplicate c values raise "singular system"; condition
// numbers above 1e12 only set the warning flag.
MomentEstimate reconstruct_moments(const std::vector<MomentProblem>& problems);

// Nadaraya-Watson estimate of E(X^m | Y = y0) with a Gaussian kernel.
// Requires at least 30 samples with |y - y0| <= bandwidth.
double conditional_moment(std::span<const double> x, std::span<const double> y, double y0,
                          int order, double bandwidth);

// Estimate the noise moments up to max_order from centered conditional
// moments at the given y points, with beta_y = -w'(y) taken from w_hat by
// central finite differences. bandwidth <= 0 selects the rule of thumb
// 1.06 * std(y) * n^(-1/5). Even-order estimates are clamped at zero.
MomentEstimate estimate_noise_moments(const PairedSample& sample,
                                      const std::function<double(double)>& w_hat,
                                      std::span<const double> y_points, int max_order,
                                      double bandwidth = 0.0);

// Density with a pdf for quadrature, its integration window, and a sampler.
struct Density {
    std::function<double(double)> pdf;
    double lo = 0.0;
    double hi = 0.0;
    std::function<double(Rng&)> sampler;
};

Density uniform_density(double lo, double hi);
Density gaussian_density(double mean_value, double stddev);  // window +- 8 sigma
Density raised_cosine_density(double center, double width);

// Scaling-limit study instance: invertible curve v with inverse w, noise
// densities q (NX) and r (NY), latent density s, the scale factors to probe,
// and y points chosen so the beta_y are pairwise distinct.
struct ScalingStudy {
    std::function<double(double)> v;
    std::function<double(double)> w;
    Density noise_x;
    Density noise_y;
    Density latent;
    std::vector<double> ell_values;
    std::vector<double> y_points;
};

// The study with the graph (t, v(t)) blown up to (ell*t, ell*v(t)); the
// noise densities stay fixed and y points scale with ell.
ScalingStudy rescale(const ScalingStudy& study, double ell);

struct ScalingCell {
    double ell = 1.0;
    int order = 1;
    double est_nx = 0.0;
    double est_ny = 0.0;
    double err_nx = 0.0;  // absolute error against quadrature truth
    double err_ny = 0.0;
};

// For each ell draw samples (ell*T + NX, ell*v(T) + NY), estimate the noise
// moments at y = ell*y_j against the exactly scaled inverse, and tabulate
// absolute errors. bandwidth <= 0 selects the rule of thumb per cell; a
// positive value is used unchanged at every ell.
std::vector<ScalingCell> scaling_study(const ScalingStudy& study, long samples_per_ell,
                                       int max_order, std::uint64_t seed = 0,
                                       double bandwidth = 0.0);

// Quadrature probe of the conditional-moment error
// eps_n(y) = E_y((T - w(y))^n) - beta_y^n E(NY^n).
double epsilon_probe(const ScalingStudy& study, int order, double y, double abs_tol = 1e-10);

}  // namespace ican
