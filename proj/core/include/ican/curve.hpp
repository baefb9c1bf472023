#pragma once

#include "ican/gp.hpp"
#include "ican/sample.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ican {

// Latent parameter values, one per data point, defined up to an arbitrary
// reparameterization of the confounder.
struct LatentAssignment {
    std::vector<double> values;
};

// A curve t -> (u(t), v(t)) with continuous component evaluators plus a
// dense grid of cached coordinates used for nearest-point projection.
struct CurvePath {
    std::function<double(double)> u;
    std::function<double(double)> v;
    std::vector<double> grid;
    std::vector<double> grid_u;
    std::vector<double> grid_v;
};

CurvePath make_path(std::function<double(double)> u, std::function<double(double)> v,
                    double t_lo, double t_hi, int nodes = 2000);

// Fitted curve: one GP posterior per component over the latent parameter.
struct CurveModel {
    GPModel u_model;
    GPModel v_model;
    double t_lo = 0.0;      // closed interval covering the fitted latents
    double t_hi = 1.0;
    CurvePath path;         // grid padded 5% beyond [t_lo, t_hi]
};

CurveModel make_curve_model(GPModel u_model, GPModel v_model, double t_lo, double t_hi,
                            int grid_nodes = 2000);

struct Projection {
    double t = 0.0;
    double dist = 0.0;
};

// Nearest point on the curve: grid argmin refined by golden-section search
// in the two adjacent grid cells.
Projection project_to_curve(const CurvePath& path, double px, double py);
Projection project_to_curve(const CurveModel& curve, double px, double py);

// Isomap-style 1D embedding: symmetric k-nearest-neighbor graph, geodesic
// distances by all-pairs shortest paths, classical MDS first coordinate.
// A disconnected graph escalates k by 2 until connected.
LatentAssignment isomap_embed_1d(std::span<const double> x, std::span<const double> y,
                                 int k_neighbors);

struct PrincipalCurveFit {
    CurveModel curve;
    LatentAssignment latents;
    double l2 = 0.0;                    // sum of Euclidean distances to the curve
    std::vector<double> objective_log;  // one entry per accepted alternation
};

// Alternate GP regression of each coordinate on the latents with
// nearest-point re-projection, starting from the Isomap embedding rescaled
// to [0, 1]. Alternations that would increase the objective are discarded,
// so the logged objective is non-increasing.
PrincipalCurveFit principal_curve_fit(const PairedSample& data, int max_alternations = 10,
                                      int isomap_k = 10, std::uint64_t seed = 0);

// Fixed two-bump basis of the section-3 demo model.
inline constexpr double kBumpSigma = 0.1;
inline constexpr std::array<double, 2> kBumpCenters{-0.1, 1.1};

double bump_basis_u(std::span<const double, 2> coeffs, double t);

struct BumpCurveFit {
    std::array<double, 4> coeffs{};  // alpha1, beta1, alpha2, beta2
    LatentAssignment latents;
    double l2 = 0.0;
    CurvePath path;
    std::vector<double> objective_log;  // one entry per accepted round
};

// Fit the four bump coefficients by alternating linear least squares (given
// projections) with nearest-point re-projection. The orientation ambiguity
// t -> 1-t is resolved by the convention alpha2 >= beta2.
BumpCurveFit fit_parametric_l2(const PairedSample& data, int max_rounds = 50);

}  // namespace ican
