#include "ican/projection.hpp"

#include "ican/simplex.hpp"
#include "ican/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ican {

namespace {

struct Residuals {
    std::vector<double> t;  // clamped
    std::vector<double> nx;
    std::vector<double> ny;
};

Residuals compute_residuals(std::span<const double> latents, const CurvePath& curve,
                            const PairedSample& data) {
    const std::size_t n = data.size();
    if (latents.size() != n) throw std::invalid_argument("dependence_objective: length mismatch");
    Residuals r;
    r.t.resize(n);
    r.nx.resize(n);
    r.ny.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = std::clamp(latents[i], kLatentClampLo, kLatentClampHi);
        r.t[i] = t;
        r.nx[i] = data.x[i] - curve.u(t);
        r.ny[i] = data.y[i] - curve.v(t);
    }
    return r;
}

}  // namespace

namespace {

double hsic_sum(const Residuals& r, double sigma_x, double sigma_y, double sigma_t) {
    const GramMatrix gx = gaussian_gram(r.nx, sigma_x);
    const GramMatrix gy = gaussian_gram(r.ny, sigma_y);
    const GramMatrix gt = gaussian_gram(r.t, sigma_t);
    // Grouping the two latent terms keeps the sum symmetric under x/y swap.
    return hsic_from_grams(gx, gy) + (hsic_from_grams(gx, gt) + hsic_from_grams(gy, gt));
}

}  // namespace

double dependence_objective(std::span<const double> latents, const CurvePath& curve,
                            const PairedSample& data) {
    const Residuals r = compute_residuals(latents, curve, data);
    return hsic_sum(r, median_bandwidth(r.nx), median_bandwidth(r.ny), median_bandwidth(r.t));
}

ProjectionResult optimize_projection(const CurvePath& curve, const PairedSample& data,
                                     const LatentAssignment& start, long eval_budget) {
    const std::size_t n = data.size();
    if (eval_budget < static_cast<long>(n) + 1)
        throw std::invalid_argument("optimize_projection: budget too small");

    // Latents stay inside the curve's own grid span (and the global clamp
    // window); outside it a bump-basis curve rises off the data scale.
    const double t_lo =
        curve.grid.empty() ? kLatentClampLo : std::max(kLatentClampLo, curve.grid.front());
    const double t_hi =
        curve.grid.empty() ? kLatentClampHi : std::min(kLatentClampHi, curve.grid.back());
    std::vector<double> t(start.values.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::clamp(start.values[i], t_lo, t_hi);

    // Bandwidths are frozen at the start point for the whole minimization.
    // Re-estimating them per evaluation lets the search shrink the raw
    // statistic by saturating the kernels (huge residual spread) while the
    // actual dependence grows; with frozen kernels that direction is
    // objective-neutral and the search has to decorrelate instead.
    // Throws here if the start point itself is degenerate.
    const Residuals start_res = compute_residuals(t, curve, data);
    const double sigma_x = median_bandwidth(start_res.nx);
    const double sigma_y = median_bandwidth(start_res.ny);
    const double sigma_t = median_bandwidth(start_res.t);

    // Extreme latents produce huge residuals that frozen-kernel HSIC treats
    // like deleted points, so the search would happily sacrifice points to
    // shrink the statistic. Regularize by rejecting candidates whose
    // residuals blow up relative to the start.
    auto robust_scale = [](const std::vector<double>& v) {
        std::vector<double> a(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) a[i] = std::abs(v[i]);
        const double med = median(a);
        return std::max(med, 1e-12);
    };
    auto max_abs = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    };
    const double cap_x = std::max(8.0 * robust_scale(start_res.nx), 1.5 * max_abs(start_res.nx));
    const double cap_y = std::max(8.0 * robust_scale(start_res.ny), 1.5 * max_abs(start_res.ny));

    long evals = 0;
    const auto guarded = [&](std::span<const double> t) {
        ++evals;
        try {
            const Residuals r = compute_residuals(t, curve, data);
            for (std::size_t i = 0; i < r.nx.size(); ++i)
                if (std::abs(r.nx[i]) > cap_x || std::abs(r.ny[i]) > cap_y)
                    return std::numeric_limits<double>::infinity();
            return hsic_sum(r, sigma_x, sigma_y, sigma_t);
        } catch (const std::invalid_argument&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    // The latent coordinates enter the objective through their own residual
    // pair only, so cyclic coordinate descent with a golden-section line
    // search reaches the per-point corrections directly; a joint simplex
    // over hundreds of coordinates stalls far from them.
    double best = guarded(t);
    constexpr double kGolden = 0.6180339887498948482;
    constexpr int kLineEvals = 6;
    // Sweep the coordinates at geometrically shrinking bracket scales so
    // both coarse reassignments and noise-scale corrections are reachable,
    // cycling through the schedule while the budget lasts.
    const double bracket_hi = 0.08 * (t_hi - t_lo);
    const double bracket_lo = 1e-4 * (t_hi - t_lo);
    double bracket = bracket_hi;
    bool out_of_budget = false;
    bool improved_this_cycle = false;

    while (!out_of_budget) {
        bool improved = false;
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (evals + kLineEvals + 1 > eval_budget) {
                out_of_budget = true;
                break;
            }
            const double saved = t[k];
            double a = std::max(saved - bracket, t_lo);
            double b = std::min(saved + bracket, t_hi);
            double c = b - kGolden * (b - a);
            double d = a + kGolden * (b - a);
            t[k] = c;
            double fc = guarded(t);
            t[k] = d;
            double fd = guarded(t);
            double line_best = std::min(fc, fd);
            double line_arg = fc < fd ? c : d;
            for (int it = 0; it < kLineEvals - 2; ++it) {
                if (fc < fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - kGolden * (b - a);
                    t[k] = c;
                    fc = guarded(t);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + kGolden * (b - a);
                    t[k] = d;
                    fd = guarded(t);
                }
                if (std::min(fc, fd) < line_best) {
                    line_best = std::min(fc, fd);
                    line_arg = fc < fd ? c : d;
                }
            }
            if (line_best < best) {
                best = line_best;
                t[k] = line_arg;
                improved = true;
            } else {
                t[k] = saved;
            }
        }
        improved_this_cycle = improved_this_cycle || improved;
        bracket *= 0.5;
        if (bracket < bracket_lo) {
            if (!improved_this_cycle) break;
            bracket = bracket_hi;
            improved_this_cycle = false;
        }
    }

    ProjectionResult out;
    out.objective = best;
    out.budget_exhausted = out_of_budget;
    out.latents.values = std::move(t);

    const Residuals r = compute_residuals(out.latents.values, curve, data);
    out.nx_ny = hsic_pvalue(r.nx, r.ny);
    out.nx_t = hsic_pvalue(r.nx, r.t);
    out.ny_t = hsic_pvalue(r.ny, r.t);
    return out;
}

}  // namespace ican
