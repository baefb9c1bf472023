#include "ican/moments.hpp"

#include "ican/quadrature.hpp"
#include "ican/stats.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ican {

namespace {

double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

// Vandermonde-with-binomial system for one order; returns q and flags bad
// conditioning.
Eigen::VectorXd solve_moment_system(int order, std::span<const double> nodes,
                                    const Eigen::VectorXd& rhs, bool& ill_conditioned) {
    const int m = order + 1;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (nodes[i] == nodes[j])
                throw std::runtime_error("reconstruct_moments: singular system (duplicate nodes)");

    Eigen::MatrixXd sys(m, m);
    for (int j = 0; j < m; ++j) {
        double power = 1.0;
        for (int k = 0; k < m; ++k) {
            sys(j, k) = power * binomial(order, k);
            power *= nodes[j];
        }
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues()(m - 1);
    if (smin <= 0.0) throw std::runtime_error("reconstruct_moments: singular system");
    if (svd.singularValues()(0) / smin > 1e12) ill_conditioned = true;
    return svd.solve(rhs);
}

}  // namespace

MomentEstimate reconstruct_moments(const std::vector<MomentProblem>& problems) {
    if (problems.empty()) throw std::invalid_argument("reconstruct_moments: no problems");
    int max_order = 0;
    for (const auto& p : problems) max_order = std::max(max_order, p.order);

    MomentEstimate est;
    est.z.assign(max_order, 0.0);
    est.w.assign(max_order, 0.0);
    std::vector<char> seen(max_order, 0);

    for (const auto& p : problems) {
        if (p.order < 1) throw std::invalid_argument("reconstruct_moments: order must be positive");
        const std::size_t m = static_cast<std::size_t>(p.order) + 1;
        if (p.c_values.size() != m || p.observed.size() != m)
            throw std::invalid_argument("reconstruct_moments: need order + 1 nodes and observations");

        const Eigen::VectorXd rhs =
            Eigen::Map<const Eigen::VectorXd>(p.observed.data(), static_cast<Eigen::Index>(m));
        const Eigen::VectorXd q = solve_moment_system(p.order, p.c_values, rhs, est.ill_conditioned);
        est.z[p.order - 1] = q(0);
        est.w[p.order - 1] = q(p.order);
        seen[p.order - 1] = 1;
    }
    for (int m = 0; m < max_order; ++m)
        if (!seen[m]) throw std::invalid_argument("reconstruct_moments: missing order in problem list");
    return est;
}

double conditional_moment(std::span<const double> x, std::span<const double> y, double y0,
                          int order, double bandwidth) {
    if (x.size() != y.size()) throw std::invalid_argument("conditional_moment: length mismatch");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("conditional_moment: bandwidth must be positive");
    if (order < 0) throw std::invalid_argument("conditional_moment: negative order");

    long local = 0;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double z = (y[i] - y0) / bandwidth;
        if (std::abs(z) <= 1.0) ++local;
        const double kappa = std::exp(-0.5 * z * z);
        num += std::pow(x[i], order) * kappa;
        den += kappa;
    }
    if (local < 30) throw std::runtime_error("conditional_moment: insufficient local data");
    return num / den;
}

namespace {

// Kernel-weighted conditional moment centered at the local conditional mean.
double centered_conditional_moment(std::span<const double> x, std::span<const double> y,
                                   double y0, int order, double bandwidth) {
    const double m1 = conditional_moment(x, y, y0, 1, bandwidth);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double z = (y[i] - y0) / bandwidth;
        const double kappa = std::exp(-0.5 * z * z);
        num += std::pow(x[i] - m1, order) * kappa;
        den += kappa;
    }
    return num / den;
}

double rule_of_thumb_bandwidth(std::span<const double> y) {
    return 1.06 * sample_stddev(y) * std::pow(static_cast<double>(y.size()), -0.2);
}

}  // namespace

MomentEstimate estimate_noise_moments(const PairedSample& sample,
                                      const std::function<double(double)>& w_hat,
                                      std::span<const double> y_points, int max_order,
                                      double bandwidth) {
    if (max_order < 1) throw std::invalid_argument("estimate_noise_moments: order must be positive");
    if (y_points.size() < static_cast<std::size_t>(max_order) + 1)
        throw std::invalid_argument("estimate_noise_moments: need order + 1 y points");

    const double h = bandwidth > 0.0 ? bandwidth : rule_of_thumb_bandwidth(sample.y);

    const auto [ymin, ymax] = std::minmax_element(sample.y.begin(), sample.y.end());
    const double fd_step = 1e-3 * std::max(*ymax - *ymin, 1e-12);
    std::vector<double> beta(y_points.size());
    for (std::size_t j = 0; j < y_points.size(); ++j)
        beta[j] = -(w_hat(y_points[j] + fd_step) - w_hat(y_points[j] - fd_step)) / (2.0 * fd_step);

    const auto [bmin, bmax] = std::minmax_element(beta.begin(), beta.end());
    if (*bmax - *bmin < 1e-3)
        throw std::runtime_error("estimate_noise_moments: moment system ill-posed (beta spread too small)");

    MomentEstimate est;
    est.z.assign(max_order, 0.0);
    est.w.assign(max_order, 0.0);

    for (int order = 1; order <= max_order; ++order) {
        const int m = order + 1;
        Eigen::VectorXd rhs(m);
        for (int j = 0; j < m; ++j)
            rhs(j) = centered_conditional_moment(sample.x, sample.y, y_points[j], order, h);
        const Eigen::VectorXd q = solve_moment_system(
            order, std::span<const double>(beta.data(), static_cast<std::size_t>(m)), rhs,
            est.ill_conditioned);
        double ez = q(0);
        double ew = q(order);
        if (order % 2 == 0) {
            ez = std::max(ez, 0.0);
            ew = std::max(ew, 0.0);
        }
        est.z[order - 1] = ez;
        est.w[order - 1] = ew;
    }
    return est;
}

Density uniform_density(double lo, double hi) {
    if (!(hi > lo)) throw std::invalid_argument("uniform_density: empty support");
    const double height = 1.0 / (hi - lo);
    Density d;
    d.lo = lo;
    d.hi = hi;
    d.pdf = [lo, hi, height](double t) { return (t >= lo && t <= hi) ? height : 0.0; };
    d.sampler = [lo, hi](Rng& rng) { return rng.uniform(lo, hi); };
    return d;
}

Density gaussian_density(double mean_value, double stddev) {
    if (!(stddev > 0.0)) throw std::invalid_argument("gaussian_density: stddev must be positive");
    Density d;
    d.lo = mean_value - 8.0 * stddev;
    d.hi = mean_value + 8.0 * stddev;
    d.pdf = [mean_value, stddev](double t) { return normal_pdf(t, mean_value, stddev); };
    d.sampler = [mean_value, stddev](Rng& rng) { return mean_value + stddev * rng.normal(); };
    return d;
}

Density raised_cosine_density(double center, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("raised_cosine_density: width must be positive");
    const double lo = center - 0.5 * width;
    const double hi = center + 0.5 * width;
    const double two_pi = 6.283185307179586476925286766559;
    auto pdf = [lo, hi, center, width, two_pi](double t) {
        if (t < lo || t > hi) return 0.0;
        return (1.0 + std::cos(two_pi * (t - center) / width)) / width;
    };
    Density d;
    d.lo = lo;
    d.hi = hi;
    d.pdf = pdf;
    d.sampler = [lo, hi, pdf, width](Rng& rng) {
        // Rejection from the uniform envelope, peak height 2/width.
        while (true) {
            const double t = rng.uniform(lo, hi);
            if (rng.uniform() * 2.0 / width <= pdf(t)) return t;
        }
    };
    return d;
}

ScalingStudy rescale(const ScalingStudy& study, double ell) {
    if (!(ell > 0.0)) throw std::invalid_argument("rescale: ell must be positive");
    ScalingStudy out = study;
    const auto v = study.v;
    const auto w = study.w;
    out.v = [v, ell](double t) { return ell * v(t / ell); };
    out.w = [w, ell](double y) { return ell * w(y / ell); };
    const Density& s = study.latent;
    const auto s_pdf = s.pdf;
    const auto s_sample = s.sampler;
    out.latent.lo = ell * s.lo;
    out.latent.hi = ell * s.hi;
    out.latent.pdf = [s_pdf, ell](double t) { return s_pdf(t / ell) / ell; };
    out.latent.sampler = [s_sample, ell](Rng& rng) { return ell * s_sample(rng); };
    for (double& y : out.y_points) y *= ell;
    out.ell_values = {1.0};
    return out;
}

namespace {

double density_moment(const Density& d, int order, double abs_tol = 1e-10) {
    return integrate([&](double t) { return std::pow(t, order) * d.pdf(t); }, d.lo, d.hi, abs_tol);
}

}  // namespace

std::vector<ScalingCell> scaling_study(const ScalingStudy& study, long samples_per_ell,
                                       int max_order, std::uint64_t seed, double bandwidth) {
    if (study.ell_values.empty()) throw std::invalid_argument("scaling_study: no ell values");
    if (samples_per_ell < 100) throw std::invalid_argument("scaling_study: too few samples per cell");

    std::vector<double> true_nx(max_order), true_ny(max_order);
    for (int m = 1; m <= max_order; ++m) {
        true_nx[m - 1] = density_moment(study.noise_x, m);
        true_ny[m - 1] = density_moment(study.noise_y, m);
    }

    Rng master(seed);
    std::vector<ScalingCell> cells;
    for (std::size_t cell_idx = 0; cell_idx < study.ell_values.size(); ++cell_idx) {
        const double ell = study.ell_values[cell_idx];
        Rng rng = master.fork(cell_idx);

        PairedSample sample;
        sample.x.resize(samples_per_ell);
        sample.y.resize(samples_per_ell);
        for (long i = 0; i < samples_per_ell; ++i) {
            const double t = study.latent.sampler(rng);
            sample.x[i] = ell * t + study.noise_x.sampler(rng);
            sample.y[i] = ell * study.v(t) + study.noise_y.sampler(rng);
        }

        const auto w = study.w;
        const auto w_scaled = [w, ell](double y) { return ell * w(y / ell); };
        std::vector<double> y_scaled(study.y_points);
        for (double& y : y_scaled) y *= ell;

        const MomentEstimate est =
            estimate_noise_moments(sample, w_scaled, y_scaled, max_order, bandwidth);
        for (int m = 1; m <= max_order; ++m) {
            ScalingCell c;
            c.ell = ell;
            c.order = m;
            c.est_nx = est.z[m - 1];
            c.est_ny = est.w[m - 1];
            c.err_nx = std::abs(est.z[m - 1] - true_nx[m - 1]);
            c.err_ny = std::abs(est.w[m - 1] - true_ny[m - 1]);
            cells.push_back(c);
        }
    }
    return cells;
}

double epsilon_probe(const ScalingStudy& study, int order, double y, double abs_tol) {
    if (order < 1) throw std::invalid_argument("epsilon_probe: order must be positive");

    const double w_y = study.w(y);
    const double fd_step = 1e-6 * (1.0 + std::abs(y));
    const double beta = -(study.w(y + fd_step) - study.w(y - fd_step)) / (2.0 * fd_step);

    // Integrate in the noise coordinate yt = y - v(t); the conditional
    // density concentrates on the (possibly narrow) band where r lives, so
    // this parameterization keeps the integrand resolved.
    const auto& s = study.latent;
    const auto& r = study.noise_y;
    auto w_prime = [&](double yy) {
        return (study.w(yy + fd_step) - study.w(yy - fd_step)) / (2.0 * fd_step);
    };
    auto weight = [&](double yt) {
        const double t = study.w(y - yt);
        if (!std::isfinite(t)) return 0.0;
        return r.pdf(yt) * s.pdf(t) * std::abs(w_prime(y - yt));
    };

    const double p_y = integrate(weight, r.lo, r.hi, abs_tol);
    if (p_y < 1e-300) throw std::runtime_error("epsilon_probe: probe point outside the support");
    const double num = integrate(
        [&](double yt) {
            const double t = study.w(y - yt);
            if (!std::isfinite(t)) return 0.0;
            return std::pow(t - w_y, order) * weight(yt);
        },
        r.lo, r.hi, abs_tol);
    const double noise_moment = density_moment(r, order, abs_tol);
    return num / p_y - std::pow(beta, order) * noise_moment;
}

}  // namespace ican
