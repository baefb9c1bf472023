#include "ican/gp.hpp"

#include "ican/rng.hpp"
#include "ican/stats.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ican {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kLogParamBound = 25.0;

Eigen::MatrixXd squared_distances(const Eigen::VectorXd& t) {
    const auto n = t.size();
    Eigen::MatrixXd d2(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d2(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = t(i) - t(j);
            d2(i, j) = d * d;
            d2(j, i) = d * d;
        }
    }
    return d2;
}

// Cholesky of K + sn^2 I with diagonal jitter escalation 1e-10 .. 1e-4.
Eigen::LLT<Eigen::MatrixXd> factor_with_jitter(const Eigen::MatrixXd& a) {
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) return llt;
    for (double jitter = 1e-10; jitter <= 1e-4 * 1.0001; jitter *= 10.0) {
        Eigen::MatrixXd aj = a;
        aj.diagonal().array() += jitter;
        llt.compute(aj);
        if (llt.info() == Eigen::Success) return llt;
    }
    throw std::runtime_error("gp: kernel matrix not positive definite after jitter escalation");
}

struct LmlWorkspace {
    const Eigen::VectorXd& t;
    const Eigen::VectorXd& y;
    Eigen::MatrixXd d2;

    LmlWorkspace(const Eigen::VectorXd& inputs, const Eigen::VectorXd& targets)
        : t(inputs), y(targets), d2(squared_distances(inputs)) {}

    double value(const std::array<double, 3>& log_theta) const {
        const double l = std::exp(log_theta[0]);
        const double sf = std::exp(log_theta[1]);
        const double sn = std::exp(log_theta[2]);
        const Eigen::MatrixXd kse = (sf * sf) * (-0.5 / (l * l) * d2.array()).exp().matrix();
        Eigen::MatrixXd a = kse;
        a.diagonal().array() += sn * sn;
        const auto llt = factor_with_jitter(a);
        const Eigen::VectorXd alpha = llt.solve(y);
        const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        return -0.5 * y.dot(alpha) - 0.5 * logdet -
               0.5 * static_cast<double>(t.size()) * kLog2Pi;
    }
};

}  // namespace

LogMarginal log_marginal_likelihood(const Eigen::VectorXd& inputs, const Eigen::VectorXd& targets,
                                    double lengthscale, double signal_std, double noise_std) {
    const auto n = inputs.size();
    if (n < 2) throw std::invalid_argument("log_marginal_likelihood: need at least two points");
    if (targets.size() != n) throw std::invalid_argument("log_marginal_likelihood: size mismatch");
    if (!(lengthscale > 0.0) || !(signal_std > 0.0) || !(noise_std > 0.0))
        throw std::invalid_argument("log_marginal_likelihood: hyperparameters must be positive");

    const Eigen::MatrixXd d2 = squared_distances(inputs);
    const Eigen::MatrixXd kse =
        (signal_std * signal_std) * (-0.5 / (lengthscale * lengthscale) * d2.array()).exp().matrix();
    Eigen::MatrixXd a = kse;
    a.diagonal().array() += noise_std * noise_std;

    const auto llt = factor_with_jitter(a);
    const Eigen::VectorXd alpha = llt.solve(targets);
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();

    LogMarginal out;
    out.value = -0.5 * targets.dot(alpha) - 0.5 * logdet - 0.5 * static_cast<double>(n) * kLog2Pi;

    // dL/dtheta = 1/2 tr((aa' - A^-1) dA/dtheta) in log coordinates.
    const Eigen::MatrixXd ainv =
        llt.solve(Eigen::MatrixXd::Identity(n, n));
    const Eigen::MatrixXd w = alpha * alpha.transpose() - ainv;

    const Eigen::MatrixXd dk_dlog_l =
        kse.cwiseProduct(d2) / (lengthscale * lengthscale);
    out.grad[0] = 0.5 * w.cwiseProduct(dk_dlog_l).sum();
    out.grad[1] = w.cwiseProduct(kse).sum();
    out.grad[2] = noise_std * noise_std * w.trace();
    return out;
}

namespace {

struct Ascent {
    std::array<double, 3> log_theta;
    double value = -std::numeric_limits<double>::infinity();
    bool converged = false;
};

// Gradient ascent with backtracking. The lengthscale is floored at twice the
// average input spacing; below that the kernel can track point-to-point
// noise and the marginal likelihood no longer separates signal from noise.
Ascent ascend(const LmlWorkspace& ws, std::array<double, 3> log_theta, double log_lambda_floor) {
    auto clamp_theta = [&](std::array<double, 3>& th) {
        th[0] = std::clamp(th[0], log_lambda_floor, kLogParamBound);
        for (int i = 1; i < 3; ++i) th[i] = std::clamp(th[i], -kLogParamBound, kLogParamBound);
    };
    clamp_theta(log_theta);

    Ascent best;
    double step = 0.05;
    double value;
    std::array<double, 3> grad;
    auto eval_grad = [&](const std::array<double, 3>& th) {
        const LogMarginal lm = log_marginal_likelihood(ws.t, ws.y, std::exp(th[0]),
                                                       std::exp(th[1]), std::exp(th[2]));
        value = lm.value;
        grad = lm.grad;
    };

    eval_grad(log_theta);
    best = {log_theta, value, false};
    for (int iter = 0; iter < 150; ++iter) {
        const double gmax = std::max({std::abs(grad[0]), std::abs(grad[1]), std::abs(grad[2])});
        if (gmax < 1e-5) {
            best.converged = true;
            break;
        }
        bool moved = false;
        while (step >= 1e-14) {
            std::array<double, 3> trial;
            for (int i = 0; i < 3; ++i) trial[i] = log_theta[i] + step * grad[i];
            clamp_theta(trial);
            const double trial_value = ws.value(trial);
            if (std::isfinite(trial_value) && trial_value > value) {
                log_theta = trial;
                eval_grad(log_theta);
                if (value > best.value) best = {log_theta, value, best.converged};
                step = std::min(step * 1.5, 1.0);
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) {
            best.converged = gmax < 1e-2;
            break;
        }
    }
    if (best.value == -std::numeric_limits<double>::infinity()) best = {log_theta, value, false};
    return best;
}

GPModel build_model(const Eigen::VectorXd& t, const Eigen::VectorXd& y_raw, double offset,
                    double lengthscale, double signal_std, double noise_std) {
    GPModel m;
    m.train_inputs = t;
    m.train_targets = y_raw;
    m.lengthscale = lengthscale;
    m.signal_std = signal_std;
    m.noise_std = noise_std;
    m.target_offset = offset;

    const Eigen::MatrixXd d2 = squared_distances(t);
    const Eigen::MatrixXd kse =
        (signal_std * signal_std) * (-0.5 / (lengthscale * lengthscale) * d2.array()).exp().matrix();
    Eigen::MatrixXd a = kse;
    a.diagonal().array() += noise_std * noise_std;
    const auto llt = factor_with_jitter(a);
    const Eigen::VectorXd centered = y_raw.array() - offset;
    m.weights = llt.solve(centered);
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    m.log_marginal = -0.5 * centered.dot(m.weights) - 0.5 * logdet -
                     0.5 * static_cast<double>(t.size()) * kLog2Pi;
    return m;
}

}  // namespace

GPModel fit_gp(std::span<const double> inputs, std::span<const double> targets,
               std::uint64_t seed) {
    const std::size_t n = inputs.size();
    if (n < 4) throw std::invalid_argument("fit_gp: need at least 4 points");
    if (targets.size() != n) throw std::invalid_argument("fit_gp: size mismatch");

    Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(inputs.data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(targets.data(), static_cast<Eigen::Index>(n));
    const double offset = y.mean();
    const Eigen::VectorXd yc = y.array() - offset;
    const double y_std = std::sqrt(yc.squaredNorm() / static_cast<double>(n - 1));

    if (y_std < 1e-12) {
        // Constant targets: the posterior mean is the offset everywhere.
        GPModel m = build_model(t, y, offset, 1.0, 1e-6, 1e-6);
        m.converged = true;
        return m;
    }

    // Data-driven initial guesses.
    std::vector<double> pair_d2;
    pair_d2.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = inputs[i] - inputs[j];
            pair_d2.push_back(d * d);
        }
    double l0 = std::sqrt(median(pair_d2));
    if (!(l0 > 0.0)) l0 = 1.0;
    const double sf0 = y_std;
    const double sn0 = std::max(0.1 * y_std, 1e-6);

    const auto [tmin, tmax] = std::minmax_element(inputs.begin(), inputs.end());
    const double spacing = (*tmax - *tmin) / static_cast<double>(n - 1);
    const double log_lambda_floor =
        spacing > 0.0 ? std::log(2.0 * spacing) : -kLogParamBound;
    l0 = std::max(l0, std::exp(log_lambda_floor));

    const LmlWorkspace ws(t, yc);
    Rng rng(seed);
    Ascent best;
    for (int restart = 0; restart < 5; ++restart) {
        std::array<double, 3> th{std::log(l0), std::log(sf0), std::log(sn0)};
        if (restart > 0)
            for (auto& v : th) v += 0.5 * rng.normal();
        Ascent a;
        try {
            a = ascend(ws, th, log_lambda_floor);
        } catch (const std::runtime_error&) {
            continue;  // factorization failure at a bad restart point
        }
        if (a.value > best.value || (a.converged && !best.converged && a.value >= best.value))
            best = a;
    }
    if (best.value == -std::numeric_limits<double>::infinity())
        throw std::runtime_error("fit_gp: all restarts failed");

    GPModel m = build_model(t, y, offset, std::exp(best.log_theta[0]), std::exp(best.log_theta[1]),
                            std::exp(best.log_theta[2]));
    m.converged = best.converged;
    return m;
}

GPModel fit_gp_fixed(std::span<const double> inputs, std::span<const double> targets,
                     double lengthscale, double signal_std, double noise_std) {
    const std::size_t n = inputs.size();
    if (n < 1 || targets.size() != n) throw std::invalid_argument("fit_gp_fixed: bad sizes");
    if (!(lengthscale > 0.0) || !(signal_std > 0.0) || !(noise_std > 0.0))
        throw std::invalid_argument("fit_gp_fixed: hyperparameters must be positive");
    Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(inputs.data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(targets.data(), static_cast<Eigen::Index>(n));
    return build_model(t, y, y.mean(), lengthscale, signal_std, noise_std);
}

double predict_mean(const GPModel& model, double query) {
    const double inv = -0.5 / (model.lengthscale * model.lengthscale);
    const double sf2 = model.signal_std * model.signal_std;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < model.size(); ++i) {
        const double d = query - model.train_inputs(i);
        acc += sf2 * std::exp(inv * d * d) * model.weights(i);
    }
    return acc + model.target_offset;
}

std::vector<double> predict_mean(const GPModel& model, std::span<const double> query) {
    std::vector<double> out(query.size());
    for (std::size_t i = 0; i < query.size(); ++i) out[i] = predict_mean(model, query[i]);
    return out;
}

}  // namespace ican
