#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace ican {

// Scalar-input squared-exponential GP posterior. Immutable once fitted;
// safe to share across threads for prediction.
struct GPModel {
    Eigen::VectorXd train_inputs;
    Eigen::VectorXd train_targets;
    double lengthscale = 1.0;
    double signal_std = 1.0;
    double noise_std = 0.1;
    double target_offset = 0.0;            // restored in predictions
    Eigen::VectorXd weights;               // (K + sn^2 I)^-1 (y - offset)
    double log_marginal = 0.0;
    bool converged = true;

    Eigen::Index size() const { return train_inputs.size(); }
};

struct LogMarginal {
    double value = 0.0;
    std::array<double, 3> grad{};  // d/d log(lengthscale, signal_std, noise_std)
};

// L = -1/2 y' (K + sn^2 I)^-1 y - 1/2 log|K + sn^2 I| - (n/2) log 2pi with
// K_ij = sf^2 exp(-(t_i - t_j)^2 / (2 l^2)), plus its analytic gradient in
// log-hyperparameter coordinates.
LogMarginal log_marginal_likelihood(const Eigen::VectorXd& inputs, const Eigen::VectorXd& targets,
                                    double lengthscale, double signal_std, double noise_std);

// Maximize the log marginal likelihood by gradient ascent from several
// seeded restarts around data-driven initial guesses. Targets are centered
// internally; the offset is restored in predictions. If no restart converges
// the best candidate is returned with converged = false.
GPModel fit_gp(std::span<const double> inputs, std::span<const double> targets,
               std::uint64_t seed = 0);

// Fit the posterior weights with caller-fixed hyperparameters.
GPModel fit_gp_fixed(std::span<const double> inputs, std::span<const double> targets,
                     double lengthscale, double signal_std, double noise_std);

double predict_mean(const GPModel& model, double query);
std::vector<double> predict_mean(const GPModel& model, std::span<const double> query);

}  // namespace ican
