#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>

namespace ican {

// Gaussian-kernel Gram matrix of one variable's samples.
struct GramMatrix {
    Eigen::MatrixXd entries;
    double bandwidth = 0.0;
};

struct DependenceReport {
    double hsic = 0.0;
    double p_gamma = 0.0;
    std::optional<double> p_perm;
    double sigma_x = 0.0;
    double sigma_y = 0.0;
    int n = 0;
};

enum class PValueMethod { Gamma, Permutation };

// Median-heuristic kernel size: 2*sigma^2 = median of pairwise squared
// distances. Throws "degenerate sample" when the median is zero.
double median_bandwidth(std::span<const double> samples);

GramMatrix gaussian_gram(std::span<const double> samples, double bandwidth);

// Biased V-statistic HSIC = (1/n^2) trace(K H L H) with H = I - (1/n) 11'.
double hsic_from_grams(const GramMatrix& k, const GramMatrix& l);

// HSIC with median-heuristic bandwidths recomputed from the arguments.
double hsic_biased(std::span<const double> x, std::span<const double> y);

// Same statistic with caller-fixed bandwidths.
double hsic_biased(std::span<const double> x, std::span<const double> y,
                   double sigma_x, double sigma_y);

// Upper-tail gamma p-value for n*HSIC given the two Gram matrices.
double gamma_pvalue_from_grams(const GramMatrix& k, const GramMatrix& l);

// Independence test. The gamma method moment-matches the null of n*HSIC
// (needs n >= 6); the permutation method permutes y only and uses
// p = (1 + #{permuted >= observed}) / (1 + permutations).
DependenceReport hsic_pvalue(std::span<const double> x, std::span<const double> y,
                             PValueMethod method = PValueMethod::Gamma,
                             int permutations = 1000, std::uint64_t seed = 0);

}  // namespace ican
