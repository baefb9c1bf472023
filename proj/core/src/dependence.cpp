#include "ican/dependence.hpp"

#include "ican/rng.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ican {

namespace {

// Double-center a symmetric Gram matrix: HKH with H = I - (1/n) 11'.
Eigen::MatrixXd center(const Eigen::MatrixXd& k) {
    const auto n = k.rows();
    const Eigen::VectorXd row_means = k.rowwise().mean();
    const double grand = row_means.mean();
    Eigen::MatrixXd c = k;
    c.colwise() -= row_means;
    c.rowwise() -= row_means.transpose();
    c.array() += grand;
    return c;
}

// H is idempotent, so tr(KHLH) = tr((HKH)(HLH)); centering both factors
// makes the product-sum exactly symmetric in K and L.
double hsic_from_centered(const Eigen::MatrixXd& kc, const Eigen::MatrixXd& lc) {
    const double n = static_cast<double>(kc.rows());
    return kc.cwiseProduct(lc).sum() / (n * n);
}

void check_pair(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("hsic: length mismatch");
    if (x.size() < 4) throw std::invalid_argument("hsic: need at least 4 samples");
}

}  // namespace

double median_bandwidth(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("median_bandwidth: need at least two samples");
    std::vector<double> sq;
    sq.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = samples[i] - samples[j];
            sq.push_back(d * d);
        }
    // Median of an even-length list averages the two central values.
    const std::size_t mid = sq.size() / 2;
    std::nth_element(sq.begin(), sq.begin() + mid, sq.end());
    double med = sq[mid];
    if (sq.size() % 2 == 0) {
        const double lower = *std::max_element(sq.begin(), sq.begin() + mid);
        med = 0.5 * (lower + med);
    }
    if (med <= 0.0) throw std::invalid_argument("median_bandwidth: degenerate sample");
    return std::sqrt(0.5 * med);
}

GramMatrix gaussian_gram(std::span<const double> samples, double bandwidth) {
    if (bandwidth <= 0.0) throw std::invalid_argument("gaussian_gram: bandwidth must be positive");
    const auto n = static_cast<Eigen::Index>(samples.size());
    const double inv = -0.5 / (bandwidth * bandwidth);
    GramMatrix g;
    g.bandwidth = bandwidth;
    g.entries.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        g.entries(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = samples[i] - samples[j];
            const double v = std::exp(inv * d * d);
            g.entries(i, j) = v;
            g.entries(j, i) = v;
        }
    }
    return g;
}

double hsic_from_grams(const GramMatrix& k, const GramMatrix& l) {
    if (k.entries.rows() != l.entries.rows())
        throw std::invalid_argument("hsic_from_grams: size mismatch");
    return hsic_from_centered(center(k.entries), center(l.entries));
}

double hsic_biased(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y);
    return hsic_biased(x, y, median_bandwidth(x), median_bandwidth(y));
}

double hsic_biased(std::span<const double> x, std::span<const double> y,
                   double sigma_x, double sigma_y) {
    check_pair(x, y);
    const GramMatrix k = gaussian_gram(x, sigma_x);
    const GramMatrix l = gaussian_gram(y, sigma_y);
    return hsic_from_grams(k, l);
}

double gamma_pvalue_from_grams(const GramMatrix& k, const GramMatrix& l) {
    const auto ni = k.entries.rows();
    if (ni < 6) throw std::invalid_argument(
        "gamma_pvalue: needs n >= 6; use the permutation method");
    const double n = static_cast<double>(ni);

    const Eigen::MatrixXd kc = center(k.entries);
    const Eigen::MatrixXd lc = center(l.entries);
    const double stat = kc.cwiseProduct(lc).sum() / n;  // n * HSIC

    // Null mean from the off-diagonal kernel means.
    const double mu_x = (k.entries.sum() - n) / (n * (n - 1.0));
    const double mu_y = (l.entries.sum() - n) / (n * (n - 1.0));
    const double m_hat = (1.0 + mu_x * mu_y - mu_x - mu_y) / n;

    // Null variance from the off-diagonal sum of ((HKH).(HLH)/6)^2.
    const Eigen::MatrixXd b = (kc.cwiseProduct(lc) / 6.0).array().square();
    const double off_sum = b.sum() - b.trace();
    const double v_hat = 72.0 * (n - 4.0) * (n - 5.0) /
                         (n * (n - 1.0) * (n - 2.0) * (n - 3.0)) *
                         (off_sum / (n * (n - 1.0)));
    if (!(m_hat > 0.0) || !(v_hat > 0.0))
        throw std::runtime_error("gamma_pvalue: moment matching failed (degenerate kernels)");

    const double shape = m_hat * m_hat / v_hat;
    const double scale = n * v_hat / m_hat;
    if (stat <= 0.0) return 1.0;
    return boost::math::gamma_q(shape, stat / scale);
}

DependenceReport hsic_pvalue(std::span<const double> x, std::span<const double> y,
                             PValueMethod method, int permutations, std::uint64_t seed) {
    check_pair(x, y);
    const std::size_t n = x.size();
    if (method == PValueMethod::Gamma && n < 6)
        throw std::invalid_argument("hsic_pvalue: gamma method needs n >= 6; use the permutation method");

    DependenceReport rep;
    rep.n = static_cast<int>(n);
    rep.sigma_x = median_bandwidth(x);
    rep.sigma_y = median_bandwidth(y);
    const GramMatrix k = gaussian_gram(x, rep.sigma_x);
    const GramMatrix l = gaussian_gram(y, rep.sigma_y);
    rep.hsic = hsic_from_grams(k, l);

    if (method == PValueMethod::Permutation) {
        if (permutations < 1) throw std::invalid_argument("hsic_pvalue: need at least one permutation");
        // Permuting y leaves its pairwise-distance set (hence the bandwidth)
        // unchanged, so the permuted Gram is an index permutation of l.
        Rng rng(seed);
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        const Eigen::MatrixXd kc = center(k.entries);
        int at_least = 0;
        Eigen::MatrixXd lp(l.entries.rows(), l.entries.cols());
        for (int p = 0; p < permutations; ++p) {
            rng.shuffle(perm);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    lp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                        l.entries(static_cast<Eigen::Index>(perm[i]),
                                  static_cast<Eigen::Index>(perm[j]));
            if (hsic_from_centered(kc, center(lp)) >= rep.hsic) ++at_least;
        }
        rep.p_perm = (1.0 + at_least) / (1.0 + permutations);
    }

    if (n >= 6) {
        rep.p_gamma = gamma_pvalue_from_grams(k, l);
    } else {
        rep.p_gamma = *rep.p_perm;  // gamma approximation undefined this small
    }
    return rep;
}

}  // namespace ican
