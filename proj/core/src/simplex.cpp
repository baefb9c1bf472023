#include "ican/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ican {

namespace {
constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;
}  // namespace

SimplexResult simplex_minimize(const std::function<double(std::span<const double>)>& f,
                               std::span<const double> start, long eval_budget,
                               double diameter_tol) {
    const std::size_t dim = start.size();
    if (dim == 0) throw std::invalid_argument("simplex_minimize: empty start point");
    if (eval_budget < static_cast<long>(dim) + 1)
        throw std::invalid_argument("simplex_minimize: budget must cover the initial simplex");

    SimplexResult result;
    result.point.assign(start.begin(), start.end());
    result.value = std::numeric_limits<double>::infinity();

    auto evaluate = [&](const std::vector<double>& x) {
        ++result.evaluations;
        double v = f(x);
        if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
        if (v < result.value) {
            result.value = v;
            result.point = x;
        }
        return v;
    };
    auto budget_left = [&] { return result.evaluations < eval_budget; };

    std::vector<std::vector<double>> simplex(dim + 1, std::vector<double>(start.begin(), start.end()));
    for (std::size_t i = 0; i < dim; ++i)
        simplex[i + 1][i] += std::max(0.05 * std::abs(start[i]), 0.00025);

    std::vector<double> fv(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) {
        if (!budget_left()) {
            result.budget_exhausted = true;
            return result;
        }
        fv[i] = evaluate(simplex[i]);
    }

    std::vector<std::size_t> order(dim + 1);
    std::vector<double> centroid(dim), candidate(dim);

    while (true) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[dim - 1];

        double diameter = 0.0;
        for (std::size_t i = 0; i <= dim; ++i)
            for (std::size_t j = 0; j < dim; ++j)
                diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[best][j]));
        if (diameter < diameter_tol) return result;
        if (!budget_left()) {
            result.budget_exhausted = true;
            return result;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        auto along = [&](double coeff) {
            for (std::size_t j = 0; j < dim; ++j)
                candidate[j] = centroid[j] + coeff * (centroid[j] - simplex[worst][j]);
        };

        along(kReflect);
        const double fr = evaluate(candidate);
        if (fr < fv[best]) {
            if (budget_left()) {
                std::vector<double> reflected = candidate;
                along(kExpand);
                const double fe = evaluate(candidate);
                if (fe < fr) {
                    simplex[worst] = candidate;
                    fv[worst] = fe;
                } else {
                    simplex[worst] = std::move(reflected);
                    fv[worst] = fr;
                }
            } else {
                simplex[worst] = candidate;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second_worst]) {
            simplex[worst] = candidate;
            fv[worst] = fr;
            continue;
        }

        if (!budget_left()) {
            result.budget_exhausted = true;
            return result;
        }
        const bool outside = fr < fv[worst];
        if (outside) {
            std::vector<double> reflected = candidate;
            along(kContract);
            const double fc = evaluate(candidate);
            if (fc <= fr) {
                simplex[worst] = candidate;
                fv[worst] = fc;
                continue;
            }
            (void)reflected;
        } else {
            along(-kContract);
            const double fc = evaluate(candidate);
            if (fc < fv[worst]) {
                simplex[worst] = candidate;
                fv[worst] = fc;
                continue;
            }
        }

        // Shrink toward the best vertex.
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < dim; ++j)
                simplex[i][j] = simplex[best][j] + kShrink * (simplex[i][j] - simplex[best][j]);
            if (!budget_left()) {
                result.budget_exhausted = true;
                return result;
            }
            fv[i] = evaluate(simplex[i]);
        }
    }
}

}  // namespace ican
