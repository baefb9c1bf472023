#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ican {

struct SimplexResult {
    std::vector<double> point;
    double value = 0.0;
    long evaluations = 0;
    bool budget_exhausted = false;
};

// Nelder-Mead with reflection 1, expansion 2, contraction 0.5, shrink 0.5.
// The initial simplex perturbs coordinate i of the start point by
// max(0.05*|x_i|, 0.00025). Stops when the evaluation budget is exhausted or
// the simplex diameter (max infinity-norm spread) falls below diameter_tol;
// always returns the best vertex seen. Non-finite objective values are
// treated as +infinity. Deterministic given (f, start, budget).
SimplexResult simplex_minimize(const std::function<double(std::span<const double>)>& f,
                               std::span<const double> start, long eval_budget,
                               double diameter_tol = 1e-6);

}  // namespace ican
