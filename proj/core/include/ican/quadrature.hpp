#pragma once

#include <functional>

namespace ican {

// Adaptive Gauss-Kronrod (G7, K15) integration to an absolute tolerance.
// Throws with the achieved tolerance if the subdivision budget runs out.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double abs_tol = 1e-10);

}  // namespace ican
