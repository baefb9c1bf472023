#pragma once

#include "ican/sample.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace ican {

struct GroundTruth {
    std::vector<double> t;
    std::vector<double> nx;
    std::vector<double> ny;
};

// Generator output: the raw (unnormalized) sample, the latent/noise draws,
// and the curve components on [0, 1] for oracle checks.
struct GeneratedSample {
    PairedSample sample;
    GroundTruth truth;
    std::function<double(double)> curve_u;
    std::function<double(double)> curve_v;
};

// Section-3 demo model: two Gaussian bumps per component with coefficients
// (4, 4) and (1, -1), T ~ U[0,1], noise U([-0.1, 0.1]) per axis.
GeneratedSample gen_section3(int n, std::uint64_t seed);

// Random linear combinations of Gaussian bumps per component (standardized
// to unit variance over T ~ U[0,1] and rejection-sampled to be
// self-avoiding), noise U([-noise_half_width, noise_half_width]).
GeneratedSample gen_dataset1(int n = 200, std::uint64_t seed = 0, int bump_count = 5,
                             double noise_half_width = 0.035);

// Same family with v constrained grid-monotone and unequal noise scales:
// NX ~ U([-0.008, 0.008]), NY ~ U([-0.0015, 0]) with the NY mean absorbed
// into v so that E(NY) = 0.
GeneratedSample gen_dataset2(int n, std::uint64_t seed);

// Noise amplitude grows with the latent, a(T) = 0.005 + 0.07 T, violating
// the joint-independence assumption.
GeneratedSample gen_dataset3(int n, std::uint64_t seed);

}  // namespace ican
