#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ican {

// Affine map applied per axis: normalized = (raw - offset) / scale.
struct AxisTransform {
    double offset = 0.0;
    double scale = 1.0;
};

struct Normalization {
    AxisTransform x;
    AxisTransform y;
};

// Paired scalar observations plus the normalization that produced them
// (identity for raw data) and where they came from.
struct PairedSample {
    std::vector<double> x;
    std::vector<double> y;
    Normalization normalization;
    std::string provenance;

    std::size_t size() const { return x.size(); }
};

// Shift/scale each axis to mean 0, sample variance 1 (n-1 denominator).
// The composed transform is recorded so denormalize() recovers raw values.
PairedSample normalize(const PairedSample& sample);

// Invert the recorded normalization; the result carries an identity transform.
PairedSample denormalize(const PairedSample& sample);

}  // namespace ican
