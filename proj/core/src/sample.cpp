#include "ican/sample.hpp"

#include "ican/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace ican {

PairedSample normalize(const PairedSample& sample) {
    if (sample.size() < 2 || sample.x.size() != sample.y.size())
        throw std::invalid_argument("normalize: need at least two paired observations");

    auto transform_axis = [](const std::vector<double>& v, AxisTransform prior) {
        const double m = mean(v);
        const double var = sample_variance(v);
        if (var <= 0.0) throw std::invalid_argument("normalize: zero variance axis");
        const double s = std::sqrt(var);
        std::vector<double> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - m) / s;
        // Compose with whatever transform was already applied.
        const AxisTransform total{prior.offset + prior.scale * m, prior.scale * s};
        return std::pair{out, total};
    };

    PairedSample out;
    auto [nx, tx] = transform_axis(sample.x, sample.normalization.x);
    auto [ny, ty] = transform_axis(sample.y, sample.normalization.y);
    out.x = std::move(nx);
    out.y = std::move(ny);
    out.normalization = {tx, ty};
    out.provenance = sample.provenance;
    return out;
}

PairedSample denormalize(const PairedSample& sample) {
    PairedSample out;
    out.x.resize(sample.size());
    out.y.resize(sample.size());
    const auto& nx = sample.normalization.x;
    const auto& ny = sample.normalization.y;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        out.x[i] = nx.offset + nx.scale * sample.x[i];
        out.y[i] = ny.offset + ny.scale * sample.y[i];
    }
    out.normalization = {};
    out.provenance = sample.provenance;
    return out;
}

}  // namespace ican
