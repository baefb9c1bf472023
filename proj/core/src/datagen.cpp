#include "ican/datagen.hpp"

#include "ican/curve.hpp"
#include "ican/rng.hpp"
#include "ican/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ican {

namespace {

struct BumpCombo {
    std::vector<double> centers;
    std::vector<double> widths;
    std::vector<double> weights;
    double shift = 0.0;
    double scale = 1.0;

    double operator()(double t) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < centers.size(); ++i)
            acc += weights[i] * normal_pdf(t, centers[i], widths[i]);
        return (acc - shift) / scale;
    }
};

constexpr int kCurveGrid = 400;

// Standardize to mean 0, variance 1 over T ~ U[0,1]; returns false when the
// raw component is too flat to standardize.
bool standardize(BumpCombo& c) {
    std::vector<double> values(kCurveGrid);
    for (int i = 0; i < kCurveGrid; ++i) values[i] = c(static_cast<double>(i) / (kCurveGrid - 1));
    const double m = mean(values);
    const double s = std::sqrt(sample_variance(values));
    if (s < 0.05) return false;
    c.shift += m * c.scale;
    c.scale *= s;
    return true;
}

BumpCombo draw_wiggly(Rng& rng, int bump_count) {
    while (true) {
        BumpCombo c;
        for (int i = 0; i < bump_count; ++i) {
            c.centers.push_back(rng.uniform(0.0, 1.0));
            c.widths.push_back(rng.uniform(0.12, 0.25));
            c.weights.push_back(rng.uniform(-1.0, 1.0));
        }
        if (standardize(c)) return c;
    }
}

// Increasing on [0, 1]: every bump sits outside the unit interval with its
// weight signed so the restriction is increasing.
BumpCombo draw_monotone(Rng& rng, int bump_count) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        BumpCombo c;
        for (int i = 0; i < bump_count; ++i) {
            const bool right = rng.uniform() < 0.5;
            c.widths.push_back(rng.uniform(0.3, 0.7));
            if (right) {
                c.centers.push_back(rng.uniform(1.05, 1.9));
                c.weights.push_back(rng.uniform(0.3, 1.0));
            } else {
                c.centers.push_back(rng.uniform(-0.9, -0.05));
                c.weights.push_back(-rng.uniform(0.3, 1.0));
            }
        }
        if (!standardize(c)) continue;
        // Verify grid monotonicity with a margin.
        bool monotone = true;
        double prev = c(0.0);
        for (int i = 1; i < kCurveGrid; ++i) {
            const double cur = c(static_cast<double>(i) / (kCurveGrid - 1));
            if (cur - prev < 1e-6) {
                monotone = false;
                break;
            }
            prev = cur;
        }
        if (monotone) return c;
    }
    throw std::runtime_error("gen_dataset2: could not draw a monotone component");
}

// Reject curves that come close to self-intersection; points whose latent
// separation exceeds 0.08 must stay at least `clearance` apart.
bool self_avoiding(const BumpCombo& u, const BumpCombo& v, double clearance) {
    std::vector<double> us(kCurveGrid), vs(kCurveGrid);
    for (int i = 0; i < kCurveGrid; ++i) {
        const double t = static_cast<double>(i) / (kCurveGrid - 1);
        us[i] = u(t);
        vs[i] = v(t);
    }
    const int gap = static_cast<int>(0.08 * kCurveGrid);
    const double c2 = clearance * clearance;
    for (int i = 0; i < kCurveGrid; ++i)
        for (int j = i + gap; j < kCurveGrid; ++j) {
            const double du = us[i] - us[j];
            const double dv = vs[i] - vs[j];
            if (du * du + dv * dv < c2) return false;
        }
    return true;
}

GeneratedSample assemble(int n, Rng& rng, const BumpCombo& u, const BumpCombo& v,
                         const std::function<double(double, Rng&)>& draw_noise,
                         std::string provenance) {
    GeneratedSample out;
    out.sample.x.resize(n);
    out.sample.y.resize(n);
    out.sample.provenance = std::move(provenance);
    out.truth.t.resize(n);
    out.truth.nx.resize(n);
    out.truth.ny.resize(n);
    for (int i = 0; i < n; ++i) {
        const double t = rng.uniform(0.0, 1.0);
        const double nx = draw_noise(t, rng);
        const double ny = draw_noise(t, rng);
        out.truth.t[i] = t;
        out.truth.nx[i] = nx;
        out.truth.ny[i] = ny;
        out.sample.x[i] = u(t) + nx;
        out.sample.y[i] = v(t) + ny;
    }
    out.curve_u = [u](double t) { return u(t); };
    out.curve_v = [v](double t) { return v(t); };
    return out;
}

void check_n(int n) {
    if (n < 1) throw std::invalid_argument("generator: n must be positive");
}

std::string tag(const char* name, int n, std::uint64_t seed) {
    std::ostringstream os;
    os << name << "(n=" << n << ",seed=" << seed << ")";
    return os.str();
}

}  // namespace

GeneratedSample gen_section3(int n, std::uint64_t seed) {
    check_n(n);
    Rng rng(seed);
    BumpCombo u{{kBumpCenters[0], kBumpCenters[1]}, {kBumpSigma, kBumpSigma}, {4.0, 4.0}};
    BumpCombo v{{kBumpCenters[0], kBumpCenters[1]}, {kBumpSigma, kBumpSigma}, {1.0, -1.0}};
    auto noise = [](double, Rng& r) { return r.uniform(-0.1, 0.1); };
    return assemble(n, rng, u, v, noise, tag("section3", n, seed));
}

GeneratedSample gen_dataset1(int n, std::uint64_t seed, int bump_count, double noise_half_width) {
    check_n(n);
    if (bump_count < 2) throw std::invalid_argument("gen_dataset1: need at least two bumps");
    if (noise_half_width < 0.0) throw std::invalid_argument("gen_dataset1: negative noise width");
    Rng rng(seed);
    BumpCombo u, v;
    for (int attempt = 0;; ++attempt) {
        if (attempt >= 200) throw std::runtime_error("gen_dataset1: could not draw a usable curve");
        u = draw_wiggly(rng, bump_count);
        v = draw_wiggly(rng, bump_count);
        if (self_avoiding(u, v, 0.3)) break;
    }
    auto noise = [noise_half_width](double, Rng& r) {
        return r.uniform(-noise_half_width, noise_half_width);
    };
    return assemble(n, rng, u, v, noise, tag("dataset1", n, seed));
}

GeneratedSample gen_dataset2(int n, std::uint64_t seed) {
    check_n(n);
    Rng rng(seed);
    BumpCombo u, v;
    for (int attempt = 0;; ++attempt) {
        if (attempt >= 200) throw std::runtime_error("gen_dataset2: could not draw a usable curve");
        u = draw_wiggly(rng, 5);
        v = draw_monotone(rng, 4);
        if (self_avoiding(u, v, 0.3)) break;
    }

    // NY is drawn on [-0.0015, 0]; its mean is absorbed into v so that the
    // recorded noise is centered.
    constexpr double kNyMean = -0.00075;
    v.shift -= kNyMean * v.scale;  // v_eff(t) = v(t) + kNyMean

    GeneratedSample out;
    out.sample.x.resize(n);
    out.sample.y.resize(n);
    out.sample.provenance = tag("dataset2", n, seed);
    out.truth.t.resize(n);
    out.truth.nx.resize(n);
    out.truth.ny.resize(n);
    for (int i = 0; i < n; ++i) {
        const double t = rng.uniform(0.0, 1.0);
        const double nx = rng.uniform(-0.008, 0.008);
        const double ny_raw = rng.uniform(-0.0015, 0.0);
        out.truth.t[i] = t;
        out.truth.nx[i] = nx;
        out.truth.ny[i] = ny_raw - kNyMean;
        out.sample.x[i] = u(t) + nx;
        out.sample.y[i] = v(t) + out.truth.ny[i];
    }
    out.curve_u = [u](double t) { return u(t); };
    out.curve_v = [v](double t) { return v(t); };
    return out;
}

GeneratedSample gen_dataset3(int n, std::uint64_t seed) {
    check_n(n);
    Rng rng(seed);
    BumpCombo u, v;
    for (int attempt = 0;; ++attempt) {
        if (attempt >= 200) throw std::runtime_error("gen_dataset3: could not draw a usable curve");
        u = draw_wiggly(rng, 5);
        v = draw_wiggly(rng, 5);
        if (self_avoiding(u, v, 0.3)) break;
    }
    auto noise = [](double t, Rng& r) {
        const double amplitude = 0.005 + 0.07 * t;
        return amplitude * r.uniform(-1.0, 1.0);
    };
    return assemble(n, rng, u, v, noise, tag("dataset3", n, seed));
}

}  // namespace ican
