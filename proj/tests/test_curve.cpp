#include "ican/curve.hpp"
#include "ican/datagen.hpp"
#include "ican/rng.hpp"
#include "ican/stats.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

using namespace ican;

namespace {

bool strictly_monotone(const std::vector<double>& v) {
    bool inc = true, dec = true;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] <= v[i - 1]) inc = false;
        if (v[i] >= v[i - 1]) dec = false;
    }
    return inc || dec;
}

// Dense-grid projection oracle: 1e5 nodes over the path's parameter range.
double brute_force_distance(const CurvePath& path, double px, double py) {
    const double lo = path.grid.front();
    const double hi = path.grid.back();
    double best = std::numeric_limits<double>::infinity();
    const int nodes = 100000;
    for (int i = 0; i < nodes; ++i) {
        const double t = lo + (hi - lo) * i / (nodes - 1.0);
        const double du = path.u(t) - px;
        const double dv = path.v(t) - py;
        best = std::min(best, du * du + dv * dv);
    }
    return std::sqrt(best);
}

}  // namespace

TEST_CASE("isomap orders collinear points") {
    std::vector<double> x(20), y(20);
    for (int i = 0; i < 20; ++i) {
        x[i] = 0.5 * i;
        y[i] = 0.25 * i;  // on a line, equally spaced
    }
    const auto t = isomap_embed_1d(x, y, 3).values;
    REQUIRE(t.size() == 20);
    CHECK(strictly_monotone(t));
}

TEST_CASE("isomap recovers arc-length order on a quarter circle") {
    const int n = 100;
    std::vector<double> x(n), y(n), arc(n);
    for (int i = 0; i < n; ++i) {
        const double theta = 0.5 * M_PI * i / (n - 1.0);
        arc[i] = theta;
        x[i] = std::cos(theta);
        y[i] = std::sin(theta);
    }
    const auto t = isomap_embed_1d(x, y, 10).values;
    const double rho = spearman(t, arc);
    CHECK(std::abs(rho) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("isomap escalates k until two clusters connect") {
    std::vector<double> x, y;
    Rng rng(2);
    for (int i = 0; i < 10; ++i) {
        x.push_back(rng.uniform(0.0, 1.0));
        y.push_back(rng.uniform(0.0, 1.0));
    }
    for (int i = 0; i < 10; ++i) {
        x.push_back(100.0 + rng.uniform(0.0, 1.0));
        y.push_back(rng.uniform(0.0, 1.0));
    }
    const auto t = isomap_embed_1d(x, y, 2).values;
    CHECK(t.size() == 20);
    // The clusters separate along the embedded coordinate.
    const double lo_max = *std::max_element(t.begin(), t.begin() + 10);
    const double hi_min = *std::min_element(t.begin() + 10, t.end());
    CHECK((lo_max < hi_min || *std::min_element(t.begin(), t.begin() + 10) >
                                  *std::max_element(t.begin() + 10, t.end())));
}

TEST_CASE("isomap needs more points than neighbors") {
    const std::vector<double> x{0.0, 1.0, 2.0};
    CHECK_THROWS_AS(isomap_embed_1d(x, x, 3), std::invalid_argument);
}

TEST_CASE("property: isomap rank order survives rigid motions") {
    Rng rng(14);
    const int n = 60;
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
        const double t = i / (n - 1.0);
        x[i] = t + 0.01 * rng.normal();
        y[i] = std::sin(2.0 * t) + 0.01 * rng.normal();
    }
    const auto base = isomap_embed_1d(x, y, 8).values;

    const double c = std::cos(0.83), s = std::sin(0.83);
    std::vector<double> xr(n), yr(n);
    for (int i = 0; i < n; ++i) {
        xr[i] = c * x[i] - s * y[i] + 5.0;
        yr[i] = s * x[i] + c * y[i] - 2.0;
    }
    const auto moved = isomap_embed_1d(xr, yr, 8).values;
    CHECK(std::abs(spearman(base, moved)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("projection of an on-curve point returns its parameter") {
    const auto path = make_path([](double t) { return t; },
                                [](double t) { return t * t; }, 0.0, 1.0, 2000);
    const double t0 = path.grid[700];
    const auto p = project_to_curve(path, path.grid_u[700], path.grid_v[700]);
    CHECK(std::abs(p.t - t0) < 1e-6);
    CHECK(p.dist < 1e-9);
}

TEST_CASE("projection onto a straight line is the orthogonal foot") {
    const auto path = make_path([](double t) { return t; },
                                [](double) { return 0.0; }, -0.5, 1.5, 2000);
    const auto p = project_to_curve(path, 0.3, 1.0);
    CHECK(p.t == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(p.dist == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("property: projection matches a 1e5-node brute-force grid") {
    Rng rng(23);
    for (int curve_idx = 0; curve_idx < 4; ++curve_idx) {
        const double a = rng.uniform(0.5, 2.0);
        const double b = rng.uniform(0.5, 2.0);
        const double c = rng.uniform(-1.0, 1.0);
        const auto path = make_path(
            [=](double t) { return std::sin(a * t) + c * t; },
            [=](double t) { return std::cos(b * t) - c * t * t; }, 0.0, 1.0, 2000);
        for (int i = 0; i < 25; ++i) {
            const double px = rng.uniform(-1.5, 1.5);
            const double py = rng.uniform(-1.5, 1.5);
            const auto p = project_to_curve(path, px, py);
            const double oracle = brute_force_distance(path, px, py);
            CHECK(std::abs(p.dist - oracle) < 1e-6);
        }
    }
}

TEST_CASE("principal_curve_fit nails noise-free collinear data") {
    const int n = 40;
    PairedSample data;
    Rng rng(6);
    for (int i = 0; i < n; ++i) {
        const double t = rng.uniform(0.0, 1.0);
        data.x.push_back(2.0 * t - 1.0);
        data.y.push_back(-1.5 * t + 0.75);
    }
    const auto fit = principal_curve_fit(data);
    CHECK(fit.l2 < 1e-3 * n);
    CHECK(fit.latents.values.size() == static_cast<std::size_t>(n));
}

TEST_CASE("principal_curve_fit rejects degenerate data") {
    PairedSample data;
    for (int i = 0; i < 20; ++i) {
        data.x.push_back(i * 0.1);
        data.y.push_back(3.0);
    }
    CHECK_THROWS_AS(principal_curve_fit(data), std::invalid_argument);
}

TEST_CASE("property: the alternation log never increases") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const auto g = gen_dataset1(80, seed);
        const auto data = normalize(g.sample);
        const auto fit = principal_curve_fit(data);
        REQUIRE(!fit.objective_log.empty());
        for (std::size_t i = 1; i < fit.objective_log.size(); ++i)
            CHECK(fit.objective_log[i] <= fit.objective_log[i - 1]);
        CHECK(fit.l2 == fit.objective_log.back());
    }
}

TEST_CASE("fit_parametric_l2 recovers noise-free bump coefficients") {
    // Deterministic noise-free construction on a latent grid covering [0, 1].
    const auto g = gen_section3(10, 8);  // provides the exact curve components
    const int n = 200;
    PairedSample clean;
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        clean.x.push_back(g.curve_u(t));
        clean.y.push_back(g.curve_v(t));
    }
    const auto fit = fit_parametric_l2(clean);
    CHECK(std::abs(fit.coeffs[0] - 4.0) < 0.05);
    CHECK(std::abs(fit.coeffs[1] - 4.0) < 0.05);
    CHECK(std::abs(fit.coeffs[2] - 1.0) < 0.05);
    CHECK(std::abs(fit.coeffs[3] + 1.0) < 0.05);
    CHECK(fit.l2 < 1e-2 * static_cast<double>(clean.size()));
}

TEST_CASE("fit_parametric_l2 lands near the reported optimum on noisy data") {
    const auto g = gen_section3(200, 14);
    const auto fit = fit_parametric_l2(g.sample);
    CHECK(std::abs(fit.coeffs[0] - 3.9216) < 0.5);
    CHECK(std::abs(fit.coeffs[1] - 4.0112) < 0.5);
    CHECK(std::abs(fit.coeffs[2] - 0.9776) < 0.5);
    CHECK(std::abs(fit.coeffs[3] + 0.9911) < 0.5);

    // Projections minimize per-point distances, so the fitted assignment
    // beats the true latents against the same curve.
    double true_t_l2 = 0.0;
    for (std::size_t i = 0; i < g.sample.size(); ++i) {
        const double du = fit.path.u(g.truth.t[i]) - g.sample.x[i];
        const double dv = fit.path.v(g.truth.t[i]) - g.sample.y[i];
        true_t_l2 += std::sqrt(du * du + dv * dv);
    }
    CHECK(fit.l2 < true_t_l2);
}

TEST_CASE("zero y-targets force the second component to zero") {
    const auto g = gen_section3(120, 15);
    PairedSample data = g.sample;
    std::fill(data.y.begin(), data.y.end(), 0.0);
    const auto fit = fit_parametric_l2(data);
    CHECK(fit.coeffs[2] == 0.0);
    CHECK(fit.coeffs[3] == 0.0);
}
