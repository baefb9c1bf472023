#include "ican/ican.hpp"

#include "ican/datagen.hpp"
#include "ican/rng.hpp"
#include "ican/stats.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

using namespace ican;

namespace {

PairedSample swapped(const PairedSample& s) {
    PairedSample out = s;
    std::swap(out.x, out.y);
    return out;
}

GPModel monotone_component(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> t(40), y(40);
    for (int i = 0; i < 40; ++i) {
        t[i] = i / 39.0;
        y[i] = 2.0 * t[i] + 0.01 * rng.normal();
    }
    return fit_gp(t, y, seed);
}

GPModel bump_component(std::uint64_t seed) {
    std::vector<double> t(60), y(60);
    for (int i = 0; i < 60; ++i) {
        t[i] = i / 59.0;
        y[i] = normal_pdf(t[i], 0.5, 0.15);  // one interior bump, clearly non-monotone
    }
    return fit_gp(t, y, seed);
}

}  // namespace

TEST_CASE("check_invertible accepts monotone fits and rejects bumps") {
    CHECK(check_invertible(monotone_component(1), 0.0, 1.0));
    CHECK_FALSE(check_invertible(bump_component(2), 0.0, 1.0));

    std::vector<double> t(20), y(20, 1.5);
    for (int i = 0; i < 20; ++i) t[i] = i / 19.0;
    CHECK_FALSE(check_invertible(fit_gp(t, y, 3), 0.0, 1.0));
}

TEST_CASE("decide applies the variance-ratio thresholds with invertibility") {
    const CurveModel both_monotone =
        make_curve_model(monotone_component(4), monotone_component(5), 0.0, 1.0);
    const CurveModel bump_u =
        make_curve_model(bump_component(6), monotone_component(7), 0.0, 1.0);

    IcanConfig cfg;
    CHECK(decide(0.05, both_monotone, cfg) == Decision::XtoY);
    CHECK(decide(20.0, both_monotone, cfg) == Decision::YtoX);
    CHECK(decide(1.0, both_monotone, cfg) == Decision::Confounder);
    CHECK(decide(0.05, bump_u, cfg) == Decision::Confounder);  // u not invertible
    CHECK(decide(20.0, bump_u, cfg) == Decision::YtoX);
}

TEST_CASE("direct additive-noise check accepts the causal direction") {
    int accepts = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(400 + seed);
        const int n = 200;
        std::vector<double> x(n), y(n);
        for (int i = 0; i < n; ++i) {
            x[i] = rng.uniform(-1.0, 1.0);
            y[i] = std::sin(2.5 * x[i]) + 0.8 * x[i] + 0.1 * rng.uniform(-1.0, 1.0);
        }
        if (fit_direct_anm(x, y, seed).p_gamma >= 0.05) ++accepts;
    }
    CHECK(accepts >= 18);
}

TEST_CASE("direct additive-noise check rejects confounded data") {
    const auto g = gen_dataset1(200, 31);
    const auto rep = fit_direct_anm(g.sample.x, g.sample.y, 5);
    CHECK(rep.p_gamma < 0.05);
}

TEST_CASE("fit_direct_anm validates input") {
    std::vector<double> small(10, 0.5);
    CHECK_THROWS_AS(fit_direct_anm(small, small), std::invalid_argument);
}

TEST_CASE("run_ican requires normalized data") {
    const auto g = gen_dataset1(60, 2);
    CHECK_THROWS_WITH_AS(run_ican(g.sample, {}), doctest::Contains("normalized"),
                         std::invalid_argument);
}

TEST_CASE("run_ican rejects deterministic relations") {
    PairedSample data;
    Rng rng(3);
    for (int i = 0; i < 60; ++i) {
        const double t = rng.uniform(0.0, 1.0);
        data.x.push_back(2.0 * t - 1.0);
        data.y.push_back(0.5 - 1.2 * t);
    }
    const auto norm = normalize(data);
    CHECK_THROWS_WITH_AS(run_ican(norm, {}), doctest::Contains("deterministic"),
                         std::runtime_error);
}

TEST_CASE("run_ican finds the confounder on a dataset-1 draw") {
    const auto g = gen_dataset1(160, 12);
    const auto data = normalize(g.sample);
    IcanConfig cfg;
    cfg.seed = 12;
    const auto result = run_ican(data, cfg);

    REQUIRE(result.decision != Decision::NoCanFit);
    CHECK(result.nx_ny.p_gamma >= cfg.alpha);
    CHECK(result.nx_t.p_gamma >= cfg.alpha);
    CHECK(result.ny_t.p_gamma >= cfg.alpha);
    CHECK(result.var_ratio > 0.0);
    CHECK(result.iterations_used >= 1);
    CHECK(result.log.size() == static_cast<std::size_t>(result.iterations_used));

    // Latents are meaningful only up to reparameterization.
    const double rho = spearman(result.t_hat.values, g.truth.t);
    CHECK(std::abs(rho) > 0.8);
}

TEST_CASE("run_ican reports NoCanFit on latent-dependent noise") {
    const auto g = gen_dataset3(160, 7);
    const auto data = normalize(g.sample);
    IcanConfig cfg;
    cfg.max_iterations = 3;
    cfg.seed = 7;
    const auto result = run_ican(data, cfg);
    CHECK(result.decision == Decision::NoCanFit);
    CHECK(result.iterations_used == cfg.max_iterations);
    const double min_p = std::min({result.nx_ny.p_gamma, result.nx_t.p_gamma,
                                   result.ny_t.p_gamma});
    CHECK(min_p < cfg.alpha);
}

TEST_CASE("property: swapping the axes mirrors the decision") {
    const auto g = gen_dataset1(60, 21);
    const auto data = normalize(g.sample);
    IcanConfig cfg;
    cfg.eval_budget = 1200;
    cfg.max_iterations = 2;
    cfg.seed = 21;

    IcanConfig mirrored = cfg;
    mirrored.ratio_low = 1.0 / cfg.ratio_high;
    mirrored.ratio_high = 1.0 / cfg.ratio_low;

    const auto a = run_ican(data, cfg);
    const auto b = run_ican(swapped(data), mirrored);

    auto mirror = [](Decision d) {
        if (d == Decision::XtoY) return Decision::YtoX;
        if (d == Decision::YtoX) return Decision::XtoY;
        return d;
    };
    CHECK(b.decision == mirror(a.decision));
    CHECK(b.iterations_used == a.iterations_used);
    CHECK(b.t_hat.values == a.t_hat.values);
}
