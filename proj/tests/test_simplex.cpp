#include "ican/simplex.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

using namespace ican;

TEST_CASE("convex quadratic converges from the origin") {
    auto f = [](std::span<const double> x) {
        double acc = 0.0;
        for (double v : x) acc += (v - 1.0) * (v - 1.0);
        return acc;
    };
    const std::vector<double> x0(5, 0.0);
    const auto r = simplex_minimize(f, x0, 2000);
    for (double v : r.point) CHECK(std::abs(v - 1.0) < 1e-3);
    CHECK(r.evaluations <= 2000);
}

TEST_CASE("Rosenbrock from (-1.2, 1) within 5000 evaluations") {
    auto rosenbrock = [](std::span<const double> x) {
        const double a = x[1] - x[0] * x[0];
        const double b = 1.0 - x[0];
        return 100.0 * a * a + b * b;
    };
    const std::vector<double> x0{-1.2, 1.0};
    const auto r = simplex_minimize(rosenbrock, x0, 5000);
    CHECK(r.value < 1e-4);
}

TEST_CASE("an insufficient budget returns the best-so-far, flagged") {
    auto f = [](std::span<const double> x) {
        double acc = 0.0;
        for (double v : x) acc += v * v;
        return acc;
    };
    const std::vector<double> x0(8, 3.0);
    const auto r = simplex_minimize(f, x0, 12);
    CHECK(r.budget_exhausted);
    CHECK(r.evaluations == 12);
    CHECK(r.value <= f(x0));
}

TEST_CASE("budget below the initial simplex size is rejected") {
    auto f = [](std::span<const double> x) { return x[0] * x[0]; };
    const std::vector<double> x0(4, 1.0);
    CHECK_THROWS_AS(simplex_minimize(f, x0, 4), std::invalid_argument);
}

TEST_CASE("non-finite objective values are treated as +inf") {
    auto f = [](std::span<const double> x) {
        if (x[0] < -0.5) return std::numeric_limits<double>::quiet_NaN();
        return (x[0] - 0.25) * (x[0] - 0.25);
    };
    const std::vector<double> x0{1.0};
    const auto r = simplex_minimize(f, x0, 400);
    CHECK(std::abs(r.point[0] - 0.25) < 1e-3);
}

TEST_CASE("deterministic given the same inputs") {
    auto f = [](std::span<const double> x) {
        return std::sin(3.0 * x[0]) + x[1] * x[1] + 0.1 * x[0] * x[1];
    };
    const std::vector<double> x0{0.4, -0.7};
    const auto a = simplex_minimize(f, x0, 800);
    const auto b = simplex_minimize(f, x0, 800);
    CHECK(a.value == b.value);
    CHECK(a.point == b.point);
    CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("the start vertex bounds the result value") {
    auto f = [](std::span<const double> x) {
        double acc = 0.0;
        for (double v : x) acc += std::abs(v);
        return acc;
    };
    const std::vector<double> x0{0.3, -0.2, 0.9};
    const auto r = simplex_minimize(f, x0, 50);
    CHECK(r.value <= f(x0));
}
