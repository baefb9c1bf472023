#include "ican/datagen.hpp"

#include "ican/io.hpp"
#include "ican/sample.hpp"
#include "ican/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <stdexcept>

using namespace ican;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("ican_datagen_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const char* name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("section-3 curve matches the closed form and is symmetric at 1/2") {
    const auto g = gen_section3(10, 1);
    const double t = 0.3;
    const double expected_u = 4.0 * normal_pdf(t, -0.1, 0.1) + 4.0 * normal_pdf(t, 1.1, 0.1);
    const double expected_v = normal_pdf(t, -0.1, 0.1) - normal_pdf(t, 1.1, 0.1);
    CHECK(g.curve_u(t) == doctest::Approx(expected_u).epsilon(1e-14));
    CHECK(g.curve_v(t) == doctest::Approx(expected_v).epsilon(1e-14));
    // The two bumps sit symmetrically about t = 1/2.
    CHECK(std::abs(g.curve_v(0.5)) < 1e-15);
}

TEST_CASE("section-3 noise draws stay inside the documented box") {
    const auto g = gen_section3(500, 7);
    for (std::size_t i = 0; i < g.truth.nx.size(); ++i) {
        CHECK(std::abs(g.truth.nx[i]) <= 0.1);
        CHECK(std::abs(g.truth.ny[i]) <= 0.1);
        CHECK(g.truth.t[i] >= 0.0);
        CHECK(g.truth.t[i] <= 1.0);
        CHECK(g.sample.x[i] == g.curve_u(g.truth.t[i]) + g.truth.nx[i]);
    }
}

TEST_CASE("generators are bit-identical for equal seeds") {
    const auto a = gen_dataset1(100, 99);
    const auto b = gen_dataset1(100, 99);
    CHECK(a.sample.x == b.sample.x);
    CHECK(a.sample.y == b.sample.y);
    CHECK(a.truth.t == b.truth.t);
    const auto c = gen_dataset1(100, 100);
    CHECK(a.sample.x != c.sample.x);
}

TEST_CASE("dataset-1 noise respects its bounds and vanishes when disabled") {
    const auto g = gen_dataset1(300, 5);
    for (double v : g.truth.nx) CHECK(std::abs(v) <= 0.035);
    for (double v : g.truth.ny) CHECK(std::abs(v) <= 0.035);

    const auto clean = gen_dataset1(300, 5, 5, 0.0);
    CHECK(clean.truth.t == g.truth.t);  // same latent stream
    for (std::size_t i = 0; i < clean.sample.size(); ++i) {
        CHECK(clean.truth.nx[i] == 0.0);
        CHECK(clean.sample.x[i] == clean.curve_u(clean.truth.t[i]));
        CHECK(clean.sample.y[i] == clean.curve_v(clean.truth.t[i]));
    }
}

TEST_CASE("dataset-1 components are non-monotone for the default seed family") {
    for (std::uint64_t seed : {0ULL, 1ULL, 2ULL, 3ULL, 4ULL}) {
        const auto g = gen_dataset1(10, seed);
        bool v_inc = true, v_dec = true;
        double prev = g.curve_v(0.0);
        for (int i = 1; i <= 100; ++i) {
            const double cur = g.curve_v(i / 100.0);
            if (cur <= prev) v_inc = false;
            if (cur >= prev) v_dec = false;
            prev = cur;
        }
        CHECK((!v_inc && !v_dec));
    }
}

TEST_CASE("dataset-2 noise laws and monotone v") {
    const auto g = gen_dataset2(2000, 3);
    // Raw draws on [-0.0015, 0]; recorded noise is centered.
    for (double v : g.truth.ny) {
        const double raw = v - 0.00075;
        CHECK(raw <= 0.0);
        CHECK(raw >= -0.0015);
    }
    for (double v : g.truth.nx) CHECK(std::abs(v) <= 0.008);
    CHECK(std::abs(mean(g.truth.ny)) < 1e-4);

    const double ratio = sample_variance(g.truth.nx) / sample_variance(g.truth.ny);
    CHECK(ratio > 60.0);   // raw laws give about 113.8
    CHECK(ratio < 200.0);

    double prev = g.curve_v(0.0);
    for (int i = 1; i <= 200; ++i) {
        const double cur = g.curve_v(i / 200.0);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("dataset-3 noise amplitude grows with the latent") {
    const auto g = gen_dataset3(200, 11);
    for (std::size_t i = 0; i < g.sample.size(); ++i) {
        const double cap = 0.005 + 0.07 * g.truth.t[i];
        CHECK(std::abs(g.truth.nx[i]) <= cap);
        CHECK(std::abs(g.truth.ny[i]) <= cap);
    }
    std::vector<double> abs_nx(g.truth.nx.size());
    for (std::size_t i = 0; i < abs_nx.size(); ++i) abs_nx[i] = std::abs(g.truth.nx[i]);
    // Rank correlation well outside the n = 200 null band (p < 0.01).
    CHECK(spearman(abs_nx, g.truth.t) > 0.2);
}

TEST_CASE("ground-truth draws are pairwise independent for CAN generators") {
    const auto g = gen_dataset1(1000, 13);
    const double band = 3.0 / std::sqrt(1000.0);
    CHECK(std::abs(spearman(g.truth.t, g.truth.nx)) < band);
    CHECK(std::abs(spearman(g.truth.t, g.truth.ny)) < band);
    CHECK(std::abs(spearman(g.truth.nx, g.truth.ny)) < band);
}

TEST_CASE("normalize centers and scales with the n-1 convention") {
    PairedSample s;
    s.x = {0.0, 2.0};
    s.y = {5.0, 9.0};
    const auto n = normalize(s);
    CHECK(n.x[0] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(n.x[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(n.normalization.x.offset == doctest::Approx(1.0));
    CHECK(n.normalization.x.scale == doctest::Approx(std::sqrt(2.0)));

    const auto g = gen_dataset1(200, 1);
    const auto gn = normalize(g.sample);
    CHECK(std::abs(mean(gn.x)) < 1e-10);
    CHECK(std::abs(sample_variance(gn.x) - 1.0) < 1e-10);
    CHECK(std::abs(mean(gn.y)) < 1e-10);
    CHECK(std::abs(sample_variance(gn.y) - 1.0) < 1e-10);
}

TEST_CASE("normalizing normalized data is the identity") {
    const auto g = gen_dataset1(150, 2);
    const auto once = normalize(g.sample);
    const auto twice = normalize(once);
    for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(twice.x[i] == doctest::Approx(once.x[i]).epsilon(1e-12));
        CHECK(twice.y[i] == doctest::Approx(once.y[i]).epsilon(1e-12));
    }
}

TEST_CASE("denormalize undoes normalize") {
    const auto g = gen_dataset2(150, 8);
    const auto round = denormalize(normalize(g.sample));
    for (std::size_t i = 0; i < g.sample.size(); ++i) {
        CHECK(round.x[i] == doctest::Approx(g.sample.x[i]).epsilon(1e-12));
        CHECK(round.y[i] == doctest::Approx(g.sample.y[i]).epsilon(1e-12));
    }
}

TEST_CASE("normalize rejects constant axes") {
    PairedSample s;
    s.x = {1.0, 1.0, 1.0};
    s.y = {0.0, 0.5, 1.0};
    CHECK_THROWS_AS(normalize(s), std::invalid_argument);
}

TEST_CASE("csv round-trip reproduces every double exactly") {
    TempDir tmp;
    const auto g = gen_dataset1(64, 21);
    const std::string path = tmp.file("roundtrip.csv");
    save_csv(g.sample, path);
    const auto loaded = load_csv(path);
    CHECK(loaded.x == g.sample.x);
    CHECK(loaded.y == g.sample.y);
    CHECK(loaded.provenance == path);
}

TEST_CASE("csv loader handles headers and reports malformed lines") {
    TempDir tmp;
    {
        std::ofstream out(tmp.file("ok.csv"));
        out << "x,y\n1.0,2.0\n3.0,4.0\n";
    }
    const auto s = load_csv(tmp.file("ok.csv"));
    REQUIRE(s.size() == 2);
    CHECK(s.x[0] == 1.0);
    CHECK(s.y[1] == 4.0);

    {
        std::ofstream out(tmp.file("bad.csv"));
        out << "1.0,2.0\n3.0,4.0\n1.0,abc\n";
    }
    CHECK_THROWS_WITH_AS(load_csv(tmp.file("bad.csv")), doctest::Contains("line 3"),
                         std::runtime_error);

    {
        std::ofstream out(tmp.file("short.csv"));
        out << "x,y\n1.0,2.0\n";
    }
    CHECK_THROWS_WITH_AS(load_csv(tmp.file("short.csv")), doctest::Contains("fewer than 2"),
                         std::runtime_error);

    CHECK_THROWS_AS(load_csv(tmp.file("missing.csv")), std::runtime_error);
}
