// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sdb/errors.hpp"
#include "sdb/metrics.hpp"
#include "sdb/synthgen.hpp"

using namespace sdb;

namespace {

PointSet gaussian_cloud(int n, int dim, Rng& rng, double mean = 0.0, double std = 1.0) {
    PointSet out(n, std::vector<double>(dim));
    for (auto& p : out)
        for (auto& x : p) x = rng.gaussian(mean, std);
    return out;
}

// Independent O(N^2) oracle for the unbiased U-statistic.
double mmd2_bruteforce(const PointSet& a, const PointSet& b, double h) {
    auto k = [&](const std::vector<double>& x, const std::vector<double>& y) {
        double d2 = 0.0;
        for (size_t j = 0; j < x.size(); ++j) d2 += (x[j] - y[j]) * (x[j] - y[j]);
        return std::exp(-d2 / (2.0 * h * h));
    };
    double ta = 0.0, tb = 0.0, tc = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a.size(); ++j)
            if (i != j) ta += k(a[i], a[j]);
    for (size_t i = 0; i < b.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            if (i != j) tb += k(b[i], b[j]);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) tc += k(a[i], b[j]);
    const double m = static_cast<double>(a.size()), n = static_cast<double>(b.size());
    return ta / (m * (m - 1)) + tb / (n * (n - 1)) - 2.0 * tc / (m * n);
}

}  // namespace

TEST_CASE("swd of a set against itself is exactly zero") {
    Rng rng(3);
    PointSet a = gaussian_cloud(500, 2, rng);
    Rng prng(5);
    CHECK(swd(a, a, 32, prng) == 0.0);
}

TEST_CASE("swd of 1-d point masses at 0 and 1 is one") {
    PointSet a{{0.0}}, b{{1.0}};
    for (int n_proj : {1, 8, 64}) {
        Rng prng(7);
        CHECK(swd(a, b, n_proj, prng) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("wasserstein1 handles unequal sizes by quantile interpolation") {
    CHECK(wasserstein1({0.0, 1.0}, {0.5}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(wasserstein1({0.0}, {0.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(wasserstein1({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
}

TEST_CASE("swd null test at benchmark scale") {
    Rng rng(11);
    PointSet a = gaussian_cloud(3000, 2, rng);
    PointSet b = gaussian_cloud(3000, 2, rng);
    Rng prng(13);
    CHECK(swd(a, b, 128, prng) < 0.05);
}

TEST_CASE("swd is symmetric under a shared projection set") {
    Rng rng(17);
    PointSet a = gaussian_cloud(400, 2, rng, 0.0, 1.0);
    PointSet b = gaussian_cloud(300, 2, rng, 0.5, 1.5);
    Rng prng(19);
    auto dirs = random_unit_directions(64, 2, prng);
    const double ab = swd_with_directions(a, b, dirs);
    const double ba = swd_with_directions(b, a, dirs);
    CHECK(std::fabs(ab - ba) <= 1e-12);
}

TEST_CASE("swd rejects dimension mismatch") {
    PointSet a{{0.0, 1.0}}, b{{1.0}};
    Rng prng(23);
    CHECK_THROWS_AS(swd(a, b, 4, prng), ContractError);
}

TEST_CASE("mmd2 equals the brute-force double loop") {
    Rng rng(29);
    for (int n : {20, 99, 200}) {
        PointSet a = gaussian_cloud(n, 2, rng);
        PointSet b = gaussian_cloud(n + 13, 2, rng, 0.3);
        const double h = 0.8;
        CHECK(std::fabs(mmd2_rbf(a, b, h) - mmd2_bruteforce(a, b, h)) <= 1e-12);
    }
    // identical multisets
    PointSet a = gaussian_cloud(50, 2, rng);
    CHECK(std::fabs(mmd2_rbf(a, a, 1.0) - mmd2_bruteforce(a, a, 1.0)) <= 1e-12);
}

TEST_CASE("mmd2 of far disjoint clusters approaches the within-cluster mass") {
    PointSet a{{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
    PointSet b{{1000.0, 0.0}, {1000.0, 0.0}};
    CHECK(mmd2_rbf(a, b, 1.0) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("same-distribution mmd2 magnitude at benchmark scale") {
    Rng rng(31);
    PointSet a = gaussian_cloud(3000, 2, rng);
    PointSet b = gaussian_cloud(3000, 2, rng);
    Rng hrng(33);
    const double h = median_heuristic_bandwidth(a, b, hrng);
    CHECK(std::fabs(mmd2_rbf(a, b, h)) <= 1e-3);
}

TEST_CASE("mmd2 rejects nonpositive bandwidth") {
    PointSet a{{0.0}, {1.0}}, b{{0.5}, {1.5}};
    CHECK_THROWS_AS(mmd2_rbf(a, b, 0.0), ConfigError);
}

TEST_CASE("metrics are bit-identical across repeated calls") {
    Rng rng(37);
    PointSet a = gaussian_cloud(256, 2, rng);
    PointSet b = gaussian_cloud(256, 2, rng, 0.2);
    Rng p1(41), p2(41);
    CHECK(swd(a, b, 32, p1) == swd(a, b, 32, p2));
    CHECK(mmd2_rbf(a, b, 0.9) == mmd2_rbf(a, b, 0.9));
}

TEST_CASE("single-class classifier is trivially perfect") {
    PointSet xs{{0.0, 0.0}, {1.0, 1.0}};
    std::vector<int> labels{0, 0};
    auto h = ContentClassifier::train(xs, labels, 1, 1);
    CHECK(h.accuracy(xs, labels) == 1.0);
}

TEST_CASE("classifier reaches the sanity floor on clean targets") {
    GeneratorConfig cfg;
    cfg.seed = 5;
    GeneratorSpec spec = build_generator(cfg);
    Rng rng(43);
    auto samples = sample(spec, 3000, rng);
    PointSet xs;
    std::vector<int> labels;
    for (const auto& s : samples) {
        xs.push_back(s.z_tgt);
        labels.push_back(s.content);
    }
    auto h = ContentClassifier::train(xs, labels, cfg.content_count, 7);
    CHECK(h.holdout_accuracy() >= 0.95);

    // fresh clean draws with their own labels
    Rng rng2(47);
    auto fresh = sample(spec, 2000, rng2);
    PointSet fx;
    std::vector<int> fl;
    for (const auto& s : fresh) {
        fx.push_back(s.z_tgt);
        fl.push_back(s.content);
    }
    CHECK(content_accuracy(h, fx, fl) >= 0.95);

    // shuffled labels sit at chance
    std::vector<int> shuffled = fl;
    Rng srng(53);
    for (size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1], shuffled[srng.uniform_int(static_cast<int>(i))]);
    const double chance = content_accuracy(h, fx, shuffled);
    CHECK(chance == doctest::Approx(1.0 / cfg.content_count).epsilon(0.35));
}

TEST_CASE("training on permuted labels lands at chance and trips the calibration gate") {
    GeneratorConfig cfg;
    cfg.seed = 9;
    GeneratorSpec spec = build_generator(cfg);
    Rng rng(59);
    auto samples = sample(spec, 2000, rng);
    PointSet xs;
    std::vector<int> labels;
    for (const auto& s : samples) {
        xs.push_back(s.z_tgt);
        labels.push_back(s.content);
    }
    std::vector<int> permuted = labels;
    Rng srng(61);
    for (size_t i = permuted.size(); i > 1; --i)
        std::swap(permuted[i - 1], permuted[srng.uniform_int(static_cast<int>(i))]);

    CHECK_THROWS_AS(ContentClassifier::train(xs, permuted, cfg.content_count, 11),
                    CalibrationError);

    auto h = ContentClassifier::train(xs, permuted, cfg.content_count, 11, 0.0);
    const double acc = h.accuracy(xs, labels);
    CHECK(std::fabs(acc - 1.0 / cfg.content_count) <= 0.05);
}

TEST_CASE("mean squared endpoint error") {
    PointSet a{{1.0, 2.0}, {0.0, 0.0}};
    PointSet b{{1.0, 1.0}, {3.0, 4.0}};
    CHECK(mean_squared_endpoint_error(a, b) == doctest::Approx((1.0 + 25.0) / 2).epsilon(1e-12));
    CHECK_THROWS_AS(mean_squared_endpoint_error(a, PointSet{{0.0, 0.0}}), ContractError);
}
