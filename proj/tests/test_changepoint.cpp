#include <doctest.h>

#include "nonstat/changepoint.hpp"
#include "nonstat/error.hpp"
#include "nonstat/parallel.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>

using namespace nonstat;

namespace {

// Bivariate series with a correlation reversal at `at`.
Eigen::MatrixXd reversal(Index length, Index at, std::uint64_t seed) {
    Eigen::MatrixXd x = support::correlated_pair(length, 0.8, seed);
    const Eigen::MatrixXd after = support::correlated_pair(length - at, -0.8, seed + 7777);
    x.bottomRows(length - at) = after;
    return x;
}

void check_result_invariants(const ChangePointResult& res, Index length) {
    const auto& cps = res.change_points;
    REQUIRE(cps.size() == res.statistics.size());
    for (std::size_t i = 0; i < cps.size(); ++i) {
        CHECK(cps[i] > res.window);
        CHECK(cps[i] < length - res.window);
        CHECK(res.statistics[i] > res.threshold);
        if (i > 0) CHECK(cps[i] - cps[i - 1] > res.window);
    }
    CHECK(res.round_thresholds.size() >= cps.size());
    for (double t : res.round_thresholds) CHECK(t == res.threshold);
    CHECK((res.profile.d_hat.array() >= 0.0).all());
}

}  // namespace

TEST_CASE("type-7 quantile of the null maxima") {
    NullDistribution null;
    null.maxima = {1.0, 2.0, 4.0, 8.0, 16.0};
    CHECK(null.quantile(0.5) == 4.0);
    CHECK(null.quantile(0.0) == 1.0);
    CHECK(null.quantile(1.0) == 16.0);
    CHECK(null.quantile(0.9) == doctest::Approx(8.0 + 0.6 * 8.0));
    CHECK(null.quantile(0.3) == doctest::Approx(2.0 + 0.2 * 2.0));
    null.maxima = {3.0, 5.0};
    CHECK(null.quantile(0.5) == 4.0);
    CHECK_THROWS_AS(NullDistribution{}.quantile(0.5), StateError);
}

TEST_CASE("threshold is the bootstrap median at alpha 0.5 and non-increasing in alpha") {
    const MultivariateSeries r(support::white_noise(300, 2, 3));
    const auto null = null_distribution(r.values(), 32, {}, 120, 9);
    CHECK(std::is_sorted(null.maxima.begin(), null.maxima.end()));
    CHECK(null_threshold(r, 0.5, 32, 120, 9) == null.quantile(0.5));
    double previous = 1e300;
    for (double alpha : {0.001, 0.01, 0.05, 0.1, 0.3, 0.5, 0.9}) {
        const double t = null_threshold(r, alpha, 32, 120, 9);
        CHECK(t <= previous);
        previous = t;
    }
}

TEST_CASE("detector argument errors") {
    const MultivariateSeries r(support::white_noise(200, 1, 1));
    CHECK_THROWS_AS(null_threshold(r, 0.05, 32, 99, 1), ConfigError);
    CHECK_THROWS_AS(null_threshold(r, 0.0, 32, 100, 1), ConfigError);
    CHECK_THROWS_AS(null_threshold(r, 1.0, 32, 100, 1), ConfigError);
    CHECK_THROWS_AS(null_threshold(r, 0.05, 100, 100, 1), WindowError);
    CHECK_THROWS_AS(detect_changepoints(r, 1.5, 32), ConfigError);
    CHECK_THROWS_AS(detect_changepoints(r, 0.05, 120), WindowError);
}

TEST_CASE("a strong covariance change is detected with all result invariants") {
    const MultivariateSeries r(reversal(600, 300, 5));
    DetectorOptions opts;
    opts.seed = 17;
    const auto res = detect_changepoints(r, 0.05, 64, opts);
    check_result_invariants(res, 600);
    REQUIRE(!res.change_points.empty());
    const bool near = std::any_of(res.change_points.begin(), res.change_points.end(),
                                  [](Index c) { return std::abs(c - 300) <= 16; });
    CHECK(near);
    CHECK(res.alpha == 0.05);
    CHECK(res.window == 64);
    CHECK(res.seed == 17);
    CHECK(res.n_boot == 200);
    CHECK(res.bootstrap_block >= 1.0);
}

TEST_CASE("detection is deterministic and independent of the worker count") {
    const MultivariateSeries r(reversal(500, 240, 8));
    DetectorOptions opts;
    opts.seed = 99;
    opts.n_boot = 100;
    const auto saved = max_threads();
    set_max_threads(1);
    const auto a = detect_changepoints(r, 0.05, 48, opts);
    const auto b = detect_changepoints(r, 0.05, 48, opts);
    set_max_threads(8);
    const auto c = detect_changepoints(r, 0.05, 48, opts);
    set_max_threads(saved);
    for (const auto* other : {&b, &c}) {
        CHECK(a.change_points == other->change_points);
        CHECK(a.statistics == other->statistics);
        CHECK(a.threshold == other->threshold);
        CHECK((a.profile.d_hat.array() == other->profile.d_hat.array()).all());
    }
    opts.seed = 100;
    CHECK(detect_changepoints(r, 0.05, 48, opts).threshold != a.threshold);
}

TEST_CASE("accepted set shrinks as alpha decreases") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        Eigen::MatrixXd x = support::white_noise(400, 2, seed);
        x.middleRows(150, 100) *= 1.8;
        const MultivariateSeries r(x);
        const auto null = null_distribution(x, 40, {}, 100, seed);
        DetectorOptions opts;
        opts.seed = seed;
        const auto strict = detect_with_null(r, 0.01, 40, null, opts);
        const auto loose = detect_with_null(r, 0.05, 40, null, opts);
        for (Index c : strict.change_points) {
            CHECK(std::find(loose.change_points.begin(), loose.change_points.end(), c) != loose.change_points.end());
        }
        check_result_invariants(loose, 400);
    }
}

TEST_CASE("custom exclusion radius") {
    const MultivariateSeries r(reversal(600, 300, 12));
    DetectorOptions opts;
    opts.n_boot = 100;
    opts.min_separation = 100;
    const auto res = detect_changepoints(r, 0.2, 64, opts);
    for (std::size_t i = 1; i < res.change_points.size(); ++i) CHECK(res.change_points[i] - res.change_points[i - 1] > 100);
}

TEST_CASE("scaling the series keeps the decisions") {
    const Eigen::MatrixXd x = reversal(400, 200, 21);
    DetectorOptions opts;
    opts.n_boot = 100;
    opts.seed = 4;
    const auto base = detect_changepoints(MultivariateSeries(x), 0.05, 40, opts);
    for (double c : {0.01, 7.0}) {
        const auto scaled = detect_changepoints(MultivariateSeries(c * x), 0.05, 40, opts);
        CHECK(scaled.change_points == base.change_points);
        CHECK(scaled.threshold == doctest::Approx(std::pow(c, 4) * base.threshold).epsilon(1e-8));
    }
}

TEST_CASE("segments tile the series") {
    const MultivariateSeries r(Eigen::MatrixXd::Random(288, 2));
    auto whole = segment(r, std::vector<Index>{});
    REQUIRE(whole.size() == 1);
    CHECK(whole[0].lo == 0);
    CHECK(whole[0].hi == 288);
    auto two = segment(r, std::vector<Index>{100});
    REQUIRE(two.size() == 2);
    CHECK(two[0].hi == 100);
    CHECK(two[1].lo == 100);
    CHECK(two[1].hi == 288);
    CHECK(two[1].data().rows() == 188);
    CHECK((two[1].data().row(0).array() == r.values().row(100).array()).all());

    const auto seven = segment(r, std::vector<Index>{54, 94, 133, 166, 199, 231});
    std::vector<Index> lengths;
    for (const auto& s : seven) lengths.push_back(s.length());
    CHECK(lengths == std::vector<Index>{54, 40, 39, 33, 33, 32, 57});
    Index total = 0;
    for (Index l : lengths) total += l;
    CHECK(total == 288);

    CHECK_THROWS_AS(segment(r, std::vector<Index>{50, 50}), ConfigError);
    CHECK_THROWS_AS(segment(r, std::vector<Index>{288}), ConfigError);
}

TEST_SUITE("monte-carlo") {

TEST_CASE("no change points on white noise at alpha 0.01") {
    int clean = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        DetectorOptions opts;
        opts.seed = seed;
        clean += detect_changepoints(MultivariateSeries(support::white_noise(600, 1, 4000 + seed)), 0.01, 64, opts)
                     .change_points.empty();
    }
    MESSAGE("zero change points in " << clean << " of 100 runs");
    CHECK(clean >= 95);
}

TEST_CASE("bootstrap threshold coverage on fresh null series") {
    int exceed = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const MultivariateSeries r(support::white_noise(600, 1, 6000 + seed));
        exceed += deviation_profile(r, 64).d_hat.maxCoeff() > null_threshold(r, 0.05, 64, 200, seed);
    }
    MESSAGE("max exceeded the threshold in " << exceed << " of 200 runs");
    CHECK(std::abs(exceed / 200.0 - 0.05) <= 0.05);
}

TEST_CASE("covariance doubling at t = 300 gives exactly one nearby point") {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Eigen::MatrixXd x = support::correlated_pair(600, 0.5, 8000 + seed);
        x.bottomRows(300) *= std::sqrt(2.0);
        DetectorOptions opts;
        opts.seed = seed;
        const auto res = detect_changepoints(MultivariateSeries(x), 0.05, 64, opts);
        hits += res.change_points.size() == 1 && std::abs(res.change_points[0] - 300) <= 16;
    }
    MESSAGE("exactly one point in [284, 316] in " << hits << " of 100 runs");
    CHECK(hits >= 90);
}

}  // TEST_SUITE
