#include <doctest.h>

#include "nonstat/error.hpp"
#include "nonstat/parallel.hpp"
#include "nonstat/spectral.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace nonstat;

namespace {

constexpr double pi = std::numbers::pi;

double min_eigenvalue(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("Fourier grid") {
    CHECK(fourier_indices(5) == std::vector<int>{-2, -1, 0, 1, 2});
    CHECK(fourier_indices(6) == std::vector<int>{-2, -1, 0, 1, 2, 3});
    CHECK(default_window(100) == 32);
    CHECK(default_window(600) == 100);
    CHECK(default_window(10000) == 256);
}

TEST_CASE("DFT of zero, constant and cosine windows") {
    const Index n = 40;
    const MultivariateSeries zero(Eigen::MatrixXd::Zero(100, 2));
    CHECK(dft_window(zero, 11, 50, 0.7).norm() == 0.0);

    const MultivariateSeries ones(Eigen::MatrixXd::Ones(100, 1));
    for (int k = 1; k < n; ++k) {
        CHECK(std::abs(dft_window(ones, 23, 23 + n - 1, 2 * pi * k / n)(0)) <= 1e-10);
    }
    CHECK(std::abs(dft_window(ones, 23, 23 + n - 1, 0.0)(0)) == doctest::Approx(n / std::sqrt(2 * pi * n)));

    for (int k : {1, 5, 13}) {
        const double omega = 2 * pi * k / n;
        Eigen::MatrixXd c(120, 1);
        for (Index s = 1; s <= 120; ++s) c(s - 1, 0) = std::cos(omega * static_cast<double>(s));
        const auto j = dft_window(MultivariateSeries(c), 41, 40 + n, omega)(0);
        CHECK(std::norm(j) == doctest::Approx(n / (8 * pi)).epsilon(1e-8));
    }
}

TEST_CASE("DFT uses the absolute time index") {
    const Eigen::MatrixXd x = support::white_noise(60, 2, 3);
    const MultivariateSeries r(x);
    const double omega = 2 * pi * 3 / 20;
    const auto j = dft_window(r, 21, 40, omega);
    const auto raw = oracle::periodogram(x, 21, 40);
    const Eigen::MatrixXcd outer = j * j.adjoint();
    CHECK((outer - raw[static_cast<std::size_t>(3 + 9)]).norm() < 1e-12);
    Eigen::VectorXcd manual = Eigen::VectorXcd::Zero(2);
    for (Index s = 21; s <= 40; ++s) manual += x.row(s - 1).transpose().cast<std::complex<double>>() * std::polar(1.0, -omega * s);
    manual /= std::sqrt(2 * pi * 20);
    CHECK((manual - j).norm() < 1e-12);
}

TEST_CASE("window errors") {
    const MultivariateSeries r(support::white_noise(50, 1, 1));
    CHECK_THROWS_AS(dft_window(r, 5, 5, 0.1), WindowError);
    CHECK_THROWS_AS(dft_window(r, 0, 5, 0.1), WindowError);
    CHECK_THROWS_AS(dft_window(r, 45, 51, 0.1), WindowError);
    CHECK_THROWS_AS(dft_window(r, 9, 5, 0.1), WindowError);
    CHECK_THROWS_AS(periodogram(r, 3, 3), WindowError);
    CHECK_THROWS_AS(deviation_stat(r, 9, 10), WindowError);
    CHECK_THROWS_AS(deviation_stat(r, 41, 10), WindowError);
    CHECK_THROWS_AS(deviation_profile(r, 25), WindowError);
    CHECK_NOTHROW(deviation_profile(MultivariateSeries(support::white_noise(51, 1, 1)), 25));
    SpectralConfig bad;
    bad.bandwidth = 0.0;
    CHECK_THROWS_AS(smoothed_spectral_density(r, 1, 20, bad), ConfigError);
    bad.bandwidth = -1.0;
    CHECK_THROWS_AS(deviation_profile(r, 10, bad), ConfigError);
}

TEST_CASE("periodogram matches the oracle, is rank one and satisfies Parseval") {
    for (Index n : {2, 7, 16, 33}) {
        const Eigen::MatrixXd x = support::white_noise(80, 3, static_cast<std::uint64_t>(n));
        const MultivariateSeries r(x);
        const auto est = periodogram(r, 5, 4 + n);
        const auto raw = oracle::periodogram(x, 5, 4 + n);
        REQUIRE(est.matrices.size() == raw.size());
        Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(3, 3);
        for (std::size_t k = 0; k < raw.size(); ++k) {
            CHECK((est.matrices[k] - raw[k]).norm() < 1e-12);
            sum += est.matrices[k];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(est.matrices[k], Eigen::EigenvaluesOnly);
            CHECK(es.eigenvalues()(1) <= 1e-10 * est.matrices[k].trace().real() + 1e-300);
        }
        const Eigen::MatrixXd lag0 = x.middleRows(4, n).transpose() * x.middleRows(4, n) / static_cast<double>(n);
        CHECK(((2 * pi / static_cast<double>(n)) * sum - lag0.cast<std::complex<double>>()).cwiseAbs().maxCoeff() < 1e-10);
    }
    const auto zero = periodogram(MultivariateSeries(Eigen::MatrixXd::Zero(10, 2)), 1, 10);
    for (const auto& m : zero.matrices) CHECK(m.isZero(0.0));
}

TEST_CASE("smoothed density matches the oracle for both kernels") {
    const Eigen::MatrixXd x = support::white_noise(90, 2, 12);
    const MultivariateSeries r(x);
    for (Index n : {9, 20, 64}) {
        for (bool uniform : {false, true}) {
            for (double h : {0.05, 0.4, 1.3, pi, 5.0}) {
                SpectralConfig cfg;
                cfg.kernel.type = uniform ? KernelType::Uniform : KernelType::Epanechnikov;
                cfg.bandwidth = h;
                const auto est = smoothed_spectral_density(r, 3, 2 + n, cfg);
                const auto ref = oracle::smooth(oracle::periodogram(x, 3, 2 + n), h, uniform);
                CHECK(est.bandwidth == h);
                for (std::size_t k = 0; k < ref.size(); ++k) CHECK((est.matrices[k] - ref[k]).norm() < 1e-12);
            }
        }
    }
}

TEST_CASE("uniform kernel over the whole circle gives the flat lag-zero spectrum") {
    const Eigen::MatrixXd x = support::white_noise(64, 2, 5);
    SpectralConfig cfg;
    cfg.kernel.type = KernelType::Uniform;
    cfg.bandwidth = pi;
    const auto est = smoothed_spectral_density(MultivariateSeries(x), 1, 64, cfg);
    const Eigen::MatrixXcd expected = (x.transpose() * x / 64.0 / (2 * pi)).cast<std::complex<double>>();
    for (const auto& m : est.matrices) CHECK((m - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("spectral estimates are Hermitian, PSD and conjugate symmetric") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(seed);
        const Index dim = 1 + static_cast<Index>(rng.below(4));
        const Index n = 2 + static_cast<Index>(rng.below(40));
        Eigen::MatrixXd x = support::white_noise(n + 5, dim, seed) * (0.1 + 10 * rng.uniform());
        const auto est = smoothed_spectral_density(MultivariateSeries(x), 3, 2 + n);
        for (std::size_t k = 0; k < est.matrices.size(); ++k) {
            const auto& m = est.matrices[k];
            const double scale = m.norm();
            CHECK((m - m.adjoint()).norm() <= 1e-12 * scale + 1e-300);
            CHECK(min_eigenvalue(m) >= -1e-10 * m.trace().real());
            const int j = est.indices[k];
            if (-j >= est.indices.front()) CHECK((est.at(-j) - m.conjugate()).norm() <= 1e-12 * scale + 1e-300);
        }
    }
}

TEST_CASE("deviation statistic matches the oracle") {
    const Eigen::MatrixXd x = support::white_noise(70, 2, 9);
    const MultivariateSeries r(x);
    for (Index n : {8, 15, 32}) {
        const double h = std::pow(static_cast<double>(n), -0.2);
        for (Index tau = n; tau <= 70 - n; tau += 7) {
            CHECK(deviation_stat(r, tau, n) == doctest::Approx(oracle::deviation(x, tau, n, h)).epsilon(1e-11));
        }
    }
}

TEST_CASE("sliding profile agrees with the direct statistic") {
    for (Index dim : {1, 2, 3}) {
        for (Index n : {2, 5, 16, 33}) {
            const Eigen::MatrixXd x = support::white_noise(3 * n + 140, dim, static_cast<std::uint64_t>(7 * n + dim));
            const MultivariateSeries r(x);
            for (bool uniform : {false, true}) {
                for (double c : {0.3, 1.0, 4.0, 40.0}) {
                    SpectralConfig cfg;
                    cfg.kernel.type = uniform ? KernelType::Uniform : KernelType::Epanechnikov;
                    cfg.bandwidth_constant = c;
                    const auto profile = deviation_profile(r, n, cfg);
                    REQUIRE(profile.d_hat.size() == r.length() - 2 * n + 1);
                    CHECK(profile.tau_values.front() == n);
                    CHECK(profile.tau_values.back() == r.length() - n);
                    double worst = 0.0;
                    for (std::size_t i = 0; i < profile.tau_values.size(); ++i) {
                        const double direct = deviation_stat(r, profile.tau_values[i], n, cfg);
                        worst = std::max(worst, std::abs(direct - profile.d_hat(static_cast<Index>(i))) / (1e-3 + direct));
                    }
                    CHECK(worst < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("identical windows give zero deviation") {
    Eigen::MatrixXd x = support::white_noise(100, 2, 4);
    x.middleRows(50, 30) = x.middleRows(20, 30);
    CHECK(deviation_stat(MultivariateSeries(x), 50, 30) <= 1e-12);
}

TEST_CASE("deviation is symmetric in the two windows and scales with c^4") {
    const Eigen::MatrixXd x = support::white_noise(64, 2, 6);
    Eigen::MatrixXd swapped(64, 2);
    swapped << x.bottomRows(32), x.topRows(32);
    const double d = deviation_stat(MultivariateSeries(x), 32, 32);
    CHECK(deviation_stat(MultivariateSeries(swapped), 32, 32) == doctest::Approx(d).epsilon(1e-12));
    for (double c : {0.1, 3.0, -2.0}) {
        const MultivariateSeries scaled(c * x);
        CHECK(deviation_stat(scaled, 32, 32) == doctest::Approx(std::pow(c, 4) * d).epsilon(1e-11));
        const auto p1 = periodogram(MultivariateSeries(x), 1, 20);
        const auto p2 = periodogram(scaled, 1, 20);
        for (std::size_t k = 0; k < p1.matrices.size(); ++k) CHECK((p2.matrices[k] - c * c * p1.matrices[k]).norm() < 1e-12 * (1 + c * c));
    }
}

TEST_CASE("profile is non-negative and independent of the worker count") {
    const MultivariateSeries r(support::white_noise(700, 2, 31));
    const auto saved = max_threads();
    set_max_threads(1);
    const auto one = deviation_profile(r, 64);
    set_max_threads(8);
    const auto eight = deviation_profile(r, 64);
    set_max_threads(saved);
    CHECK((one.d_hat.array() >= 0.0).all());
    CHECK((one.d_hat.array() == eight.d_hat.array()).all());
}

TEST_SUITE("monte-carlo") {

TEST_CASE("white noise spectrum is flat at 1/(2 pi)") {
    const Index n = 512;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto est = smoothed_spectral_density(MultivariateSeries(support::white_noise(n, 1, seed)), 1, n);
        for (Index k = 0; k < n; ++k) mean(k) += est.matrices[static_cast<std::size_t>(k)](0, 0).real() / 20.0;
    }
    CHECK((mean.array() - 1.0 / (2 * pi)).abs().maxCoeff() <= 0.15);
}

TEST_CASE("piecewise white noise deviation near its closed form") {
    // sigma^2 1 -> 4: |4 - 1|^2 / (2 pi)^2.
    const double closed = 9.0 / (4 * pi * pi);
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Eigen::MatrixXd x = support::white_noise(512, 1, seed);
        x.bottomRows(256) *= 2.0;
        mean += deviation_stat(MultivariateSeries(x), 256, 256) / 50.0;
    }
    CHECK(std::abs(mean - closed) <= 0.25 * closed);
}

int calm_profiles(Index dim) {
    int calm = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto p = deviation_profile(MultivariateSeries(support::white_noise(600, dim, 900 + seed)), 64);
        std::vector<double> v(p.d_hat.data(), p.d_hat.data() + p.d_hat.size());
        std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
        calm += p.d_hat.maxCoeff() <= 3.0 * v[v.size() / 2];
    }
    MESSAGE("L = " << dim << ": max <= 3 median in " << calm << " of 50 runs");
    return calm;
}

TEST_CASE("white noise profile has no dominant peak, univariate") { CHECK(calm_profiles(1) >= 45); }

TEST_CASE("white noise profile has no dominant peak, bivariate") { CHECK(calm_profiles(2) >= 45); }

TEST_CASE("variance break is located by the profile argmax") {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Eigen::MatrixXd x = support::white_noise(600, 1, 300 + seed);
        x.bottomRows(300) *= 2.0;
        const auto p = deviation_profile(MultivariateSeries(x), 64);
        Index at;
        p.d_hat.maxCoeff(&at);
        hits += std::abs(p.tau_values[static_cast<std::size_t>(at)] - 300) <= 16;
    }
    MESSAGE("argmax within 16 of the break in " << hits << " of 50 runs");
    CHECK(hits >= 45);
}

}  // TEST_SUITE
