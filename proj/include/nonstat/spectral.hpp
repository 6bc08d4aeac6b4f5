#pragma once

#include "nonstat/series.hpp"

#include <complex>
#include <optional>
#include <vector>

namespace nonstat {

enum class KernelType { Epanechnikov, Uniform };

/// Non-negative symmetric kernel on [-1, 1] integrating to one.
struct Kernel {
    KernelType type = KernelType::Epanechnikov;

    double operator()(double u) const noexcept {
        if (u < -1.0 || u > 1.0) return 0.0;
        return type == KernelType::Epanechnikov ? 0.75 * (1.0 - u * u) : 0.5;
    }
};

/// Smoothing settings shared by the spectral estimators and the detector.
/// The bandwidth in radians is `bandwidth` when set, otherwise
/// bandwidth_constant * N^(-1/5).
struct SpectralConfig {
    Kernel kernel{};
    double bandwidth_constant = 1.0;
    std::optional<double> bandwidth;

    double bandwidth_for(Index window) const;
};

/// Spectral matrices on the Fourier grid of one window:
/// omega_j = 2 pi j / N for j = -floor((N-1)/2) .. floor(N/2).
struct SpectralEstimate {
    std::vector<int> indices;
    std::vector<double> frequencies;
    std::vector<Eigen::MatrixXcd> matrices;
    Index window_length = 0;
    double bandwidth = 0.0;

    /// Matrix at Fourier index j (negative j allowed).
    const Eigen::MatrixXcd& at(int j) const;
};

struct DeviationProfile {
    std::vector<Index> tau_values;  ///< candidate change points, 1-based, N .. T-N
    Eigen::VectorXd d_hat;          ///< deviation metric at each candidate, >= 0
    Index window = 0;
};

/// floor(T/6) clamped to [32, 256].
Index default_window(Index length);

/// Fourier indices of an N-point window, -floor((N-1)/2) .. floor(N/2).
std::vector<int> fourier_indices(Index window);

/// J(omega) = (2 pi N)^(-1/2) sum_{s=lo..hi} r_s exp(-i s omega) over the
/// 1-based inclusive window [lo, hi], phase taken from the absolute index s.
Eigen::VectorXcd dft_window(const MultivariateSeries& r, Index lo, Index hi, double omega);

/// Raw periodogram J J* at each Fourier frequency of the window [lo, hi].
SpectralEstimate periodogram(const MultivariateSeries& r, Index lo, Index hi);

/// Kernel-smoothed spectral density on the window's Fourier grid:
/// f(omega_k) = (2 pi / N) sum_j K_h(omega_k - omega_j) I(omega_j), kernel
/// argument taken as circular distance in (-pi, pi].
SpectralEstimate smoothed_spectral_density(const MultivariateSeries& r, Index lo, Index hi,
                                           const SpectralConfig& cfg = {});

/// Deviation between the N observations left of tau, (tau-N, tau], and the N
/// observations right of it, (tau, tau+N]: Riemann sum of the squared
/// Frobenius distance of the two smoothed spectral matrices, divided by 2 pi.
/// Errors: WindowError unless N <= tau <= T - N.
double deviation_stat(const MultivariateSeries& r, Index tau, Index window, const SpectralConfig& cfg = {});

/// deviation_stat at every tau in [N, T-N]. Uses a sliding DFT; candidate
/// blocks are evaluated concurrently. Errors: WindowError when T < 2N + 1.
DeviationProfile deviation_profile(const MultivariateSeries& r, Index window, const SpectralConfig& cfg = {});

namespace detail {

/// Profile values only, evaluated sequentially on a raw T x L matrix.
Eigen::VectorXd profile_values(const Eigen::Ref<const Eigen::MatrixXd>& x, Index window,
                               const SpectralConfig& cfg, bool concurrent);

}  // namespace detail

}  // namespace nonstat
