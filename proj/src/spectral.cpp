#include "nonstat/spectral.hpp"

#include "nonstat/error.hpp"
#include "nonstat/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nonstat {

namespace {

using cd = std::complex<double>;
constexpr double two_pi = 2.0 * std::numbers::pi;

// Smoothing weight (2 pi / N) K_h(2 pi m / N) for every offset with a nonzero kernel
// value. m runs over (-N/2, N/2], so 2 pi m / N is the circular distance.
std::vector<std::pair<Index, double>> kernel_weights(Index n, const SpectralConfig& cfg) {
    const double h = cfg.bandwidth_for(n);
    std::vector<std::pair<Index, double>> weights;
    for (Index m = -((n - 1) / 2); m <= n / 2; ++m) {
        const double d = two_pi * static_cast<double>(m) / static_cast<double>(n);
        const double k = cfg.kernel(d / h) / h;
        if (k > 0.0) weights.emplace_back(m, two_pi / static_cast<double>(n) * k);
    }
    return weights;
}

// a * conj(b) without the library's inf/nan recovery path.
inline cd times_conj(cd a, cd b) {
    return {a.real() * b.real() + a.imag() * b.imag(), a.imag() * b.real() - a.real() * b.imag()};
}

void check_window(const MultivariateSeries& r, Index lo, Index hi) {
    if (lo < 1 || hi > r.length() || lo > hi) {
        throw WindowError("window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "] is outside the series 1.." + std::to_string(r.length()));
    }
    if (hi - lo + 1 < 2) throw WindowError("spectral window needs at least two observations");
}

// Sliding-DFT evaluator for the deviation profile. Only non-negative
// frequencies are stored; the negative half follows by conjugate symmetry of
// real input, and the kernel's symmetry carries that through the smoothing.
class ProfileEngine {
public:
    ProfileEngine(const Eigen::Ref<const Eigen::MatrixXd>& x, Index window, const SpectralConfig& cfg)
        : x_(x), n_(window), dim_(x.cols()), half_(window / 2), packed_(dim_ * (dim_ + 1) / 2),
          scale_(1.0 / std::sqrt(two_pi * static_cast<double>(window))), roots_(static_cast<std::size_t>(window)) {
        for (Index m = 0; m < n_; ++m) {
            roots_[static_cast<std::size_t>(m)] =
                std::polar(1.0, -two_pi * static_cast<double>(m) / static_cast<double>(n_));
        }
        // Both kernels are polynomial in the offset on their support: weight(m) = A - B m^2.
        const auto weights = kernel_weights(n_, cfg);
        m_lo_ = weights.front().first;
        m_hi_ = weights.back().first;
        const double h = cfg.bandwidth_for(n_);
        const double base = two_pi / static_cast<double>(n_) / h;
        if (cfg.kernel.type == KernelType::Epanechnikov) {
            const double step = two_pi / (static_cast<double>(n_) * h);
            a_ = 0.75 * base;
            b_ = a_ * step * step;
        } else {
            a_ = 0.5 * base;
            b_ = 0.0;
        }
        // Extended index j = k - m for k in [0, N/2], m in [m_lo, m_hi], wrapped onto stored frequencies.
        const Index lowest = -((n_ - 1) / 2);
        for (Index j = -m_hi_; j <= half_ - m_lo_; ++j) {
            Index w = ((j - lowest) % n_ + n_) % n_ + lowest;
            ext_source_.push_back(w >= 0 ? w : -w);
            ext_conjugate_.push_back(w < 0);
        }
        for (Index k = 0; k <= half_; ++k) {
            const bool paired = k >= 1 && k <= (n_ - 1) / 2;
            multiplicity_.push_back(paired ? 2.0 : 1.0);
        }
        const auto freq_count = static_cast<std::size_t>(half_ + 1);
        left_.resize(freq_count * static_cast<std::size_t>(dim_));
        right_.resize(left_.size());
        diff_.resize(freq_count * static_cast<std::size_t>(packed_));
        ext_.resize(ext_source_.size() * static_cast<std::size_t>(packed_));
        t0_.resize(static_cast<std::size_t>(packed_));
        t1_.resize(t0_.size());
        t2_.resize(t0_.size());
    }

    // Profile values for tau in [first, last] (1-based).
    void evaluate(Index first, Index last, double* out) {
        initialize(first);
        for (Index tau = first;; ++tau) {
            out[tau - first] = statistic();
            if (tau == last) break;
            slide(tau);
        }
    }

private:
    cd root(long long s, Index j) const {
        return roots_[static_cast<std::size_t>((s * j) % n_)];
    }

    void initialize(Index tau) {
        std::fill(left_.begin(), left_.end(), cd{});
        std::fill(right_.begin(), right_.end(), cd{});
        for (Index j = 0; j <= half_; ++j) {
            cd* jl = &left_[static_cast<std::size_t>(j * dim_)];
            cd* jr = &right_[static_cast<std::size_t>(j * dim_)];
            for (Index s = tau - n_ + 1; s <= tau; ++s) {
                const cd e = root(s, j);
                const cd e_right = root(s + n_, j);
                for (Index a = 0; a < dim_; ++a) {
                    jl[a] += x_(s - 1, a) * e;
                    jr[a] += x_(s + n_ - 1, a) * e_right;
                }
            }
            for (Index a = 0; a < dim_; ++a) {
                jl[a] *= scale_;
                jr[a] *= scale_;
            }
        }
    }

    // Moves both windows one step right: tau -> tau + 1.
    void slide(Index tau) {
        const Index enter_left = tau + 1;         // also leaves the right window
        const Index leave_left = tau - n_ + 1;
        const Index enter_right = tau + n_ + 1;
        for (Index j = 0; j <= half_; ++j) {
            const cd e = scale_ * root(enter_left, j);
            cd* jl = &left_[static_cast<std::size_t>(j * dim_)];
            cd* jr = &right_[static_cast<std::size_t>(j * dim_)];
            for (Index a = 0; a < dim_; ++a) {
                const double mid = x_(enter_left - 1, a);
                jl[a] += (mid - x_(leave_left - 1, a)) * e;
                jr[a] += (x_(enter_right - 1, a) - mid) * e;
            }
        }
    }

    // Drops extended entry `out` at offset u_out and adds entry `in` at offset u_in.
    void exchange(std::size_t out, double u_out, std::size_t in, double u_in) {
        const auto packed = static_cast<std::size_t>(packed_);
        const cd* v_out = &ext_[out * packed];
        const cd* v_in = &ext_[in * packed];
        for (std::size_t p = 0; p < packed; ++p) {
            const cd c0 = t0_[p];
            const cd c1 = t1_[p] - c0;
            const cd c2 = t2_[p] + c0 - 2.0 * t1_[p];
            t0_[p] = c0 - v_out[p] + v_in[p];
            t1_[p] = c1 - u_out * v_out[p] + u_in * v_in[p];
            t2_[p] = c2 - (u_out * u_out) * v_out[p] + (u_in * u_in) * v_in[p];
        }
    }

    double statistic() {
        for (Index j = 0; j <= half_; ++j) {
            const cd* jl = &left_[static_cast<std::size_t>(j * dim_)];
            const cd* jr = &right_[static_cast<std::size_t>(j * dim_)];
            cd* d = &diff_[static_cast<std::size_t>(j * packed_)];
            Index p = 0;
            for (Index a = 0; a < dim_; ++a) {
                for (Index b = a; b < dim_; ++b, ++p) {
                    d[p] = times_conj(jl[a], jl[b]) - times_conj(jr[a], jr[b]);
                }
            }
        }
        const auto packed = static_cast<std::size_t>(packed_);
        for (std::size_t e = 0; e < ext_source_.size(); ++e) {
            const cd* d = &diff_[static_cast<std::size_t>(ext_source_[e]) * packed];
            cd* v = &ext_[e * packed];
            if (ext_conjugate_[e]) {
                for (std::size_t p = 0; p < packed; ++p) v[p] = std::conj(d[p]);
            } else {
                std::copy(d, d + packed, v);
            }
        }
        // Moments of the smoothing window around k: sum of v, (j - k) v and (j - k)^2 v.
        std::fill(t0_.begin(), t0_.end(), cd{});
        std::fill(t1_.begin(), t1_.end(), cd{});
        std::fill(t2_.begin(), t2_.end(), cd{});
        for (Index j = -m_hi_; j <= -m_lo_; ++j) {
            const cd* v = &ext_[static_cast<std::size_t>(j + m_hi_) * packed];
            const auto u = static_cast<double>(j);
            for (std::size_t p = 0; p < packed; ++p) {
                t0_[p] += v[p];
                t1_[p] += u * v[p];
                t2_[p] += u * u * v[p];
            }
        }

        double total = 0.0;
        for (Index k = 0;; ++k) {
            double norm = 0.0;
            Index p = 0;
            for (Index a = 0; a < dim_; ++a) {
                for (Index b = a; b < dim_; ++b, ++p) {
                    const auto q = static_cast<std::size_t>(p);
                    norm += (a == b ? 1.0 : 2.0) * std::norm(a_ * t0_[q] - b_ * t2_[q]);
                }
            }
            total += multiplicity_[static_cast<std::size_t>(k)] * norm;
            if (k == half_) break;
            // Shift offsets by one, then swap the entry leaving the window for the one entering.
            exchange(static_cast<std::size_t>(k), static_cast<double>(-m_hi_ - 1),
                     static_cast<std::size_t>(k + 1 - m_lo_ + m_hi_), static_cast<double>(-m_lo_));
        }
        return total / static_cast<double>(n_);
    }

    const Eigen::Ref<const Eigen::MatrixXd>& x_;
    Index n_;
    Index dim_;
    Index half_;
    Index packed_;
    double scale_;
    std::vector<cd> roots_;
    Index m_lo_ = 0;
    Index m_hi_ = 0;
    double a_ = 0.0;
    double b_ = 0.0;
    std::vector<Index> ext_source_;
    std::vector<char> ext_conjugate_;
    std::vector<double> multiplicity_;
    std::vector<cd> left_, right_, diff_, ext_, t0_, t1_, t2_;
};

// Candidate blocks are fixed-size so the floating-point path does not depend on the worker count.
constexpr Index kProfileBlock = 128;

}  // namespace

double SpectralConfig::bandwidth_for(Index window) const {
    const double h = bandwidth ? *bandwidth : bandwidth_constant * std::pow(static_cast<double>(window), -0.2);
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("spectral bandwidth must be positive");
    return h;
}

const Eigen::MatrixXcd& SpectralEstimate::at(int j) const {
    const int lowest = indices.front();
    if (j < lowest || j > indices.back()) throw WindowError("Fourier index out of range");
    return matrices[static_cast<std::size_t>(j - lowest)];
}

Index default_window(Index length) { return std::clamp<Index>(length / 6, 32, 256); }

std::vector<int> fourier_indices(Index window) {
    std::vector<int> idx;
    for (Index j = -((window - 1) / 2); j <= window / 2; ++j) idx.push_back(static_cast<int>(j));
    return idx;
}

Eigen::VectorXcd dft_window(const MultivariateSeries& r, Index lo, Index hi, double omega) {
    check_window(r, lo, hi);
    const Index n = hi - lo + 1;
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(r.dimension());
    for (Index s = lo; s <= hi; ++s) {
        acc += r.values().row(s - 1).transpose().cast<cd>() * std::polar(1.0, -static_cast<double>(s) * omega);
    }
    return acc / std::sqrt(two_pi * static_cast<double>(n));
}

SpectralEstimate periodogram(const MultivariateSeries& r, Index lo, Index hi) {
    check_window(r, lo, hi);
    const Index n = hi - lo + 1;
    SpectralEstimate est;
    est.window_length = n;
    est.indices = fourier_indices(n);
    for (int j : est.indices) {
        const double omega = two_pi * j / static_cast<double>(n);
        const Eigen::VectorXcd dft = dft_window(r, lo, hi, omega);
        est.frequencies.push_back(omega);
        est.matrices.push_back(dft * dft.adjoint());
    }
    return est;
}

SpectralEstimate smoothed_spectral_density(const MultivariateSeries& r, Index lo, Index hi,
                                           const SpectralConfig& cfg) {
    SpectralEstimate raw = periodogram(r, lo, hi);
    const Index n = raw.window_length;
    const double h = cfg.bandwidth_for(n);
    const auto weights = kernel_weights(n, cfg);
    SpectralEstimate est = raw;
    est.bandwidth = h;
    const Index lowest = raw.indices.front();
    for (std::size_t k = 0; k < raw.indices.size(); ++k) {
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(r.dimension(), r.dimension());
        for (const auto& [m, w] : weights) {
            // Fourier index omega_k - (2 pi m / N), wrapped back into the grid.
            Index j = raw.indices[k] - m;
            j = ((j - lowest) % n + n) % n + lowest;
            acc += w * raw.at(static_cast<int>(j));
        }
        est.matrices[k] = acc;
    }
    return est;
}

double deviation_stat(const MultivariateSeries& r, Index tau, Index window, const SpectralConfig& cfg) {
    if (window < 2) throw WindowError("deviation window must be at least 2");
    if (tau < window || tau > r.length() - window) {
        throw WindowError("tau = " + std::to_string(tau) + " outside [" + std::to_string(window) + ", " +
                          std::to_string(r.length() - window) + "]");
    }
    const auto left = smoothed_spectral_density(r, tau - window + 1, tau, cfg);
    const auto right = smoothed_spectral_density(r, tau + 1, tau + window, cfg);
    double sum = 0.0;
    for (std::size_t k = 0; k < left.matrices.size(); ++k) {
        sum += (left.matrices[k] - right.matrices[k]).squaredNorm();
    }
    return (two_pi / static_cast<double>(window)) * sum / two_pi;
}

namespace detail {

Eigen::VectorXd profile_values(const Eigen::Ref<const Eigen::MatrixXd>& x, Index window,
                               const SpectralConfig& cfg, bool concurrent) {
    const Index length = x.rows();
    if (window < 2) throw WindowError("deviation window must be at least 2");
    if (length < 2 * window + 1) {
        throw WindowError("series of length " + std::to_string(length) + " is too short for window " +
                          std::to_string(window) + " (needs 2N + 1)");
    }
    cfg.bandwidth_for(window);
    const Index count = length - 2 * window + 1;
    Eigen::VectorXd out(count);
    const Index blocks = (count + kProfileBlock - 1) / kProfileBlock;
    auto run_block = [&](std::size_t b) {
        ProfileEngine engine(x, window, cfg);
        const Index first = window + static_cast<Index>(b) * kProfileBlock;
        const Index last = std::min(first + kProfileBlock - 1, length - window);
        engine.evaluate(first, last, out.data() + (first - window));
    };
    if (concurrent) {
        parallel_for(static_cast<std::size_t>(blocks), run_block);
    } else {
        for (Index b = 0; b < blocks; ++b) run_block(static_cast<std::size_t>(b));
    }
    return out.cwiseMax(0.0);
}

}  // namespace detail

DeviationProfile deviation_profile(const MultivariateSeries& r, Index window, const SpectralConfig& cfg) {
    DeviationProfile profile;
    profile.window = window;
    profile.d_hat = detail::profile_values(r.values(), window, cfg, true);
    for (Index tau = window; tau <= r.length() - window; ++tau) profile.tau_values.push_back(tau);
    return profile;
}

}  // namespace nonstat
