#pragma once

#include "nonstat/random.hpp"
#include "nonstat/series.hpp"

#include <cstdint>

namespace nonstat {

/// Which bootstrap the automatic block length is tuned for. The two differ
/// only in the variance constant of the selector.
enum class BlockScheme { MovingBlock, Stationary };

/// Automatic optimal block length of one univariate series (flat-top lag
/// window rule with the corrected constants). Not rounded or clamped beyond
/// [1, max(1, ceil(min(3 sqrt(n), n/3)))].
double univariate_block_length(const Eigen::Ref<const Eigen::VectorXd>& x, BlockScheme scheme);

/// Average of the per-component block lengths, rounded half up and clamped to
/// [1, n/3]. Errors: InsufficientData for fewer than 20 rows.
Index block_length(const Eigen::Ref<const Eigen::MatrixXd>& segment,
                   BlockScheme scheme = BlockScheme::MovingBlock);

/// Moving-block resampler over the rows of one segment.
class BootstrapSampler {
public:
    /// Errors: ConfigError unless 1 <= block_length <= rows.
    BootstrapSampler(Eigen::MatrixXd source, Index block_length);

    const Eigen::MatrixXd& source() const noexcept { return source_; }
    Index block_length() const noexcept { return block_length_; }

private:
    Eigen::MatrixXd source_;
    Index block_length_;
};

/// Concatenates whole-row blocks of `block_length` consecutive rows with
/// uniform start positions, truncated to `length` rows.
Eigen::MatrixXd block_bootstrap(const BootstrapSampler& sampler, Index length, std::uint64_t seed);

/// Stationary bootstrap (geometric block lengths with the given mean,
/// circular wrap) of `length` rows.
Eigen::MatrixXd stationary_bootstrap(const Eigen::Ref<const Eigen::MatrixXd>& source, double mean_block,
                                     Index length, Rng& rng);

}  // namespace nonstat
