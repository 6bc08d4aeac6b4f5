#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace nonstat {

using Index = Eigen::Index;

/// T x L real-valued series. Rows are time, columns are components.
///
/// Every entry is finite and there is at least one row and one column; the
/// constructor enforces both. Instances are immutable once built.
class MultivariateSeries {
public:
    explicit MultivariateSeries(Eigen::MatrixXd values, std::vector<std::string> names = {},
                                long start_index = 1);

    const Eigen::MatrixXd& values() const noexcept { return values_; }
    const std::vector<std::string>& names() const noexcept { return names_; }
    long start_index() const noexcept { return start_index_; }

    Index length() const noexcept { return values_.rows(); }
    Index dimension() const noexcept { return values_.cols(); }

    /// Same names and origin, new values of identical shape.
    MultivariateSeries with_values(Eigen::MatrixXd values) const;

    static std::vector<std::string> default_names(Index count);

private:
    Eigen::MatrixXd values_;
    std::vector<std::string> names_;
    long start_index_;
};

/// L x L Pearson correlation matrix: symmetric, unit diagonal, entries in [-1, 1].
class CorrelationMatrix {
public:
    explicit CorrelationMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {}
    const Eigen::MatrixXd& entries() const noexcept { return entries_; }
    double operator()(Index i, Index j) const { return entries_(i, j); }

private:
    Eigen::MatrixXd entries_;
};

/// Sample covariance (divisor n - 1) of the columns of `x`.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
sample_covariance(const Eigen::MatrixBase<Derived>& x) {
    using Scalar = typename Derived::Scalar;
    const auto centered = (x.rowwise() - x.colwise().mean()).eval();
    return (centered.transpose() * centered) / static_cast<Scalar>(x.rows() - 1);
}

/// Pearson correlation between two equally long vectors.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar pearson(const Eigen::MatrixBase<DerivedA>& a,
                                  const Eigen::MatrixBase<DerivedB>& b) {
    const auto ca = (a.array() - a.mean()).matrix().eval();
    const auto cb = (b.array() - b.mean()).matrix().eval();
    return ca.dot(cb) / std::sqrt(ca.squaredNorm() * cb.squaredNorm());
}

/// Lag-k sample autocorrelation of a vector (biased autocovariance estimator).
template <typename Derived>
typename Derived::Scalar autocorrelation(const Eigen::MatrixBase<Derived>& x, Index lag) {
    const auto c = (x.array() - x.mean()).eval();
    const Index n = c.size();
    const auto denom = c.square().sum();
    return (c.head(n - lag) * c.tail(n - lag)).sum() / denom;
}

/// Errors: DegenerateComponent if any column has zero variance, InsufficientData if T < 3.
CorrelationMatrix correlation_matrix(const MultivariateSeries& s);

}  // namespace nonstat
