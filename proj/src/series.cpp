#include "nonstat/series.hpp"

#include "nonstat/error.hpp"

#include <algorithm>
#include <cmath>

namespace nonstat {

MultivariateSeries::MultivariateSeries(Eigen::MatrixXd values, std::vector<std::string> names,
                                       long start_index)
    : values_(std::move(values)), names_(std::move(names)), start_index_(start_index) {
    if (values_.rows() < 1 || values_.cols() < 1) {
        throw EmptyInput("series needs at least one row and one column");
    }
    if (!values_.allFinite()) {
        throw DomainError("series contains a non-finite value");
    }
    if (names_.empty()) {
        names_ = default_names(values_.cols());
    } else if (static_cast<Index>(names_.size()) != values_.cols()) {
        throw ConfigError("expected " + std::to_string(values_.cols()) + " component names, got " +
                          std::to_string(names_.size()));
    }
}

MultivariateSeries MultivariateSeries::with_values(Eigen::MatrixXd values) const {
    if (values.rows() != values_.rows() || values.cols() != values_.cols()) {
        throw ConfigError("replacement values must keep the series shape");
    }
    return MultivariateSeries(std::move(values), names_, start_index_);
}

std::vector<std::string> MultivariateSeries::default_names(Index count) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(count));
    for (Index i = 0; i < count; ++i) names.push_back("series" + std::to_string(i + 1));
    return names;
}

CorrelationMatrix correlation_matrix(const MultivariateSeries& s) {
    const auto& x = s.values();
    if (x.rows() < 3) throw InsufficientData("correlation needs at least 3 observations");
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    const Index dim = x.cols();
    Eigen::VectorXd ss(dim);
    for (Index j = 0; j < dim; ++j) {
        ss(j) = centered.col(j).squaredNorm();
        if (!(ss(j) > 0.0)) {
            throw DegenerateComponent("component '" + s.names()[static_cast<std::size_t>(j)] +
                                      "' has zero variance");
        }
    }
    // Column-pair dot products, so identical columns give exactly 1.
    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(dim, dim);
    for (Index i = 0; i < dim; ++i) {
        for (Index j = i + 1; j < dim; ++j) {
            const double r = centered.col(i).dot(centered.col(j)) / std::sqrt(ss(i) * ss(j));
            corr(i, j) = corr(j, i) = std::clamp(r, -1.0, 1.0);
        }
    }
    return CorrelationMatrix(std::move(corr));
}

}  // namespace nonstat
