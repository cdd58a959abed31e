#include "dyslex/impute.hpp"

#include <algorithm>

namespace dyslex::pipeline {

double median_of(std::vector<double> values) {
    require(!values.empty(), "median: no values");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

void MedianImputer::fit(const Matrix& train) {
    require(!train.empty(), "imputer: empty training matrix");
    medians_.assign(train.cols, 0.0);
    std::vector<double> observed;
    for (std::size_t j = 0; j < train.cols; ++j) {
        observed.clear();
        for (std::size_t i = 0; i < train.rows; ++i)
            if (!is_missing(train(i, j))) observed.push_back(train(i, j));
        require(!observed.empty(), "imputer: a feature is missing in every training row");
        medians_[j] = median_of(observed);
    }
}

Matrix MedianImputer::transform(const Matrix& x) const {
    require(x.cols == medians_.size(), "imputer: feature count mismatch");
    Matrix out = x;
    for (std::size_t i = 0; i < out.rows; ++i) transform_row(out.row(i), out.cols);
    return out;
}

void MedianImputer::transform_row(double* row, std::size_t n_features) const {
    require(n_features == medians_.size(), "imputer: feature count mismatch");
    for (std::size_t j = 0; j < n_features; ++j)
        if (is_missing(row[j])) row[j] = medians_[j];
}

}  // namespace dyslex::pipeline
