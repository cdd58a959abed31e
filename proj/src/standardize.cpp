#include "dyslex/standardize.hpp"

#include <cmath>

namespace dyslex::selection {

Standardizer Standardizer::fit(const Matrix& x) {
    require(x.rows >= 2 && x.cols >= 1, "standardizer: need at least 2 rows");
    Standardizer s;
    s.means_.resize(x.cols);
    s.sds_.resize(x.cols);
    for (std::size_t j = 0; j < x.cols; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < x.rows; ++i) {
            const double v = x(i, j);
            require(std::isfinite(v), "standardizer: non-finite entry (impute first)");
            m += v;
        }
        m /= static_cast<double>(x.rows);
        double acc = 0.0;
        for (std::size_t i = 0; i < x.rows; ++i) {
            const double d = x(i, j) - m;
            acc += d * d;
        }
        double sd = std::sqrt(acc / static_cast<double>(x.rows - 1));
        if (sd == 0.0) sd = 1.0;
        s.means_[j] = m;
        s.sds_[j] = sd;
    }
    return s;
}

Matrix Standardizer::transform(const Matrix& x) const {
    require(x.cols == means_.size(), "standardizer: column count mismatch");
    Matrix out(x.rows, x.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < x.cols; ++j) out(i, j) = (x(i, j) - means_[j]) / sds_[j];
    return out;
}

void Standardizer::transform_row(double* row, std::size_t n) const {
    require(n == means_.size(), "standardizer: column count mismatch");
    for (std::size_t j = 0; j < n; ++j) row[j] = (row[j] - means_[j]) / sds_[j];
}

}  // namespace dyslex::selection
