#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace dyslex {

// Row-major dense matrix. Rows are subjects, columns features, so classifier
// inner loops get contiguous per-sample vectors.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }

    std::vector<double> column(std::size_t c) const {
        std::vector<double> out(rows);
        for (std::size_t r = 0; r < rows; ++r) out[r] = data[r * cols + c];
        return out;
    }

    bool empty() const { return rows == 0 || cols == 0; }
};

// Missing cells are stored as quiet NaN until imputation fills them.
inline bool is_missing(double v) { return std::isnan(v); }
inline double missing_value() { return std::nan(""); }

inline void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace dyslex
