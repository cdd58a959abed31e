#pragma once

#include <vector>

#include "dyslex/matrix.hpp"

namespace dyslex::selection {

// Column z-scoring learned from a training matrix. Sample sd (divisor n-1);
// a constant column stores sd 1 so it transforms to zeros.
class Standardizer {
public:
    Standardizer() = default;

    static Standardizer fit(const Matrix& x);  // throws on empty or n < 2

    Matrix transform(const Matrix& x) const;
    void transform_row(double* row, std::size_t n) const;

    const std::vector<double>& means() const { return means_; }
    const std::vector<double>& sds() const { return sds_; }

private:
    std::vector<double> means_;
    std::vector<double> sds_;
};

}  // namespace dyslex::selection
