#pragma once

#include <vector>

#include "dyslex/matrix.hpp"

namespace dyslex::pipeline {

// Per-feature median imputation. Medians come from the training rows only;
// an even count of observed values averages the two middle ones. A feature
// with no observed training value at all is an error.
class MedianImputer {
  public:
    void fit(const Matrix& train);
    Matrix transform(const Matrix& x) const;
    void transform_row(double* row, std::size_t n_features) const;
    const std::vector<double>& medians() const { return medians_; }

  private:
    std::vector<double> medians_;
};

double median_of(std::vector<double> values);

}  // namespace dyslex::pipeline
