#pragma once

#include <array>
#include <string>
#include <vector>

#include "dyslex/matrix.hpp"

namespace dyslex::classify {

// Gaussian naive Bayes for the two-class case: class index 0 is control (-1),
// class index 1 is dyslexic (+1). Variances are maximum-likelihood (divisor n)
// and floored to keep log-densities finite on constant features.
struct GaussianNbModel {
    static constexpr double kVarFloor = 1e-9;

    std::vector<double> mean[2];
    std::vector<double> variance[2];
    double prior[2] = {0.0, 0.0};

    // log prior + sum of per-feature Gaussian log densities
    double log_posterior(int class_index, const double* row, std::size_t n_features) const;
    // ties go to the larger prior, then to class index 0
    int predict(const double* row, std::size_t n_features) const;  // returns +1 / -1
    std::vector<int> predict(const Matrix& x) const;

    std::string to_json() const;
};

GaussianNbModel gnb_train(const Matrix& x, const std::vector<int>& labels);

}  // namespace dyslex::classify
