#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dyslex/matrix.hpp"

namespace dyslex::classify {

struct SvmOptions {
    double c_param = 1.0;
    double gap_tol = 1e-6;       // stop when primal - dual <= gap_tol
    std::size_t max_epochs = 100000;
};

// linear SVM trained in the dual by cyclic coordinate descent.
// the bias is carried as an extra always-one feature, so it is L2-regularized
// together with the weights; the hinge term is averaged over samples, which
// makes the solution invariant to duplicating the whole training set.
struct LinearSvmModel {
    std::vector<double> weights;
    double bias = 0.0;
    double c_param = 1.0;
    std::vector<double> dual_objective_trace;  // one entry per epoch, non-decreasing
    double duality_gap = 0.0;
    std::size_t epochs = 0;

    // labels are +1 / -1; a decision value of exactly 0 predicts +1
    double decision(const double* row, std::size_t n_features) const;
    int predict(const double* row, std::size_t n_features) const;
    std::vector<int> predict(const Matrix& x) const;

    std::string to_json() const;
};

LinearSvmModel svm_train(const Matrix& x, const std::vector<int>& labels, const SvmOptions& opts = {});

}  // namespace dyslex::classify
