#include "dyslex/naive_bayes.hpp"

#include <cmath>
#include <numbers>

#include "json.hpp"

namespace dyslex::classify {

double GaussianNbModel::log_posterior(int class_index, const double* row, std::size_t n_features) const {
    require(class_index == 0 || class_index == 1, "gnb: bad class index");
    require(n_features == mean[class_index].size(), "gnb: feature count mismatch");
    double lp = std::log(prior[class_index]);
    for (std::size_t j = 0; j < n_features; ++j) {
        const double var = variance[class_index][j];
        const double d = row[j] - mean[class_index][j];
        lp += -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
    }
    return lp;
}

int GaussianNbModel::predict(const double* row, std::size_t n_features) const {
    const double lp0 = log_posterior(0, row, n_features);
    const double lp1 = log_posterior(1, row, n_features);
    if (lp1 > lp0) return +1;
    if (lp0 > lp1) return -1;
    if (prior[1] > prior[0]) return +1;
    return -1;
}

std::vector<int> GaussianNbModel::predict(const Matrix& x) const {
    std::vector<int> out(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) out[i] = predict(x.row(i), x.cols);
    return out;
}

std::string GaussianNbModel::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = "gnb";
    j["mean_control"] = mean[0];
    j["mean_dyslexic"] = mean[1];
    j["variance_control"] = variance[0];
    j["variance_dyslexic"] = variance[1];
    j["prior_control"] = prior[0];
    j["prior_dyslexic"] = prior[1];
    return j.dump(2);
}

GaussianNbModel gnb_train(const Matrix& x, const std::vector<int>& labels) {
    const std::size_t n = x.rows, p = x.cols;
    require(n > 0 && p > 0, "gnb: empty training data");
    require(labels.size() == n, "gnb: label count mismatch");

    std::size_t count[2] = {0, 0};
    for (int l : labels) {
        require(l == +1 || l == -1, "gnb: labels must be +1 or -1");
        ++count[l == +1 ? 1 : 0];
    }
    require(count[0] > 0 && count[1] > 0, "gnb: both classes required in training data");

    GaussianNbModel model;
    for (int c = 0; c < 2; ++c) {
        model.mean[c].assign(p, 0.0);
        model.variance[c].assign(p, 0.0);
        model.prior[c] = static_cast<double>(count[c]) / static_cast<double>(n);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const int c = labels[i] == +1 ? 1 : 0;
        for (std::size_t j = 0; j < p; ++j) {
            require(std::isfinite(x(i, j)), "gnb: non-finite feature value");
            model.mean[c][j] += x(i, j);
        }
    }
    for (int c = 0; c < 2; ++c)
        for (std::size_t j = 0; j < p; ++j) model.mean[c][j] /= static_cast<double>(count[c]);
    for (std::size_t i = 0; i < n; ++i) {
        const int c = labels[i] == +1 ? 1 : 0;
        for (std::size_t j = 0; j < p; ++j) {
            const double d = x(i, j) - model.mean[c][j];
            model.variance[c][j] += d * d;
        }
    }
    for (int c = 0; c < 2; ++c)
        for (std::size_t j = 0; j < p; ++j) {
            model.variance[c][j] /= static_cast<double>(count[c]);
            model.variance[c][j] = std::max(model.variance[c][j], GaussianNbModel::kVarFloor);
        }
    return model;
}

}  // namespace dyslex::classify
