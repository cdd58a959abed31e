#include "dyslex/svm.hpp"

#include <algorithm>
#include <cmath>

#include "dyslex/kernels.hpp"
#include "json.hpp"

namespace dyslex::classify {

double LinearSvmModel::decision(const double* row, std::size_t n_features) const {
    require(n_features == weights.size(), "svm: feature count mismatch");
    return kernels::dot(weights.data(), row, n_features) + bias;
}

int LinearSvmModel::predict(const double* row, std::size_t n_features) const {
    return decision(row, n_features) >= 0.0 ? +1 : -1;
}

std::vector<int> LinearSvmModel::predict(const Matrix& x) const {
    std::vector<int> out(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) out[i] = predict(x.row(i), x.cols);
    return out;
}

std::string LinearSvmModel::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = "svm";
    j["weights"] = weights;
    j["bias"] = bias;
    j["c_param"] = c_param;
    return j.dump(2);
}

LinearSvmModel svm_train(const Matrix& x, const std::vector<int>& labels, const SvmOptions& opts) {
    const std::size_t n = x.rows, p = x.cols;
    require(n > 0 && p > 0, "svm: empty training data");
    require(labels.size() == n, "svm: label count mismatch");
    require(opts.c_param > 0.0, "svm: C must be positive");
    for (int l : labels) require(l == +1 || l == -1, "svm: labels must be +1 or -1");
    for (std::size_t i = 0; i < n * p; ++i)
        require(std::isfinite(x.data[i]), "svm: non-finite feature value");

    const double dn = static_cast<double>(n);
    const double box = opts.c_param / dn;  // per-sample upper bound from the averaged hinge

    // v holds [w; b] against rows augmented with a constant 1
    std::vector<double> v(p + 1, 0.0);
    std::vector<double> alpha(n, 0.0);
    std::vector<double> qii(n);
    for (std::size_t i = 0; i < n; ++i)
        qii[i] = kernels::sumsq(x.row(i), p) + 1.0;

    auto dual_value = [&] {
        double s = 0.0;
        for (double a : alpha) s += a;
        return s - 0.5 * kernels::sumsq(v.data(), p + 1);
    };
    auto primal_value = [&] {
        double hinge = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double margin =
                static_cast<double>(labels[i]) * (kernels::dot(v.data(), x.row(i), p) + v[p]);
            hinge += std::max(0.0, 1.0 - margin);
        }
        return 0.5 * kernels::sumsq(v.data(), p + 1) + box * hinge;
    };

    LinearSvmModel model;
    model.c_param = opts.c_param;
    for (std::size_t epoch = 0; epoch < opts.max_epochs; ++epoch) {
        for (std::size_t i = 0; i < n; ++i) {
            const double yi = static_cast<double>(labels[i]);
            const double grad = yi * (kernels::dot(v.data(), x.row(i), p) + v[p]) - 1.0;
            const double a_new = std::clamp(alpha[i] - grad / qii[i], 0.0, box);
            const double step = a_new - alpha[i];
            if (step != 0.0) {
                kernels::axpy(step * yi, x.row(i), v.data(), p);
                v[p] += step * yi;
                alpha[i] = a_new;
            }
        }
        model.dual_objective_trace.push_back(dual_value());
        ++model.epochs;
        model.duality_gap = primal_value() - model.dual_objective_trace.back();
        if (model.duality_gap <= opts.gap_tol) break;
    }

    model.weights.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(p));
    model.bias = v[p];
    return model;
}

}  // namespace dyslex::classify
