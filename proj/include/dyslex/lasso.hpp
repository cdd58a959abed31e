#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "dyslex/matrix.hpp"

namespace dyslex::selection {

// L1-penalized least squares:
//   (1/(2n)) * ||y - b0 - X beta||^2 + lambda * ||beta||_1
// solved by cyclic coordinate descent with soft-thresholding. The intercept
// is an unpenalized coordinate. Converged when the largest coordinate change
// in a sweep drops below tol, capped at max_sweeps.
struct LassoOptions {
    double tol = 1e-7;
    std::size_t max_sweeps = 10000;
};

struct LassoFit {
    double lambda = 0.0;
    double intercept = 0.0;
    std::vector<double> coefficients;
    double objective_value = 0.0;
    std::vector<double> objective_trace;  // objective after each sweep
    std::size_t sweeps = 0;

    std::set<std::size_t> support() const;
};

LassoFit lasso_fit(const Matrix& x, const std::vector<double>& y, double lambda,
                   const LassoOptions& opts = {});

// max_j |x_j^T (y - mean(y))| / n; the smallest penalty with an all-zero fit
double lasso_lambda_max(const Matrix& x, const std::vector<double>& y);

// log-spaced descending grid from lambda_max down to ratio * lambda_max
std::vector<double> make_lambda_grid(const Matrix& x, const std::vector<double>& y,
                                     std::size_t n_points = 100, double ratio = 1e-3);

struct LassoCvResult {
    std::vector<double> lambda_grid;  // descending
    std::vector<double> mean_cv_mse;
    std::vector<double> se_cv_mse;
    double lambda_min_mse = 0.0;
    double lambda_1se = 0.0;
    std::set<std::size_t> selected_features_min;
    std::set<std::size_t> selected_features_1se;
    std::uint64_t fold_seed = 0;

    std::string to_json(const std::vector<std::string>& feature_names) const;
};

// K-fold CV over a descending lambda grid. Folds are label-stratified:
// within each class the row indices are shuffled with fold_seed and dealt
// into contiguous blocks. Selected features are the nonzero support of
// full-data refits at lambda_min_mse and lambda_1se.
LassoCvResult cv_lasso(const Matrix& x, const std::vector<double>& y, std::size_t n_folds,
                       const std::vector<double>& lambda_grid, std::uint64_t fold_seed,
                       const LassoOptions& opts = {});

enum class SelectionRule { min_mse, one_se };

std::set<std::size_t> select_dominant(const LassoCvResult& result, SelectionRule rule);

}  // namespace dyslex::selection
