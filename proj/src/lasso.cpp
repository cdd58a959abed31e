#include "dyslex/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dyslex/kernels.hpp"
#include "dyslex/rng.hpp"
#include "json.hpp"

namespace dyslex::selection {

namespace {

double soft_threshold(double z, double lambda) {
    // relative cushion so exactly collinear columns, whose correlation parks
    // at the threshold once a twin holds the weight, cannot leak into the
    // support through rounding
    const double guard = lambda * 1e-12;
    if (z > lambda + guard) return z - lambda;
    if (z < -lambda - guard) return z + lambda;
    return 0.0;
}

// column-contiguous view of the design plus the coordinate-descent state
struct CdProblem {
    std::size_t n = 0, p = 0;
    std::vector<std::vector<double>> cols;
    std::vector<double> col_msq;  // x_j^T x_j / n
    std::vector<double> residual;
    std::vector<double> beta;
    std::vector<std::size_t> order;  // coordinate visit order within a sweep
    double intercept = 0.0;

    CdProblem(const Matrix& x, const std::vector<double>& y) : n(x.rows), p(x.cols) {
        require(n > 0 && p > 0, "lasso: empty design");
        require(y.size() == n, "lasso: dimension mismatch between X and y");
        for (double v : y) require(std::isfinite(v), "lasso: non-finite y");
        cols.resize(p);
        col_msq.resize(p);
        for (std::size_t j = 0; j < p; ++j) {
            auto& c = cols[j];
            c.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                c[i] = x(i, j);
                require(std::isfinite(c[i]), "lasso: non-finite X entry");
            }
            col_msq[j] = kernels::sumsq(c.data(), n) / static_cast<double>(n);
        }
        residual = y;
        beta.assign(p, 0.0);
        build_order();
    }

    // Cyclic order: ascending, except that columns proportional to an earlier
    // one follow it immediately. The solution is non-unique across such a
    // group; visiting the group back to back parks every later member exactly
    // at the threshold, so the earliest column holds the group's weight and
    // the support stays deterministic.
    void build_order() {
        order.reserve(p);
        std::vector<char> placed(p, 0);
        const double dn = static_cast<double>(n);
        for (std::size_t j = 0; j < p; ++j) {
            if (placed[j]) continue;
            placed[j] = 1;
            order.push_back(j);
            if (col_msq[j] == 0.0) continue;
            for (std::size_t k = j + 1; k < p; ++k) {
                if (placed[k] || col_msq[k] == 0.0) continue;
                const double dot = kernels::dot(cols[j].data(), cols[k].data(), n) / dn;
                if (std::abs(dot) >= (1.0 - 1e-10) * std::sqrt(col_msq[j] * col_msq[k])) {
                    placed[k] = 1;
                    order.push_back(k);
                }
            }
        }
    }

    double objective(double lambda) const {
        double l1 = 0.0;
        for (double b : beta) l1 += std::abs(b);
        return kernels::sumsq(residual.data(), n) / (2.0 * static_cast<double>(n)) + lambda * l1;
    }

    // one full sweep; returns the largest coordinate change
    double sweep(double lambda) {
        const double dn = static_cast<double>(n);
        double max_delta = 0.0;

        const double d0 = kernels::sum(residual.data(), n) / dn;
        if (d0 != 0.0) {
            intercept += d0;
            for (std::size_t i = 0; i < n; ++i) residual[i] -= d0;
        }
        max_delta = std::abs(d0);

        for (const std::size_t j : order) {
            if (col_msq[j] == 0.0) continue;
            const double z = kernels::dot(cols[j].data(), residual.data(), n) / dn + col_msq[j] * beta[j];
            const double bj = soft_threshold(z, lambda) / col_msq[j];
            const double delta = bj - beta[j];
            if (delta != 0.0) {
                kernels::axpy(-delta, cols[j].data(), residual.data(), n);
                beta[j] = bj;
            }
            max_delta = std::max(max_delta, std::abs(delta));
        }
        return max_delta;
    }

    LassoFit solve(double lambda, const LassoOptions& opts) {
        require(lambda >= 0.0 && std::isfinite(lambda), "lasso: lambda must be finite and >= 0");
        LassoFit fit;
        fit.lambda = lambda;
        for (std::size_t s = 0; s < opts.max_sweeps; ++s) {
            const double max_delta = sweep(lambda);
            fit.objective_trace.push_back(objective(lambda));
            ++fit.sweeps;
            if (max_delta < opts.tol) break;
        }
        fit.intercept = intercept;
        fit.coefficients = beta;
        fit.objective_value = objective(lambda);
        return fit;
    }
};

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<double>& y, std::size_t n_folds,
                                                       std::uint64_t fold_seed) {
    // one stratum per distinct label value when y is binary, else a single one
    std::vector<double> distinct(y.begin(), y.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::vector<std::vector<std::size_t>> strata;
    if (distinct.size() <= 2) {
        strata.resize(distinct.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            const std::size_t s = std::lower_bound(distinct.begin(), distinct.end(), y[i]) - distinct.begin();
            strata[s].push_back(i);
        }
    } else {
        strata.emplace_back(y.size());
        std::iota(strata[0].begin(), strata[0].end(), 0);
    }

    std::vector<std::vector<std::size_t>> folds(n_folds);
    rng::Stream rs(rng::derive_seed(fold_seed, {17}));
    for (auto& stratum : strata) {
        rs.shuffle(stratum);
        const std::size_t m = stratum.size();
        const std::size_t base = m / n_folds, extra = m % n_folds;
        std::size_t pos = 0;
        for (std::size_t f = 0; f < n_folds; ++f) {
            const std::size_t take = base + (f < extra ? 1 : 0);
            for (std::size_t k = 0; k < take; ++k) folds[f].push_back(stratum[pos++]);
        }
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

}  // namespace

std::set<std::size_t> LassoFit::support() const {
    std::set<std::size_t> s;
    for (std::size_t j = 0; j < coefficients.size(); ++j)
        if (coefficients[j] != 0.0) s.insert(j);
    return s;
}

LassoFit lasso_fit(const Matrix& x, const std::vector<double>& y, double lambda, const LassoOptions& opts) {
    CdProblem problem(x, y);
    return problem.solve(lambda, opts);
}

double lasso_lambda_max(const Matrix& x, const std::vector<double>& y) {
    require(x.rows == y.size() && x.rows > 0, "lambda_max: dimension mismatch");
    const double dn = static_cast<double>(x.rows);
    const double ybar = kernels::sum(y.data(), y.size()) / dn;
    double best = 0.0;
    for (std::size_t j = 0; j < x.cols; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < x.rows; ++i) acc += x(i, j) * (y[i] - ybar);
        best = std::max(best, std::abs(acc) / dn);
    }
    return best;
}

std::vector<double> make_lambda_grid(const Matrix& x, const std::vector<double>& y, std::size_t n_points,
                                     double ratio) {
    require(n_points >= 2 && ratio > 0.0 && ratio < 1.0, "lambda grid: bad shape parameters");
    const double lmax = lasso_lambda_max(x, y);
    require(lmax > 0.0, "lambda grid: X^T y is identically zero");
    std::vector<double> grid(n_points);
    const double log_max = std::log(lmax);
    const double log_min = std::log(lmax * ratio);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n_points - 1);
        grid[i] = std::exp(log_max + t * (log_min - log_max));
    }
    grid[0] = lmax;
    return grid;
}

LassoCvResult cv_lasso(const Matrix& x, const std::vector<double>& y, std::size_t n_folds,
                       const std::vector<double>& lambda_grid, std::uint64_t fold_seed,
                       const LassoOptions& opts) {
    require(n_folds >= 2, "cv_lasso: need at least 2 folds");
    require(x.rows >= n_folds, "cv_lasso: fewer samples than folds");
    require(!lambda_grid.empty(), "cv_lasso: empty lambda grid");
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        require(lambda_grid[i] > 0.0, "cv_lasso: grid entries must be positive");
        if (i > 0) require(lambda_grid[i] < lambda_grid[i - 1], "cv_lasso: grid must be strictly descending");
    }

    const std::size_t n_lambda = lambda_grid.size();
    const auto folds = stratified_folds(y, n_folds, fold_seed);

    // fold_mse[f][l]
    std::vector<std::vector<double>> fold_mse(n_folds, std::vector<double>(n_lambda, 0.0));
    for (std::size_t f = 0; f < n_folds; ++f) {
        const auto& test_idx = folds[f];
        require(!test_idx.empty(), "cv_lasso: empty fold (too few samples)");
        std::vector<char> in_test(x.rows, 0);
        for (std::size_t i : test_idx) in_test[i] = 1;

        Matrix xtr(x.rows - test_idx.size(), x.cols);
        std::vector<double> ytr;
        ytr.reserve(xtr.rows);
        std::size_t r = 0;
        for (std::size_t i = 0; i < x.rows; ++i) {
            if (in_test[i]) continue;
            for (std::size_t j = 0; j < x.cols; ++j) xtr(r, j) = x(i, j);
            ytr.push_back(y[i]);
            ++r;
        }

        CdProblem problem(xtr, ytr);
        for (std::size_t l = 0; l < n_lambda; ++l) {
            // warm start: state persists across the descending grid
            for (std::size_t s = 0; s < opts.max_sweeps; ++s) {
                if (problem.sweep(lambda_grid[l]) < opts.tol) break;
            }
            double mse = 0.0;
            for (std::size_t i : test_idx) {
                const double pred =
                    problem.intercept + kernels::dot(x.row(i), problem.beta.data(), x.cols);
                const double err = y[i] - pred;
                mse += err * err;
            }
            fold_mse[f][l] = mse / static_cast<double>(test_idx.size());
        }
    }

    LassoCvResult result;
    result.lambda_grid = lambda_grid;
    result.fold_seed = fold_seed;
    result.mean_cv_mse.resize(n_lambda);
    result.se_cv_mse.resize(n_lambda);
    const double dk = static_cast<double>(n_folds);
    for (std::size_t l = 0; l < n_lambda; ++l) {
        double m = 0.0;
        for (std::size_t f = 0; f < n_folds; ++f) m += fold_mse[f][l];
        m /= dk;
        double var = 0.0;
        for (std::size_t f = 0; f < n_folds; ++f) var += (fold_mse[f][l] - m) * (fold_mse[f][l] - m);
        var /= (dk - 1.0);
        result.mean_cv_mse[l] = m;
        result.se_cv_mse[l] = std::sqrt(var / dk);
    }

    std::size_t min_idx = 0;
    for (std::size_t l = 1; l < n_lambda; ++l)
        if (result.mean_cv_mse[l] < result.mean_cv_mse[min_idx]) min_idx = l;
    const double threshold = result.mean_cv_mse[min_idx] + result.se_cv_mse[min_idx];
    std::size_t one_se_idx = min_idx;
    for (std::size_t l = 0; l < n_lambda; ++l) {
        if (result.mean_cv_mse[l] <= threshold) {
            one_se_idx = l;  // grid is descending, first hit is the largest lambda
            break;
        }
    }
    result.lambda_min_mse = lambda_grid[min_idx];
    result.lambda_1se = lambda_grid[one_se_idx];

    result.selected_features_min = lasso_fit(x, y, result.lambda_min_mse, opts).support();
    result.selected_features_1se = lasso_fit(x, y, result.lambda_1se, opts).support();
    return result;
}

std::set<std::size_t> select_dominant(const LassoCvResult& result, SelectionRule rule) {
    return rule == SelectionRule::min_mse ? result.selected_features_min : result.selected_features_1se;
}

std::string LassoCvResult::to_json(const std::vector<std::string>& feature_names) const {
    nlohmann::ordered_json j;
    j["lambda_grid"] = lambda_grid;
    j["mean_cv_mse"] = mean_cv_mse;
    j["se_cv_mse"] = se_cv_mse;
    j["lambda_min_mse"] = lambda_min_mse;
    j["lambda_1se"] = lambda_1se;
    j["fold_seed"] = fold_seed;
    auto names_of = [&](const std::set<std::size_t>& idx) {
        std::vector<std::string> names;
        for (std::size_t i : idx)
            names.push_back(i < feature_names.size() ? feature_names[i] : std::to_string(i));
        return names;
    };
    j["selected_features_min_mse"] = names_of(selected_features_min);
    j["selected_features_1se"] = names_of(selected_features_1se);
    return j.dump(2);
}

}  // namespace dyslex::selection
