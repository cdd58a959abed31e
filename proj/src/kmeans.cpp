#include "dyslex/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dyslex/kernels.hpp"
#include "dyslex/rng.hpp"
#include "json.hpp"

namespace dyslex::classify {

namespace {

std::size_t nearest_centroid(const Matrix& centroids, const double* row, std::size_t p) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows; ++c) {
        const double d = kernels::squared_distance(centroids.row(c), row, p);
        if (d < best_d) {  // strict: ties keep the lower index
            best_d = d;
            best = c;
        }
    }
    return best;
}

}  // namespace

int CentroidModel::predict(const double* row, std::size_t n_features) const {
    require(n_features == centroids.cols, "kmeans: feature count mismatch");
    return cluster_labels[nearest_centroid(centroids, row, n_features)];
}

std::vector<int> CentroidModel::predict(const Matrix& x) const {
    std::vector<int> out(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) out[i] = predict(x.row(i), x.cols);
    return out;
}

std::string CentroidModel::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = "kmeans";
    j["k"] = k;
    std::vector<std::vector<double>> rows(k);
    for (std::size_t c = 0; c < k; ++c)
        rows[c].assign(centroids.row(c), centroids.row(c) + centroids.cols);
    j["centroids"] = rows;
    j["cluster_labels"] = cluster_labels;
    j["seed"] = seed;
    return j.dump(2);
}

CentroidModel kmeans_train(const Matrix& x, const std::vector<int>& labels, const KmeansOptions& opts) {
    const std::size_t n = x.rows, p = x.cols;
    require(n > 0 && p > 0, "kmeans: empty training data");
    require(labels.size() == n, "kmeans: label count mismatch");
    require(opts.k >= 1 && opts.k <= n, "kmeans: k must be in [1, n]");
    for (int l : labels) require(l == +1 || l == -1, "kmeans: labels must be +1 or -1");
    for (std::size_t i = 0; i < n * p; ++i)
        require(std::isfinite(x.data[i]), "kmeans: non-finite feature value");

    CentroidModel model;
    model.k = opts.k;
    model.seed = opts.seed;
    model.centroids = Matrix(opts.k, p);

    // seeded init: first k pairwise-distinct points of a shuffled order
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng::Stream rs(rng::derive_seed(opts.seed, {23}));
    rs.shuffle(order);
    std::size_t placed = 0;
    for (std::size_t i : order) {
        bool duplicate = false;
        for (std::size_t c = 0; c < placed && !duplicate; ++c)
            duplicate = kernels::squared_distance(model.centroids.row(c), x.row(i), p) == 0.0;
        if (duplicate) continue;
        std::copy(x.row(i), x.row(i) + p, model.centroids.data.begin() + static_cast<std::ptrdiff_t>(placed * p));
        if (++placed == opts.k) break;
    }
    require(placed == opts.k, "kmeans: fewer distinct points than k");

    std::vector<std::size_t> assignment(n, 0), previous(n, n);
    for (std::size_t iter = 0; iter < opts.max_iters; ++iter) {
        for (std::size_t i = 0; i < n; ++i)
            assignment[i] = nearest_centroid(model.centroids, x.row(i), p);

        // an empty cluster adopts the point farthest from its current centroid
        std::vector<std::size_t> sizes(opts.k, 0);
        for (std::size_t a : assignment) ++sizes[a];
        std::vector<char> moved(n, 0);
        for (std::size_t c = 0; c < opts.k; ++c) {
            if (sizes[c] > 0) continue;
            std::size_t far_i = n;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (moved[i] || sizes[assignment[i]] <= 1) continue;
                const double d =
                    kernels::squared_distance(model.centroids.row(assignment[i]), x.row(i), p);
                if (d > far_d) {
                    far_d = d;
                    far_i = i;
                }
            }
            require(far_i < n, "kmeans: cannot repopulate empty cluster");
            --sizes[assignment[far_i]];
            assignment[far_i] = c;
            ++sizes[c];
            moved[far_i] = 1;
        }

        std::fill(model.centroids.data.begin(), model.centroids.data.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            kernels::axpy(1.0, x.row(i), model.centroids.row(assignment[i]), p);
        for (std::size_t c = 0; c < opts.k; ++c)
            for (std::size_t j = 0; j < p; ++j) model.centroids(c, j) /= static_cast<double>(sizes[c]);

        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            inertia += kernels::squared_distance(model.centroids.row(assignment[i]), x.row(i), p);
        model.inertia_trace.push_back(inertia);

        if (assignment == previous) break;
        previous = assignment;
    }

    // majority vote per cluster; ties go to control (-1)
    model.cluster_labels.assign(opts.k, -1);
    for (std::size_t c = 0; c < opts.k; ++c) {
        long vote = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (assignment[i] == c) vote += labels[i];
        model.cluster_labels[c] = vote > 0 ? +1 : -1;
    }
    return model;
}

}  // namespace dyslex::classify
