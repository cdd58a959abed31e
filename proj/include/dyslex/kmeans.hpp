#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dyslex/matrix.hpp"

namespace dyslex::classify {

struct KmeansOptions {
    std::size_t k = 2;
    std::uint64_t seed = 1;
    std::size_t max_iters = 300;
};

// unsupervised k-means centroids turned into a classifier: each cluster takes
// the majority training label of its members (ties: "control"), prediction is
// the label of the nearest centroid (ties: lower centroid index).
struct CentroidModel {
    std::size_t k = 0;
    Matrix centroids;                // k x p
    std::vector<int> cluster_labels; // +1 / -1 per centroid
    std::vector<double> inertia_trace;  // within-cluster sum of squares, non-increasing
    std::uint64_t seed = 0;

    int predict(const double* row, std::size_t n_features) const;
    std::vector<int> predict(const Matrix& x) const;

    std::string to_json() const;
};

CentroidModel kmeans_train(const Matrix& x, const std::vector<int>& labels, const KmeansOptions& opts = {});

}  // namespace dyslex::classify
