#pragma once

#include <string>
#include <vector>

#include "swirl/classify/kmeans.hpp"
#include "swirl/reduce/knn.hpp"
#include "swirl/reduce/laplacian.hpp"

namespace swirl {

/// Binary kNN affinity, symmetrised by union (A_ij = 1 if either point is
/// among the other's n_neighbors nearest).
inline SparseMatrix knn_affinity(const Matrix& points, std::size_t n_neighbors) {
    KnnGraph g = knn_graph(points, n_neighbors, Metric::euclidean);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * g.n * g.k);
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.k; ++j) {
            trips.emplace_back(static_cast<Eigen::Index>(i), g.index(i, j), 1.0);
            trips.emplace_back(g.index(i, j), static_cast<Eigen::Index>(i), 1.0);
        }
    SparseMatrix a(static_cast<Eigen::Index>(g.n), static_cast<Eigen::Index>(g.n));
    // Duplicates would sum; keep the indicator.
    a.setFromTriplets(trips.begin(), trips.end(), [](double, double) { return 1.0; });
    return a;
}

/// Ng-Jordan-Weiss spectral clustering: the k bottom eigenvectors of the
/// normalised Laplacian of the kNN affinity (the trivial one included), rows
/// scaled to unit length, then KMeans. A disconnected graph is fine: its
/// repeated zero eigenvalues span the component indicators.
inline ClusterAssignment spectral_cluster(const Matrix& points, std::size_t k, std::size_t n_neighbors_affinity,
                                          std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(points.rows());
    if (k == 0) throw ParameterError("spectral_cluster: k must be positive");
    if (n <= n_neighbors_affinity)
        throw ParameterError("spectral_cluster: need N > n_neighbors_affinity (" + std::to_string(n) + " <= " +
                             std::to_string(n_neighbors_affinity) + ")");
    if (k > n) throw ParameterError("spectral_cluster: k exceeds N");
    if (k == 1) {
        ClusterAssignment one;
        one.k = 1;
        one.cluster_id.assign(n, 0);
        one.centroids = points.colwise().mean();
        for (std::size_t i = 0; i < n; ++i)
            one.objective += (points.row(static_cast<Eigen::Index>(i)) - one.centroids.row(0)).squaredNorm();
        return one;
    }
    SparseMatrix a = knn_affinity(points, n_neighbors_affinity);
    EigenPairs ep = laplacian_bottom_eigenpairs(a, k, derive_seed(seed, "spectral-eigs"), 5000, 1e-5);
    Matrix emb = ep.vectors;
    for (Eigen::Index i = 0; i < emb.rows(); ++i) {
        double norm = emb.row(i).norm();
        if (norm > 0) emb.row(i) /= norm;
    }
    return kmeans(emb, k, derive_seed(seed, "spectral-kmeans"));
}

}  // namespace swirl
