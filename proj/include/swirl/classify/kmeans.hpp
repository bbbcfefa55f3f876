#pragma once

#include <limits>
#include <string>
#include <vector>

#include "swirl/error.hpp"
#include "swirl/rng.hpp"
#include "swirl/types.hpp"

namespace swirl {

struct ClusterAssignment {
    std::vector<int> cluster_id;
    std::size_t k = 0;
    /// KMeans inertia (sum of squared distances to the assigned centroid).
    double objective = 0;
    Matrix centroids;
    /// Inertia after every assignment step of the winning restart.
    std::vector<double> inertia_history;
};

namespace detail {

inline Matrix kmeanspp_seed(const Matrix& x, std::size_t k, Rng& rng) {
    const Eigen::Index n = x.rows();
    Matrix c(static_cast<Eigen::Index>(k), x.cols());
    c.row(0) = x.row(static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::size_t>(n))));
    std::vector<double> d2(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = (x.row(i) - c.row(0)).squaredNorm();
    for (std::size_t m = 1; m < k; ++m) {
        double total = 0;
        for (double v : d2) total += v;
        Eigen::Index pick = 0;
        if (total <= 0) {
            pick = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::size_t>(n)));
        } else {
            double r = uniform01(rng) * total, acc = 0;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += d2[static_cast<std::size_t>(i)];
                if (acc > r && d2[static_cast<std::size_t>(i)] > 0) {
                    pick = i;
                    break;
                }
            }
        }
        c.row(static_cast<Eigen::Index>(m)) = x.row(pick);
        for (Eigen::Index i = 0; i < n; ++i)
            d2[static_cast<std::size_t>(i)] =
                std::min(d2[static_cast<std::size_t>(i)], (x.row(i) - c.row(static_cast<Eigen::Index>(m))).squaredNorm());
    }
    return c;
}

/// Nearest centroid (lowest index on ties) and the squared distance to it.
inline double assign(const Matrix& x, const Matrix& c, std::vector<int>& ids, std::vector<double>* dist = nullptr) {
    double inertia = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (Eigen::Index m = 0; m < c.rows(); ++m) {
            double d = (x.row(i) - c.row(m)).squaredNorm();
            if (d < best) {
                best = d;
                arg = static_cast<int>(m);
            }
        }
        ids[static_cast<std::size_t>(i)] = arg;
        if (dist) (*dist)[static_cast<std::size_t>(i)] = best;
        inertia += best;
    }
    return inertia;
}

}  // namespace detail

/// Lloyd's algorithm from k-means++ seeds, best of `n_init` restarts by
/// inertia. A restart stops when assignments no longer change or after
/// `max_iter` assignment steps. A cluster that empties is re-seeded at the
/// point farthest from its centroid.
inline ClusterAssignment kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, std::size_t n_init = 10,
                                std::size_t max_iter = 300) {
    const auto n = static_cast<std::size_t>(points.rows());
    if (k == 0) throw ParameterError("kmeans: k must be positive");
    if (n < k) throw ParameterError("kmeans: need N >= k (N " + std::to_string(n) + ", k " + std::to_string(k) + ")");
    if (n_init == 0) throw ParameterError("kmeans: n_init must be positive");

    ClusterAssignment best;
    best.objective = std::numeric_limits<double>::infinity();
    for (std::size_t run = 0; run < n_init; ++run) {
        Rng rng(derive_seed(seed, "kmeans-restart-" + std::to_string(run)));
        Matrix c = detail::kmeanspp_seed(points, k, rng);
        std::vector<int> ids(n, -1), prev;
        std::vector<double> dist(n);
        std::vector<double> history;
        double inertia = 0;
        for (std::size_t iter = 0; iter < max_iter; ++iter) {
            prev = ids;
            inertia = detail::assign(points, c, ids, &dist);
            history.push_back(inertia);
            if (ids == prev) break;
            // Centroid update.
            Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(k), points.cols());
            std::vector<std::size_t> count(k, 0);
            for (std::size_t i = 0; i < n; ++i) {
                sum.row(ids[i]) += points.row(static_cast<Eigen::Index>(i));
                ++count[static_cast<std::size_t>(ids[i])];
            }
            for (std::size_t m = 0; m < k; ++m) {
                if (count[m] > 0) {
                    c.row(static_cast<Eigen::Index>(m)) = sum.row(static_cast<Eigen::Index>(m)) / static_cast<double>(count[m]);
                    continue;
                }
                // Empty cluster: move its centroid onto the worst-served point.
                std::size_t far = 0;
                for (std::size_t i = 1; i < n; ++i)
                    if (dist[i] > dist[far]) far = i;
                c.row(static_cast<Eigen::Index>(m)) = points.row(static_cast<Eigen::Index>(far));
                dist[far] = 0;
            }
        }
        if (inertia < best.objective) {
            best.objective = inertia;
            best.cluster_id = ids;
            best.centroids = c;
            best.inertia_history = std::move(history);
        }
    }
    best.k = k;
    return best;
}

}  // namespace swirl
