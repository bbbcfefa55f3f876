#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "swirl/error.hpp"
#include "swirl/types.hpp"

namespace swirl {

enum class Metric : std::uint8_t { euclidean, cosine };

inline std::string_view to_string(Metric m) { return m == Metric::euclidean ? "euclidean" : "cosine"; }

inline Metric parse_metric(std::string_view s) {
    if (s == "euclidean") return Metric::euclidean;
    if (s == "cosine") return Metric::cosine;
    throw ParseError("unknown metric '" + std::string(s) + "'");
}

/// Exact distance between two rows. Cosine distance is 1 - cos(x, y); a zero
/// vector is at distance 0 from another zero vector and 1 from anything else.
template <class A, class B>
double distance(const A& x, const B& y, Metric metric) {
    if (metric == Metric::euclidean) {
        double s = 0;
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            double d = x(j) - y(j);
            s += d * d;
        }
        return std::sqrt(s);
    }
    double dot = 0, nx = 0, ny = 0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        dot += x(j) * y(j);
        nx += x(j) * x(j);
        ny += y(j) * y(j);
    }
    if (nx == 0 && ny == 0) return 0.0;
    if (nx == 0 || ny == 0) return 1.0;
    return std::max(0.0, 1.0 - dot / (std::sqrt(nx) * std::sqrt(ny)));
}

/// k nearest neighbours of every row, self excluded, rows sorted by
/// (distance, index).
struct KnnGraph {
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<std::int32_t> indices;
    std::vector<double> distances;

    std::int32_t index(std::size_t i, std::size_t j) const { return indices[i * k + j]; }
    double dist(std::size_t i, std::size_t j) const { return distances[i * k + j]; }
    std::span<const double> row_distances(std::size_t i) const { return {distances.data() + i * k, k}; }
};

namespace detail {

struct Candidate {
    double d;
    std::int32_t j;
    bool operator<(const Candidate& o) const { return d < o.d || (d == o.d && j < o.j); }
};

inline void exact_row(const Matrix& points, std::size_t i, std::size_t k, Metric metric, Candidate* out) {
    const auto n = static_cast<std::size_t>(points.rows());
    std::vector<Candidate> all;
    all.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j)
        if (j != i)
            all.push_back({distance(points.row(static_cast<Eigen::Index>(i)), points.row(static_cast<Eigen::Index>(j)), metric),
                           static_cast<std::int32_t>(j)});
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
    std::copy_n(all.begin(), k, out);
}

}  // namespace detail

/// Exact kNN graph.
///
/// Candidates come from blocked Gram-matrix products; the best `k + 32` per
/// row are re-scored with the exact distance. A row whose candidate set cannot
/// be proven to contain the exact answer (margin below the rounding bound of
/// the Gram route) is recomputed by direct scan, so the result always equals a
/// brute-force search with ties broken by index.
inline KnnGraph knn_graph(const Matrix& points, std::size_t k, Metric metric) {
    const auto n = static_cast<std::size_t>(points.rows());
    if (k == 0) throw ParameterError("knn_graph: k must be positive");
    if (k >= n) throw ParameterError("knn_graph: k = " + std::to_string(k) + " requires more than k points, got " + std::to_string(n));

    KnnGraph g;
    g.n = n;
    g.k = k;
    g.indices.resize(n * k);
    g.distances.resize(n * k);

    // Gram-route representation: rows normalised for cosine.
    Matrix x = points;
    Vector sq(static_cast<Eigen::Index>(n));
    double max_sq = 0;
    bool zero_rows = false;
    for (std::size_t i = 0; i < n; ++i) {
        auto r = x.row(static_cast<Eigen::Index>(i));
        double s = r.squaredNorm();
        if (metric == Metric::cosine) {
            if (s > 0) r /= std::sqrt(s);
            else zero_rows = true;
            s = r.squaredNorm();
        }
        sq(static_cast<Eigen::Index>(i)) = s;
        max_sq = std::max(max_sq, s);
    }
    const std::size_t m = std::min(n - 1, k + 32);
    // Absolute rounding bound on an approximate squared distance (or 1 - cos).
    const double slack = 1e-10 * std::max(1.0, max_sq) * static_cast<double>(points.cols() + 1);
    const std::size_t block = 256;
    std::vector<detail::Candidate> row_cands;
    row_cands.reserve(n);

    for (std::size_t b0 = 0; b0 < n; b0 += block) {
        const std::size_t b1 = std::min(n, b0 + block);
        Matrix gram = x.middleRows(static_cast<Eigen::Index>(b0), static_cast<Eigen::Index>(b1 - b0)) * x.transpose();
        for (std::size_t i = b0; i < b1; ++i) {
            row_cands.clear();
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                double gij = gram(static_cast<Eigen::Index>(i - b0), static_cast<Eigen::Index>(j));
                double approx = metric == Metric::euclidean
                                    ? sq(static_cast<Eigen::Index>(i)) + sq(static_cast<Eigen::Index>(j)) - 2 * gij
                                    : 1.0 - gij;
                row_cands.push_back({approx, static_cast<std::int32_t>(j)});
            }
            std::nth_element(row_cands.begin(), row_cands.begin() + static_cast<std::ptrdiff_t>(m - 1), row_cands.end());
            double best_dropped = std::numeric_limits<double>::infinity();
            for (std::size_t c = m; c < row_cands.size(); ++c) best_dropped = std::min(best_dropped, row_cands[c].d);

            std::vector<detail::Candidate> exact(row_cands.begin(), row_cands.begin() + static_cast<std::ptrdiff_t>(m));
            for (auto& c : exact)
                c.d = distance(points.row(static_cast<Eigen::Index>(i)), points.row(c.j), metric);
            std::partial_sort(exact.begin(), exact.begin() + static_cast<std::ptrdiff_t>(k), exact.end());

            // Exact k-th distance expressed on the Gram route's scale.
            double kth = exact[k - 1].d;
            double kth_approx = metric == Metric::euclidean ? kth * kth : kth;
            // Zero rows break the normalised-Gram route for cosine.
            if (m < n - 1 && (zero_rows || !(kth_approx + 2 * slack < best_dropped))) {
                detail::exact_row(points, i, k, metric, exact.data());
            }
            for (std::size_t j = 0; j < k; ++j) {
                g.indices[i * k + j] = exact[j].j;
                g.distances[i * k + j] = exact[j].d;
            }
        }
    }
    return g;
}

}  // namespace swirl
