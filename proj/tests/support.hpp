#pragma once

// Shared helpers for the test suites: random data, independent oracles and
// scratch directories.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <unistd.h>
#include <random>
#include <string>
#include <vector>

#include "swirl/types.hpp"

namespace testing_support {

using swirl::Matrix;

inline Matrix random_matrix(std::mt19937_64& rng, long rows, long cols, double scale = 1.0) {
    std::normal_distribution<double> nd(0.0, scale);
    Matrix m(rows, cols);
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j) m(i, j) = nd(rng);
    return m;
}

/// Two Gaussian blobs in `dims` dimensions, centres `separation` apart along
/// the first axis. Rows alternate blob 0, blob 1.
inline Matrix two_blobs(std::mt19937_64& rng, long n, long dims, double separation, std::vector<int>& blob) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix m(n, dims);
    blob.assign(static_cast<std::size_t>(n), 0);
    for (long i = 0; i < n; ++i) {
        blob[static_cast<std::size_t>(i)] = static_cast<int>(i % 2);
        for (long j = 0; j < dims; ++j) m(i, j) = nd(rng);
        if (i % 2) m(i, 0) += separation;
    }
    return m;
}

/// Cyclic Jacobi eigenvalue iteration for a symmetric matrix; eigenvalues
/// come back in ascending order. Slow and simple, which is the point.
inline std::vector<double> jacobi_eigenvalues(Matrix a, int sweeps = 100) {
    const long n = a.rows();
    for (int s = 0; s < sweeps; ++s) {
        double off = 0;
        for (long p = 0; p < n; ++p)
            for (long q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (long p = 0; p < n; ++p)
            for (long q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1), sn = t * c;
                for (long k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (long k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Brute-force neighbours of row i: (distance, index) sorted, self excluded.
template <class Dist>
std::vector<std::pair<double, int>> brute_neighbours(const Matrix& x, long i, std::size_t k, Dist&& dist) {
    std::vector<std::pair<double, int>> all;
    for (long j = 0; j < x.rows(); ++j)
        if (j != i) all.emplace_back(dist(x.row(i), x.row(j)), static_cast<int>(j));
    std::sort(all.begin(), all.end());
    all.resize(k);
    return all;
}

/// Plain-loop distances, independent of the library's implementation.
inline double naive_euclidean(const Eigen::Ref<const Eigen::RowVectorXd>& a, const Eigen::Ref<const Eigen::RowVectorXd>& b) {
    long double s = 0;
    for (long j = 0; j < a.size(); ++j) s += static_cast<long double>(a(j) - b(j)) * (a(j) - b(j));
    return static_cast<double>(std::sqrt(s));
}

inline double naive_cosine(const Eigen::Ref<const Eigen::RowVectorXd>& a, const Eigen::Ref<const Eigen::RowVectorXd>& b) {
    long double dot = 0, na = 0, nb = 0;
    for (long j = 0; j < a.size(); ++j) {
        dot += static_cast<long double>(a(j)) * b(j);
        na += static_cast<long double>(a(j)) * a(j);
        nb += static_cast<long double>(b(j)) * b(j);
    }
    if (na == 0 && nb == 0) return 0.0;
    if (na == 0 || nb == 0) return 1.0;
    return std::max(0.0, static_cast<double>(1.0L - dot / (std::sqrt(na) * std::sqrt(nb))));
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("swirl_test_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

/// Accuracy of a 2-way labelling against `truth` up to swapping the labels.
inline double matched_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    std::size_t same = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) same += (pred[i] == truth[i]);
    const double a = static_cast<double>(same) / static_cast<double>(pred.size());
    return std::max(a, 1.0 - a);
}

/// Purity of a clustering with respect to `truth`: each cluster counts its
/// majority class.
inline double purity(const std::vector<int>& clusters, const std::vector<int>& truth) {
    std::map<int, std::map<int, std::size_t>> counts;
    for (std::size_t i = 0; i < clusters.size(); ++i) ++counts[clusters[i]][truth[i]];
    std::size_t good = 0;
    for (const auto& [c, m] : counts) {
        std::size_t best = 0;
        for (const auto& [t, n] : m) best = std::max(best, n);
        good += best;
    }
    return static_cast<double>(good) / static_cast<double>(clusters.size());
}

}  // namespace testing_support
