#pragma once

// Bottom eigenpairs of the symmetric normalised graph Laplacian
// L = I - D^{-1/2} W D^{-1/2}, shared by the UMAP initialisation and
// spectral clustering.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <string>

#include "swirl/error.hpp"
#include "swirl/rng.hpp"
#include "swirl/types.hpp"

namespace swirl {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct EigenPairs {
    Vector values;   // ascending
    Matrix vectors;  // one eigenvector per column
};

/// Graphs up to this size are solved densely.
inline constexpr std::size_t kDenseEigenLimit = 2000;

namespace detail {

inline Vector inv_sqrt_degree(const SparseMatrix& w) {
    Vector deg = Vector::Zero(w.rows());
    for (Eigen::Index c = 0; c < w.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(w, c); it; ++it) deg(it.row()) += it.value();
    for (Eigen::Index i = 0; i < deg.size(); ++i) deg(i) = deg(i) > 0 ? 1.0 / std::sqrt(deg(i)) : 0.0;
    return deg;
}

inline EigenPairs dense_bottom(const SparseMatrix& w, const Vector& dinv, std::size_t count) {
    const Eigen::Index n = w.rows();
    Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index c = 0; c < w.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(w, c); it; ++it)
            lap(it.row(), it.col()) -= dinv(it.row()) * it.value() * dinv(it.col());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
    if (es.info() != Eigen::Success) throw NumericError("dense eigensolver failed");
    const auto k = static_cast<Eigen::Index>(count);
    return {es.eigenvalues().head(k), es.eigenvectors().leftCols(k)};
}

/// Block subspace iteration on M = (I + D^{-1/2} W D^{-1/2}) / 2, whose
/// spectrum lies in [0, 1] with the Laplacian's bottom end at its top.
inline EigenPairs iterative_bottom(const SparseMatrix& w, const Vector& dinv, std::size_t count, std::uint64_t seed,
                                   int max_iter, double tol) {
    const Eigen::Index n = w.rows();
    const auto k = static_cast<Eigen::Index>(count);
    const Eigen::Index p = std::min<Eigen::Index>(n, k + 8);
    SparseMatrix s = dinv.asDiagonal() * w * dinv.asDiagonal();

    Rng rng(seed);
    Eigen::MatrixXd x(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) x(i, j) = standard_normal(rng);
    x = Eigen::HouseholderQR<Eigen::MatrixXd>(x).householderQ() * Eigen::MatrixXd::Identity(n, p);

    Eigen::MatrixXd y(n, p);
    for (int iter = 1; iter <= max_iter; ++iter) {
        y = 0.5 * (x + s * x);
        x = Eigen::HouseholderQR<Eigen::MatrixXd>(y).householderQ() * Eigen::MatrixXd::Identity(n, p);
        if (iter % 10 != 0 && iter != max_iter) continue;
        // Rayleigh-Ritz and residual check.
        Eigen::MatrixXd mx = 0.5 * (x + s * x);
        Eigen::MatrixXd h = x.transpose() * mx;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (h + h.transpose()));
        // Descending order of M's Ritz values.
        Eigen::MatrixXd ritz = x * es.eigenvectors().rowwise().reverse();
        Vector theta = es.eigenvalues().reverse();
        Eigen::MatrixXd mr = mx * es.eigenvectors().rowwise().reverse();
        double worst = 0;
        for (Eigen::Index j = 0; j < k; ++j) worst = std::max(worst, (mr.col(j) - theta(j) * ritz.col(j)).norm());
        if (worst < tol) {
            EigenPairs out;
            out.values.resize(k);
            for (Eigen::Index j = 0; j < k; ++j) out.values(j) = 1.0 - (2.0 * theta(j) - 1.0);
            out.vectors = ritz.leftCols(k);
            return out;
        }
        x = ritz;
    }
    throw NumericError("subspace iteration did not converge after " + std::to_string(max_iter) + " iterations");
}

}  // namespace detail

/// The `count` smallest eigenpairs of the normalised Laplacian of the
/// symmetric weight matrix `w`. Isolated vertices get a zero row in
/// D^{-1/2} and hence eigenvalue 1.
inline EigenPairs laplacian_bottom_eigenpairs(const SparseMatrix& w, std::size_t count, std::uint64_t seed = 0,
                                              int max_iter = 3000, double tol = 1e-6) {
    const auto n = static_cast<std::size_t>(w.rows());
    if (count == 0 || count > n) throw ParameterError("laplacian eigenpairs: bad count " + std::to_string(count));
    Vector dinv = detail::inv_sqrt_degree(w);
    if (n <= kDenseEigenLimit) return detail::dense_bottom(w, dinv, count);
    return detail::iterative_bottom(w, dinv, count, seed, max_iter, tol);
}

}  // namespace swirl
