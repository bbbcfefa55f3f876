#pragma once

// Exact O(N^2) t-SNE.

#include <cmath>
#include <string>
#include <vector>

#include "swirl/error.hpp"
#include "swirl/reduce/projection.hpp"
#include "swirl/rng.hpp"
#include "swirl/vectorize.hpp"

namespace swirl {

struct TsneParams {
    double perplexity = 30.0;
    std::size_t n_iter = 1000;
    std::uint64_t seed = 42;
    double learning_rate = 200.0;
    double early_exaggeration = 12.0;
};

struct TsneResult {
    Matrix coords;
    /// KL(P || Q) against the unexaggerated P, one entry per iteration.
    std::vector<double> kl;
    /// Achieved perplexity 2^{H(P_i)} of every conditional row.
    std::vector<double> row_perplexity;
};

inline constexpr double kPerplexityTolerance = 1e-10;  // on the entropy, in nats

/// Conditional affinities p_{j|i} = exp(-beta_i d_ij) / Z_i with beta_i found
/// by bisection so that each row's entropy equals log(perplexity). Row-major
/// N x N with zero diagonal. Squared Euclidean distances are expected.
inline Matrix conditional_affinities(const Matrix& sq_dist, double perplexity, std::vector<double>* achieved = nullptr) {
    const Eigen::Index n = sq_dist.rows();
    const double target = std::log(perplexity);
    Matrix p = Matrix::Zero(n, n);
    if (achieved) achieved->assign(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        double dmin = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i) dmin = std::min(dmin, sq_dist(i, j));
        double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
        double entropy = 0;
        for (int iter = 0; iter < 400; ++iter) {
            double z = 0, wsum = 0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                double shifted = sq_dist(i, j) - dmin;
                double e = std::exp(-beta * shifted);
                p(i, j) = e;
                z += e;
                wsum += e * shifted;
            }
            entropy = std::log(z) + beta * wsum / z;
            for (Eigen::Index j = 0; j < n; ++j) p(i, j) /= z;
            double diff = entropy - target;
            if (std::abs(diff) < kPerplexityTolerance) break;
            if (diff > 0) {
                lo = beta;
                beta = std::isinf(hi) ? beta * 2 : 0.5 * (lo + hi);
            } else {
                hi = beta;
                beta = 0.5 * (lo + hi);
            }
        }
        if (achieved) (*achieved)[static_cast<std::size_t>(i)] = std::exp(entropy);
    }
    return p;
}

/// Joint affinities (P + P^T) / 2N.
inline Matrix joint_affinities(const Matrix& conditional) {
    const auto n = static_cast<double>(conditional.rows());
    Matrix p = (conditional + conditional.transpose()) / (2.0 * n);
    return p;
}

inline Matrix squared_distances(const Matrix& x) {
    const Eigen::Index n = x.rows();
    Matrix d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i, i) = 0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double v = (x.row(i) - x.row(j)).squaredNorm();
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

/// KL(P || Q) for a layout `y`, and its gradient when `grad` is non-null.
/// `exaggeration` scales P inside the gradient only.
inline double tsne_kl(const Matrix& p, const Matrix& y, Matrix* grad = nullptr, double exaggeration = 1.0) {
    const Eigen::Index n = y.rows();
    Matrix num(n, n);
    double zsum = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        num(i, i) = 0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double v = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
            num(i, j) = v;
            num(j, i) = v;
            zsum += 2 * v;
        }
    }
    double kl = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j || p(i, j) <= 0) continue;
            double q = std::max(num(i, j) / zsum, 1e-300);
            kl += p(i, j) * std::log(p(i, j) / q);
        }
    if (grad) {
        grad->setZero(n, y.cols());
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i == j) continue;
                double mult = (exaggeration * p(i, j) - num(i, j) / zsum) * num(i, j);
                grad->row(i) += 4.0 * mult * (y.row(i) - y.row(j));
            }
    }
    return kl;
}

/// Gradient descent with momentum 0.5 and exaggeration for the first quarter
/// of the iterations, momentum 0.8 afterwards, and per-coordinate adaptive
/// gains. The initial layout is N(0, 1e-4^2).
inline TsneResult tsne_embed(const Matrix& points, const TsneParams& params) {
    const auto n = static_cast<std::size_t>(points.rows());
    if (!(params.perplexity > 0)) throw ParameterError("tsne: perplexity must be positive");
    if (!(3.0 * params.perplexity < static_cast<double>(n)))
        throw ParameterError("tsne: need 3 * perplexity < N (perplexity " + io::format_double(params.perplexity, 6) +
                             ", N " + std::to_string(n) + ")");
    TsneResult res;
    Matrix p = joint_affinities(conditional_affinities(squared_distances(points), params.perplexity, &res.row_perplexity));

    Rng rng(derive_seed(params.seed, "tsne-init"));
    const auto rows = static_cast<Eigen::Index>(n);
    Matrix y(rows, 2);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < 2; ++j) y(i, j) = 1e-4 * standard_normal(rng);
    Matrix update = Matrix::Zero(rows, 2);
    Matrix gains = Matrix::Ones(rows, 2);
    Matrix grad;
    const std::size_t switch_iter = params.n_iter / 4;
    res.kl.reserve(params.n_iter);
    for (std::size_t it = 0; it < params.n_iter; ++it) {
        const bool early = it < switch_iter;
        const double momentum = early ? 0.5 : 0.8;
        double kl = tsne_kl(p, y, &grad, early ? params.early_exaggeration : 1.0);
        if (!std::isfinite(kl)) throw NumericError("tsne: non-finite KL at iteration " + std::to_string(it));
        res.kl.push_back(kl);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < 2; ++j) {
                bool same_sign = (grad(i, j) > 0) == (update(i, j) > 0);
                gains(i, j) = same_sign ? std::max(gains(i, j) * 0.8, 0.01) : gains(i, j) + 0.2;
                update(i, j) = momentum * update(i, j) - params.learning_rate * gains(i, j) * grad(i, j);
            }
        y += update;
        y.rowwise() -= y.colwise().mean();
    }
    res.coords = std::move(y);
    return res;
}

inline Projection tsne(const LabeledCloud& cloud, double perplexity, std::uint64_t seed, std::size_t n_iter) {
    TsneParams params;
    params.perplexity = perplexity;
    params.seed = seed;
    params.n_iter = n_iter;
    TsneResult res = tsne_embed(cloud.points, params);
    return attach_labels(std::move(res.coords), cloud, Method::tsne,
                         {{"perplexity", io::format_double(perplexity, 6)},
                          {"seed", std::to_string(seed)},
                          {"n_iter", std::to_string(n_iter)}});
}

}  // namespace swirl
