#pragma once

// UMAP: kNN graph -> smooth-kNN calibration -> fuzzy union -> spectral
// initialisation -> negative-sampling SGD.

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "swirl/error.hpp"
#include "swirl/io.hpp"
#include "swirl/reduce/knn.hpp"
#include "swirl/reduce/laplacian.hpp"
#include "swirl/reduce/projection.hpp"
#include "swirl/rng.hpp"
#include "swirl/vectorize.hpp"

namespace swirl {

struct UmapParams {
    std::size_t n_neighbors = 15;
    double min_dist = 0.1;
    Metric metric = Metric::euclidean;
    /// 0 selects 500 epochs below 10,000 points and 200 above.
    std::size_t n_epochs = 0;
    std::uint64_t seed = 42;
    double spread = 1.0;
    std::size_t negative_sample_rate = 5;
    double learning_rate = 1.0;
    double repulsion_strength = 1.0;

    void validate() const {
        if (n_neighbors < 2) throw ParameterError("umap: n_neighbors must be at least 2");
        if (!(spread > 0)) throw ParameterError("umap: spread must be positive");
        if (!(min_dist >= 0 && min_dist < spread)) throw ParameterError("umap: need 0 <= min_dist < spread");
        if (negative_sample_rate == 0) throw ParameterError("umap: negative_sample_rate must be positive");
    }

    std::size_t epochs_for(std::size_t n) const { return n_epochs ? n_epochs : (n < 10000 ? 500 : 200); }
};

struct SmoothKnn {
    double rho = 0;
    double sigma = 0;
    /// True when log2(k) was unreachable and sigma sits at its floor.
    bool at_floor = false;
};

inline constexpr double kSmoothKnnTolerance = 1e-7;
inline constexpr double kMinDistScale = 1e-3;

/// Membership sum for one row: sum_j exp(-max(0, d_j - rho) / sigma).
inline double smooth_knn_sum(std::span<const double> d, double rho, double sigma) {
    double s = 0;
    for (double x : d) {
        double r = x - rho;
        s += r > 0 ? std::exp(-r / sigma) : 1.0;
    }
    return s;
}

/// rho is the smallest positive distance; sigma solves
/// sum_j exp(-max(0, d_j - rho) / sigma) = log2(k) by bisection. When the
/// target is below the number of terms already equal to 1, no sigma solves the
/// equation and sigma is set to the floor 1e-3 * mean(d) (1e-3 for an all-zero
/// row), as it is whenever bisection lands below that floor.
inline SmoothKnn smooth_knn_calibrate(std::span<const double> distances) {
    const std::size_t k = distances.size();
    if (k == 0) throw ParameterError("smooth_knn_calibrate: empty row");
    SmoothKnn out;
    for (double d : distances)
        if (d > 0) {
            out.rho = d;
            break;
        }
    double mean = 0;
    for (double d : distances) mean += d;
    mean /= static_cast<double>(k);
    const double floor = mean > 0 ? kMinDistScale * mean : kMinDistScale;
    const double target = std::log2(static_cast<double>(k));

    std::size_t saturated = 0;
    for (double d : distances)
        if (d - out.rho <= 0) ++saturated;
    if (static_cast<double>(saturated) >= target) {
        out.sigma = floor;
        out.at_floor = true;
        return out;
    }

    double lo = 0, hi = std::numeric_limits<double>::infinity(), mid = 1.0;
    for (int iter = 0; iter < 256; ++iter) {
        double s = smooth_knn_sum(distances, out.rho, mid);
        if (std::abs(s - target) < kSmoothKnnTolerance) break;
        if (s > target) {
            hi = mid;
            mid = 0.5 * (lo + hi);
        } else {
            lo = mid;
            mid = std::isinf(hi) ? mid * 2 : 0.5 * (lo + hi);
        }
    }
    out.sigma = mid;
    if (out.sigma < floor) {
        out.sigma = floor;
        out.at_floor = true;
    }
    return out;
}

inline std::vector<SmoothKnn> calibrate_graph(const KnnGraph& g) {
    std::vector<SmoothKnn> out(g.n);
    for (std::size_t i = 0; i < g.n; ++i) out[i] = smooth_knn_calibrate(g.row_distances(i));
    return out;
}

/// Directed memberships w_ij = exp(-max(0, d_ij - rho_i) / sigma_i),
/// symmetrised as W = A + A^T - A o A^T.
inline SparseMatrix fuzzy_union(const KnnGraph& g, const std::vector<SmoothKnn>& calib) {
    const auto n = static_cast<Eigen::Index>(g.n);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(g.n * g.k);
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.k; ++j) {
            double r = g.dist(i, j) - calib[i].rho;
            double w = r > 0 ? std::exp(-r / calib[i].sigma) : 1.0;
            trips.emplace_back(static_cast<Eigen::Index>(i), g.index(i, j), w);
        }
    SparseMatrix a(n, n);
    a.setFromTriplets(trips.begin(), trips.end());
    SparseMatrix at = a.transpose();
    SparseMatrix w = a + at - SparseMatrix(a.cwiseProduct(at));
    w.prune(0.0);
    return w;
}

struct CurveParams {
    double a = 0;
    double b = 0;
    double rmse = 0;
};

inline double umap_curve(double x, double a, double b) { return 1.0 / (1.0 + a * std::pow(x, 2 * b)); }

/// Least-squares fit of 1 / (1 + a x^{2b}) to the offset exponential
/// (1 for x <= min_dist, exp(-(x - min_dist) / spread) beyond) on 300 evenly
/// spaced points of [0, 3 spread], by Levenberg-Marquardt from (1, 1).
inline CurveParams fit_curve_params(double min_dist, double spread) {
    if (!(spread > 0) || !(min_dist >= 0 && min_dist < spread))
        throw ParameterError("fit_curve_params: need 0 <= min_dist < spread");
    constexpr int n = 300;
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = 3.0 * spread * i / (n - 1);
        ys[i] = xs[i] <= min_dist ? 1.0 : std::exp(-(xs[i] - min_dist) / spread);
    }
    auto cost = [&](double a, double b) {
        double s = 0;
        for (int i = 0; i < n; ++i) {
            double r = umap_curve(xs[i], a, b) - ys[i];
            s += r * r;
        }
        return s;
    };

    double a = 1.0, b = 1.0, lambda = 1e-3;
    double c = cost(a, b);
    bool converged = false;
    for (int iter = 0; iter < 1000 && !converged; ++iter) {
        Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
        Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
        for (int i = 0; i < n; ++i) {
            double x = xs[i];
            double p = x > 0 ? std::pow(x, 2 * b) : 0.0;
            double den = 1.0 + a * p;
            double r = 1.0 / den - ys[i];
            double da = -p / (den * den);
            double db = x > 0 ? -a * p * 2.0 * std::log(x) / (den * den) : 0.0;
            Eigen::Vector2d jrow(da, db);
            jtj += jrow * jrow.transpose();
            jtr += jrow * r;
        }
        while (true) {
            Eigen::Matrix2d damped = jtj;
            damped.diagonal() *= (1.0 + lambda);
            Eigen::Vector2d step = damped.ldlt().solve(-jtr);
            double na = a + step(0), nb = b + step(1);
            double nc = (na > 0 && nb > 0) ? cost(na, nb) : std::numeric_limits<double>::infinity();
            if (nc <= c) {
                converged = std::abs(c - nc) <= 1e-15 * std::max(1.0, c) && step.norm() < 1e-10;
                a = na;
                b = nb;
                c = nc;
                lambda = std::max(lambda / 10, 1e-12);
                break;
            }
            lambda *= 10;
            if (lambda > 1e12) {
                converged = true;
                break;
            }
        }
    }
    if (!std::isfinite(a) || !std::isfinite(b) || a <= 0 || b <= 0)
        throw NumericError("fit_curve_params: fit did not converge");
    return {a, b, std::sqrt(c / n)};
}

// Per-edge SGD terms. For an edge at squared distance s = |y_i - y_j|^2 the
// attractive cross-entropy term is log(1 + a s^b) and the repulsive term is
// -log(1 - 1 / (1 + a s^b)). The coefficients below multiply (y_i - y_j) to
// give the negative gradient with respect to y_i.

inline double attractive_coefficient(double dist_sq, double a, double b) {
    if (dist_sq <= 0) return 0.0;
    return -2.0 * a * b * std::pow(dist_sq, b - 1.0) / (a * std::pow(dist_sq, b) + 1.0);
}

/// `epsilon` regularises the pole at s = 0; 0 gives the exact gradient.
inline double repulsive_coefficient(double dist_sq, double a, double b, double gamma = 1.0, double epsilon = 0.001) {
    return 2.0 * gamma * b / ((epsilon + dist_sq) * (a * std::pow(dist_sq, b) + 1.0));
}

inline double attractive_loss(double dist_sq, double a, double b) { return std::log1p(a * std::pow(dist_sq, b)); }

inline double repulsive_loss(double dist_sq, double a, double b) {
    double as = a * std::pow(dist_sq, b);
    return std::log1p(as) - std::log(as);
}

inline constexpr double kRepulsionEpsilon = 0.001;
inline constexpr double kGradClip = 4.0;

inline double clip_gradient(double v) { return std::clamp(v, -kGradClip, kGradClip); }

/// Spectral layout from the two non-trivial bottom eigenvectors of the
/// normalised Laplacian, scaled to a maximum coordinate of 10 and jittered
/// with N(0, 1e-4^2) noise. Falls back to seeded N(0, 1) coordinates when the
/// eigensolver fails.
inline Matrix spectral_init(const SparseMatrix& w, std::uint64_t seed, bool* used_fallback = nullptr) {
    const auto n = static_cast<std::size_t>(w.rows());
    Rng rng(seed);
    Matrix init(static_cast<Eigen::Index>(n), 2);
    bool fallback = n < 3;
    if (!fallback) {
        try {
            EigenPairs ep = laplacian_bottom_eigenpairs(w, 3, derive_seed(seed, "spectral-init"));
            Matrix v = ep.vectors.rightCols(2);
            double max_abs = v.cwiseAbs().maxCoeff();
            if (!(max_abs > 0) || !std::isfinite(max_abs)) throw NumericError("degenerate spectral layout");
            init = v * (10.0 / max_abs);
            for (Eigen::Index i = 0; i < init.rows(); ++i)
                for (Eigen::Index j = 0; j < 2; ++j) init(i, j) += 1e-4 * standard_normal(rng);
        } catch (const NumericError&) {
            fallback = true;
        }
    }
    if (fallback)
        for (Eigen::Index i = 0; i < init.rows(); ++i)
            for (Eigen::Index j = 0; j < 2; ++j) init(i, j) = standard_normal(rng);
    if (used_fallback) *used_fallback = fallback;
    return init;
}

/// Negative-sampling SGD over the edges of `w`.
///
/// Each stored entry (both orientations) is an edge sampled every
/// max_w / w_e epochs; edges lighter than max_w / n_epochs are dropped. An
/// edge sample pulls both endpoints together and pushes the head away from
/// `negative_sample_rate` uniformly drawn vertices. The step size decays
/// linearly from `learning_rate` to 0 and each coordinate update is clipped
/// to +-4.
inline Matrix optimize_layout(const SparseMatrix& w, Matrix init, const UmapParams& params, double a, double b) {
    const auto n = static_cast<std::size_t>(w.rows());
    if (static_cast<std::size_t>(init.rows()) != n || init.cols() != 2)
        throw ParameterError("optimize_layout: init must be N x 2");
    for (Eigen::Index i = 0; i < init.rows(); ++i)
        for (Eigen::Index j = 0; j < 2; ++j)
            if (!std::isfinite(init(i, j))) throw NumericError("optimize_layout: non-finite initial coordinate");
    const std::size_t n_epochs = params.epochs_for(n);

    std::vector<std::int32_t> head, tail;
    std::vector<double> weight;
    double max_w = 0;
    for (Eigen::Index c = 0; c < w.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(w, c); it; ++it) max_w = std::max(max_w, it.value());
    for (Eigen::Index c = 0; c < w.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(w, c); it; ++it) {
            if (it.value() < max_w / static_cast<double>(n_epochs)) continue;
            head.push_back(static_cast<std::int32_t>(it.row()));
            tail.push_back(static_cast<std::int32_t>(it.col()));
            weight.push_back(it.value());
        }
    const std::size_t n_edges = head.size();
    std::vector<double> epochs_per_sample(n_edges), next_sample(n_edges), epochs_per_neg(n_edges), next_neg(n_edges);
    for (std::size_t e = 0; e < n_edges; ++e) {
        epochs_per_sample[e] = max_w / weight[e];
        next_sample[e] = epochs_per_sample[e];
        epochs_per_neg[e] = epochs_per_sample[e] / static_cast<double>(params.negative_sample_rate);
        next_neg[e] = epochs_per_neg[e];
    }

    Matrix y = std::move(init);
    Rng rng(derive_seed(params.seed, "umap-sgd"));
    const double gamma = params.repulsion_strength;
    for (std::size_t epoch = 0; epoch < n_epochs; ++epoch) {
        const double alpha = params.learning_rate * (1.0 - static_cast<double>(epoch) / static_cast<double>(n_epochs));
        const auto ep = static_cast<double>(epoch);
        for (std::size_t e = 0; e < n_edges; ++e) {
            if (next_sample[e] > ep) continue;
            const Eigen::Index j = head[e];
            const Eigen::Index k = tail[e];
            double dx = y(j, 0) - y(k, 0), dy = y(j, 1) - y(k, 1);
            double dsq = dx * dx + dy * dy;
            double coef = attractive_coefficient(dsq, a, b);
            double gx = clip_gradient(coef * dx) * alpha, gy = clip_gradient(coef * dy) * alpha;
            y(j, 0) += gx;
            y(j, 1) += gy;
            y(k, 0) -= gx;
            y(k, 1) -= gy;
            next_sample[e] += epochs_per_sample[e];

            const auto n_neg = static_cast<std::size_t>((ep - next_neg[e]) / epochs_per_neg[e]);
            for (std::size_t s = 0; s < n_neg; ++s) {
                const auto m = static_cast<Eigen::Index>(uniform_index(rng, n));
                if (m == j) continue;
                dx = y(j, 0) - y(m, 0);
                dy = y(j, 1) - y(m, 1);
                dsq = dx * dx + dy * dy;
                if (dsq > 0) {
                    coef = repulsive_coefficient(dsq, a, b, gamma, kRepulsionEpsilon);
                    y(j, 0) += clip_gradient(coef * dx) * alpha;
                    y(j, 1) += clip_gradient(coef * dy) * alpha;
                } else {
                    y(j, 0) += kGradClip * alpha;
                    y(j, 1) += kGradClip * alpha;
                }
            }
            next_neg[e] += static_cast<double>(n_neg) * epochs_per_neg[e];
        }
        for (Eigen::Index i = 0; i < y.rows(); ++i)
            if (!std::isfinite(y(i, 0)) || !std::isfinite(y(i, 1)))
                throw NumericError("optimize_layout: non-finite coordinate at epoch " + std::to_string(epoch));
    }
    return y;
}

inline std::map<std::string, std::string> umap_param_map(const UmapParams& p, std::size_t n) {
    return {{"n_neighbors", std::to_string(p.n_neighbors)},
            {"min_dist", io::format_double(p.min_dist, 6)},
            {"metric", std::string(to_string(p.metric))},
            {"n_epochs", std::to_string(p.epochs_for(n))},
            {"seed", std::to_string(p.seed)},
            {"spread", io::format_double(p.spread, 6)},
            {"negative_sample_rate", std::to_string(p.negative_sample_rate)}};
}

/// Raw 2-D UMAP coordinates of the rows of `points`.
inline Matrix umap_embed(const Matrix& points, const UmapParams& params) {
    params.validate();
    const auto n = static_cast<std::size_t>(points.rows());
    if (n <= params.n_neighbors)
        throw ParameterError("umap: need more than n_neighbors = " + std::to_string(params.n_neighbors) +
                             " points, got " + std::to_string(n));
    KnnGraph g = knn_graph(points, params.n_neighbors, params.metric);
    SparseMatrix w = fuzzy_union(g, calibrate_graph(g));
    CurveParams curve = fit_curve_params(params.min_dist, params.spread);
    Matrix init = spectral_init(w, derive_seed(params.seed, "umap-init"));
    return optimize_layout(w, std::move(init), params, curve.a, curve.b);
}

/// Projects the whole cloud without looking at its labels, then attaches them.
inline Projection umap(const LabeledCloud& cloud, const UmapParams& params) {
    Matrix coords = umap_embed(cloud.points, params);
    return attach_labels(std::move(coords), cloud, Method::umap, umap_param_map(params, cloud.rows()));
}

}  // namespace swirl
