#pragma once

#include <cmath>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "swirl/error.hpp"
#include "swirl/types.hpp"

namespace swirl {

struct LinearModel {
    Vector weights;
    double bias = 0;
    /// Euclidean norm of the objective's gradient at the returned parameters.
    double gradient_norm = 0;
    std::size_t iterations = 0;
};

namespace detail {

/// log(1 + exp(z)) without overflow.
inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

using Objective = std::function<double(const Vector&, Vector&)>;

/// Limited-memory BFGS with Armijo backtracking. Stops when the gradient norm
/// drops below `tol` or after `max_iter` iterations.
inline Vector lbfgs_minimize(const Objective& f, Vector x, double tol, std::size_t max_iter, std::size_t* iters,
                             double* final_grad_norm, std::size_t memory = 10) {
    Vector g(x.size());
    double fx = f(x, g);
    std::deque<Vector> s_hist, y_hist;
    std::deque<double> rho_hist;
    std::size_t it = 0;
    for (; it < max_iter && g.norm() >= tol; ++it) {
        // Two-loop recursion.
        Vector q = g;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t i = s_hist.size(); i-- > 0;) {
            alpha[i] = rho_hist[i] * s_hist[i].dot(q);
            q -= alpha[i] * y_hist[i];
        }
        if (!s_hist.empty()) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            double beta = rho_hist[i] * y_hist[i].dot(q);
            q += (alpha[i] - beta) * s_hist[i];
        }
        Vector dir = -q;
        double slope = g.dot(dir);
        if (slope >= 0) {
            dir = -g;
            slope = -g.squaredNorm();
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }
        double step = s_hist.empty() ? std::min(1.0, 1.0 / std::max(1e-12, g.norm())) : 1.0;
        Vector xn(x.size()), gn(x.size());
        double fn = 0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            xn = x + step * dir;
            fn = f(xn, gn);
            if (std::isfinite(fn) && fn <= fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        Vector s = xn - x, y = gn - g;
        double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            s_hist.push_back(s);
            y_hist.push_back(y);
            rho_hist.push_back(1.0 / sy);
            if (s_hist.size() > memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        x = std::move(xn);
        g = std::move(gn);
        fx = fn;
    }
    if (iters) *iters = it;
    if (final_grad_norm) *final_grad_norm = g.norm();
    return x;
}

}  // namespace detail

/// Regularised negative log-likelihood
///   sum_i log(1 + exp(-s_i (w.x_i + b))) + l2_penalty / 2 * |w|^2,
/// with s_i = +1 for label 1 and -1 for label 0; the bias is not penalised.
/// Fills `grad` (weights then bias) when non-null.
inline double logreg_objective(const Matrix& x, const std::vector<int>& y, double l2_penalty, const Vector& params,
                               Vector* grad) {
    const Eigen::Index d = x.cols();
    auto w = params.head(d);
    double b = params(d);
    Vector z = x * w;
    double loss = 0.5 * l2_penalty * w.squaredNorm();
    Vector coef(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double s = y[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
        double m = s * (z(i) + b);
        loss += detail::softplus(-m);
        coef(i) = -s * detail::sigmoid(-m);
    }
    if (grad) {
        grad->resize(d + 1);
        grad->head(d) = x.transpose() * coef + l2_penalty * w;
        (*grad)(d) = coef.sum();
    }
    return loss;
}

/// Binary logistic regression fitted by L-BFGS to gradient norm < 1e-6.
inline LinearModel fit_logreg(const Matrix& x, const std::vector<int>& labels, double l2_penalty = 1.0,
                              std::size_t max_iter = 20000) {
    if (static_cast<std::size_t>(x.rows()) != labels.size()) throw ParameterError("fit_logreg: size mismatch");
    bool has0 = false, has1 = false;
    for (int v : labels) (v ? has1 : has0) = true;
    if (!has0 || !has1) throw FitError("fit_logreg: training set must contain both classes");
    if (!(l2_penalty >= 0)) throw ParameterError("fit_logreg: l2_penalty must be non-negative");

    detail::Objective f = [&](const Vector& p, Vector& g) { return logreg_objective(x, labels, l2_penalty, p, &g); };
    LinearModel m;
    Vector p = detail::lbfgs_minimize(f, Vector::Zero(x.cols() + 1), 1e-6, max_iter, &m.iterations, &m.gradient_norm);
    m.weights = p.head(x.cols());
    m.bias = p(x.cols());
    return m;
}

inline std::vector<int> predict(const LinearModel& m, const Matrix& x) {
    Vector z = x * m.weights;
    std::vector<int> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = z(i) + m.bias > 0 ? 1 : 0;
    return out;
}

}  // namespace swirl
