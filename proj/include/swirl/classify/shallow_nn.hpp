#pragma once

// One-hidden-layer ReLU network with a two-way softmax output, trained by
// mini-batch Adam on mean cross-entropy.

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "swirl/error.hpp"
#include "swirl/rng.hpp"
#include "swirl/types.hpp"

namespace swirl {

struct NNParams {
    std::size_t hidden_width = 64;
    std::size_t epochs = 200;
    std::size_t batch_size = 64;
    double learning_rate = 1e-3;
    std::uint64_t seed = 42;
};

struct NNModel {
    Matrix w1;  // hidden x d
    Vector b1;
    Matrix w2;  // 2 x hidden
    Vector b2;

    Eigen::Index size() const { return w1.size() + b1.size() + w2.size() + b2.size(); }

    Vector flatten() const {
        Vector p(size());
        Eigen::Index o = 0;
        for (Eigen::Index i = 0; i < w1.rows(); ++i)
            for (Eigen::Index j = 0; j < w1.cols(); ++j) p(o++) = w1(i, j);
        p.segment(o, b1.size()) = b1;
        o += b1.size();
        for (Eigen::Index i = 0; i < w2.rows(); ++i)
            for (Eigen::Index j = 0; j < w2.cols(); ++j) p(o++) = w2(i, j);
        p.segment(o, b2.size()) = b2;
        return p;
    }

    void unflatten(const Vector& p) {
        Eigen::Index o = 0;
        for (Eigen::Index i = 0; i < w1.rows(); ++i)
            for (Eigen::Index j = 0; j < w1.cols(); ++j) w1(i, j) = p(o++);
        b1 = p.segment(o, b1.size());
        o += b1.size();
        for (Eigen::Index i = 0; i < w2.rows(); ++i)
            for (Eigen::Index j = 0; j < w2.cols(); ++j) w2(i, j) = p(o++);
        b2 = p.segment(o, b2.size());
    }
};

/// He-normal hidden weights, Glorot-normal output weights, zero biases.
inline NNModel init_shallow_nn(std::size_t input_dim, std::size_t hidden, std::uint64_t seed) {
    Rng rng(derive_seed(seed, "nn-init"));
    NNModel m;
    const auto h = static_cast<Eigen::Index>(hidden), d = static_cast<Eigen::Index>(input_dim);
    m.w1.resize(h, d);
    m.w2.resize(2, h);
    const double s1 = std::sqrt(2.0 / static_cast<double>(input_dim));
    const double s2 = std::sqrt(2.0 / static_cast<double>(hidden + 2));
    for (Eigen::Index i = 0; i < h; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m.w1(i, j) = s1 * standard_normal(rng);
    for (Eigen::Index i = 0; i < 2; ++i)
        for (Eigen::Index j = 0; j < h; ++j) m.w2(i, j) = s2 * standard_normal(rng);
    m.b1 = Vector::Zero(h);
    m.b2 = Vector::Zero(2);
    return m;
}

/// N x 2 output logits; `hidden` receives the post-ReLU activations.
inline Matrix nn_logits(const NNModel& m, const Matrix& x, Matrix* hidden = nullptr) {
    Matrix pre = (x * m.w1.transpose()).rowwise() + m.b1.transpose();
    Matrix h = pre.cwiseMax(0.0);
    Matrix logits = (h * m.w2.transpose()).rowwise() + m.b2.transpose();
    if (hidden) *hidden = std::move(h);
    return logits;
}

/// Mean cross-entropy over the rows of `x` and, when `grad` is non-null, its
/// gradient in the layout of NNModel::flatten.
inline double nn_loss(const NNModel& m, const Matrix& x, const std::vector<int>& y, NNModel* grad = nullptr) {
    Matrix h;
    Matrix logits = nn_logits(m, x, &h);
    const Eigen::Index n = x.rows();
    Matrix dlogits(n, 2);
    double loss = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double mx = std::max(logits(i, 0), logits(i, 1));
        double e0 = std::exp(logits(i, 0) - mx), e1 = std::exp(logits(i, 1) - mx);
        double z = e0 + e1;
        int t = y[static_cast<std::size_t>(i)];
        loss += -(logits(i, t) - mx - std::log(z));
        dlogits(i, 0) = (e0 / z - (t == 0 ? 1.0 : 0.0)) / static_cast<double>(n);
        dlogits(i, 1) = (e1 / z - (t == 1 ? 1.0 : 0.0)) / static_cast<double>(n);
    }
    loss /= static_cast<double>(n);
    if (grad) {
        grad->w2 = dlogits.transpose() * h;
        grad->b2 = dlogits.colwise().sum().transpose();
        Matrix dh = dlogits * m.w2;
        for (Eigen::Index i = 0; i < dh.rows(); ++i)
            for (Eigen::Index j = 0; j < dh.cols(); ++j)
                if (h(i, j) <= 0) dh(i, j) = 0;
        grad->w1 = dh.transpose() * x;
        grad->b1 = dh.colwise().sum().transpose();
    }
    return loss;
}

inline NNModel fit_shallow_nn(const Matrix& x, const std::vector<int>& labels, const NNParams& params = {}) {
    if (static_cast<std::size_t>(x.rows()) != labels.size()) throw ParameterError("fit_shallow_nn: size mismatch");
    bool has0 = false, has1 = false;
    for (int v : labels) (v ? has1 : has0) = true;
    if (!has0 || !has1) throw FitError("fit_shallow_nn: training set must contain both classes");
    if (params.hidden_width == 0 || params.batch_size == 0) throw ParameterError("fit_shallow_nn: bad sizes");

    NNModel m = init_shallow_nn(static_cast<std::size_t>(x.cols()), params.hidden_width, params.seed);
    const Eigen::Index np = m.size();
    Vector mom = Vector::Zero(np), vel = Vector::Zero(np), p = m.flatten();
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    Rng rng(derive_seed(params.seed, "nn-batches"));
    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    NNModel grad = m;
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0;
        for (std::size_t start = 0; start < order.size(); start += params.batch_size) {
            const std::size_t end = std::min(order.size(), start + params.batch_size);
            Matrix xb(static_cast<Eigen::Index>(end - start), x.cols());
            std::vector<int> yb(end - start);
            for (std::size_t r = start; r < end; ++r) {
                xb.row(static_cast<Eigen::Index>(r - start)) = x.row(static_cast<Eigen::Index>(order[r]));
                yb[r - start] = labels[order[r]];
            }
            double loss = nn_loss(m, xb, yb, &grad);
            if (!std::isfinite(loss)) throw NumericError("fit_shallow_nn: non-finite loss at epoch " + std::to_string(epoch));
            epoch_loss += loss;
            Vector g = grad.flatten();
            ++step;
            mom = beta1 * mom + (1 - beta1) * g;
            vel = beta2 * vel + (1 - beta2) * g.cwiseProduct(g);
            const double c1 = 1 - std::pow(beta1, static_cast<double>(step));
            const double c2 = 1 - std::pow(beta2, static_cast<double>(step));
            p.array() -= params.learning_rate * (mom.array() / c1) / ((vel.array() / c2).sqrt() + eps);
            m.unflatten(p);
        }
        (void)epoch_loss;
    }
    return m;
}

inline std::vector<int> predict(const NNModel& m, const Matrix& x) {
    Matrix logits = nn_logits(m, x);
    std::vector<int> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = logits(i, 1) > logits(i, 0) ? 1 : 0;
    return out;
}

}  // namespace swirl
