#pragma once

#include <Eigen/SVD>

#include <string>

#include "swirl/error.hpp"
#include "swirl/reduce/projection.hpp"
#include "swirl/vectorize.hpp"

namespace swirl {

struct PcaResult {
    Vector mean;
    Matrix components;  // out_dims x d, unit rows
    Vector explained_variance;
    Matrix scores;  // N x out_dims
};

/// Principal components of the mean-centred rows via a thin SVD, ordered by
/// decreasing singular value. Each component's largest-magnitude loading is
/// made positive.
inline PcaResult pca_fit(const Matrix& points, std::size_t out_dims) {
    const auto n = points.rows();
    const auto d = points.cols();
    if (n < 2) throw ParameterError("pca: need at least 2 rows");
    const auto r = static_cast<Eigen::Index>(out_dims);
    if (r < 1 || r > std::min(n, d)) throw ParameterError("pca: out_dims must be in [1, min(N, d)]");

    PcaResult res;
    res.mean = points.colwise().mean().transpose();
    Eigen::MatrixXd centred = points.rowwise() - res.mean.transpose();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(centred, Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    res.components = svd.matrixV().leftCols(r).transpose();
    for (Eigen::Index c = 0; c < r; ++c) {
        Eigen::Index arg = 0;
        res.components.row(c).cwiseAbs().maxCoeff(&arg);
        if (res.components(c, arg) < 0) res.components.row(c) *= -1.0;
    }
    res.explained_variance = s.head(r).array().square() / static_cast<double>(n - 1);
    res.scores = centred * res.components.transpose();
    return res;
}

inline Projection pca(const LabeledCloud& cloud, std::size_t out_dims = 2) {
    PcaResult fit = pca_fit(cloud.points, out_dims);
    std::map<std::string, std::string> params{{"out_dims", std::to_string(out_dims)}};
    for (Eigen::Index c = 0; c < fit.explained_variance.size(); ++c)
        params["explained_variance_" + std::to_string(c)] = io::format_double(fit.explained_variance(c), 9);
    return attach_labels(std::move(fit.scores), cloud, Method::pca, std::move(params));
}

}  // namespace swirl
