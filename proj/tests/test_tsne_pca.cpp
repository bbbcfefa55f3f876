#include <gtest/gtest.h>

#include "support.hpp"
#include "swirl/reduce/pca.hpp"
#include "swirl/reduce/tsne.hpp"

using namespace swirl;

TEST(Tsne, RowPerplexityMatchesTarget) {
    std::mt19937_64 rng(1);
    Matrix x = testing_support::random_matrix(rng, 200, 10);
    for (double perp : {5.0, 30.0, 50.0}) {
        std::vector<double> achieved;
        Matrix p = conditional_affinities(squared_distances(x), perp, &achieved);
        for (long i = 0; i < p.rows(); ++i) {
            EXPECT_NEAR(achieved[static_cast<std::size_t>(i)], perp, 1e-4);
            EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-12);
            EXPECT_EQ(p(i, i), 0.0);
            // Recompute the entropy here rather than trusting the solver's.
            long double h = 0;
            for (long j = 0; j < p.cols(); ++j)
                if (p(i, j) > 0) h -= static_cast<long double>(p(i, j)) * std::log(static_cast<long double>(p(i, j)));
            EXPECT_NEAR(std::exp(static_cast<double>(h)), perp, 1e-4);
        }
    }
}

TEST(Tsne, JointAffinitiesSymmetricAndNormalised) {
    std::mt19937_64 rng(2);
    Matrix x = testing_support::random_matrix(rng, 60, 4);
    Matrix p = joint_affinities(conditional_affinities(squared_distances(x), 10.0));
    EXPECT_LT((p - p.transpose()).cwiseAbs().maxCoeff(), 1e-18);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
}

TEST(Tsne, GradientMatchesFiniteDifference) {
    std::mt19937_64 rng(3);
    Matrix x = testing_support::random_matrix(rng, 30, 5);
    Matrix p = joint_affinities(conditional_affinities(squared_distances(x), 5.0));
    Matrix y = testing_support::random_matrix(rng, 30, 2);
    Matrix grad;
    tsne_kl(p, y, &grad);
    const double h = 1e-6;
    for (long i = 0; i < 30; i += 7)
        for (long j = 0; j < 2; ++j) {
            Matrix up = y, dn = y;
            up(i, j) += h;
            dn(i, j) -= h;
            EXPECT_NEAR(grad(i, j), (tsne_kl(p, up) - tsne_kl(p, dn)) / (2 * h), 1e-6);
        }
}

TEST(Tsne, KlDecreasesOverTrailingWindows) {
    std::mt19937_64 rng(4);
    std::vector<int> blob;
    Matrix x = testing_support::two_blobs(rng, 150, 6, 8.0, blob);
    TsneParams params;
    params.perplexity = 20;
    params.n_iter = 600;
    TsneResult r = tsne_embed(x, params);
    ASSERT_EQ(r.kl.size(), 600u);
    // After the exaggeration phase, every 50-iteration window ends no higher
    // than it started.
    for (std::size_t t = 150 + 50; t < r.kl.size(); t += 50) EXPECT_LE(r.kl[t], r.kl[t - 50] + 1e-9) << t;
    EXPECT_LT(r.kl.back(), r.kl[150]);
    EXPECT_TRUE(r.coords.allFinite());
}

TEST(Tsne, Deterministic) {
    std::mt19937_64 rng(5);
    Matrix x = testing_support::random_matrix(rng, 40, 3);
    TsneParams params;
    params.perplexity = 5;
    params.n_iter = 100;
    EXPECT_EQ(tsne_embed(x, params).coords, tsne_embed(x, params).coords);
}

TEST(Tsne, PerplexityTooLargeRejected) {
    Matrix x = Matrix::Random(30, 3);
    TsneParams params;
    params.perplexity = 10;
    EXPECT_THROW(tsne_embed(x, params), ParameterError);
}

TEST(Pca, EigenvaluesMatchJacobiOracle) {
    std::mt19937_64 rng(6);
    Matrix x = testing_support::random_matrix(rng, 100, 50);
    // Give the columns distinct scales so the spectrum is spread out.
    for (long j = 0; j < 50; ++j) x.col(j) *= 1.0 + 0.1 * static_cast<double>(j);
    PcaResult fit = pca_fit(x, 50);
    Matrix c = x.rowwise() - x.colwise().mean();
    Matrix cov = (c.transpose() * c) / 99.0;
    std::vector<double> ev = testing_support::jacobi_eigenvalues(cov);
    for (long k = 0; k < 50; ++k) EXPECT_NEAR(fit.explained_variance(k), ev[static_cast<std::size_t>(49 - k)], 1e-8) << k;
}

TEST(Pca, ComponentsOrthonormalAndSignFixed) {
    std::mt19937_64 rng(7);
    Matrix x = testing_support::random_matrix(rng, 80, 6);
    PcaResult fit = pca_fit(x, 3);
    Matrix g = fit.components * fit.components.transpose();
    EXPECT_LT((g - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
    for (long r = 0; r < 3; ++r) {
        Eigen::Index arg;
        fit.components.row(r).cwiseAbs().maxCoeff(&arg);
        EXPECT_GT(fit.components(r, arg), 0.0);
    }
    EXPECT_LT(fit.scores.colwise().mean().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Pca, CollinearDataHasOneComponent) {
    Matrix x(5, 2);
    x << 0, 0, 1, 2, 2, 4, 3, 6, 4, 8;
    PcaResult fit = pca_fit(x, 2);
    EXPECT_NEAR(fit.explained_variance(1), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(fit.components(0, 1)), 2.0 / std::sqrt(5.0), 1e-12);
    EXPECT_THROW(pca_fit(x, 3), ParameterError);
}
