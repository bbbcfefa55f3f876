#include <gtest/gtest.h>

#include "support.hpp"
#include "swirl/reduce/knn.hpp"

using namespace swirl;
using testing_support::brute_neighbours;

namespace {

void expect_matches_brute(const Matrix& x, std::size_t k, Metric metric) {
    KnnGraph g = knn_graph(x, k, metric);
    auto dist = metric == Metric::euclidean ? testing_support::naive_euclidean : testing_support::naive_cosine;
    for (long i = 0; i < x.rows(); ++i) {
        auto ref = brute_neighbours(x, i, k, dist);
        for (std::size_t j = 0; j < k; ++j) {
            ASSERT_EQ(g.index(static_cast<std::size_t>(i), j), ref[j].second) << "row " << i << " rank " << j;
            ASSERT_NEAR(g.dist(static_cast<std::size_t>(i), j), ref[j].first, 1e-12);
        }
    }
}

}  // namespace

TEST(Knn, ExcludesSelfAndSortsByDistance) {
    Matrix x(4, 1);
    x << 0, 1, 3, 7;
    KnnGraph g = knn_graph(x, 2, Metric::euclidean);
    EXPECT_EQ(g.index(0, 0), 1);
    EXPECT_EQ(g.index(0, 1), 2);
    EXPECT_EQ(g.index(3, 0), 2);
    EXPECT_DOUBLE_EQ(g.dist(3, 1), 6.0);
}

TEST(Knn, TiesBrokenByIndex) {
    Matrix x(5, 1);
    x << 0, 1, -1, 1, -1;
    KnnGraph g = knn_graph(x, 4, Metric::euclidean);
    EXPECT_EQ(std::vector<int>(g.indices.begin(), g.indices.begin() + 4), (std::vector<int>{1, 2, 3, 4}));
}

TEST(Knn, KMustBeBelowN) {
    Matrix x = Matrix::Zero(5, 2);
    EXPECT_THROW(knn_graph(x, 5, Metric::euclidean), ParameterError);
    EXPECT_THROW(knn_graph(x, 0, Metric::euclidean), ParameterError);
    EXPECT_NO_THROW(knn_graph(x, 4, Metric::euclidean));
}

TEST(Knn, DuplicatePointsAtDistanceZero) {
    Matrix x(4, 2);
    x << 1, 1, 1, 1, 1, 1, 5, 5;
    KnnGraph g = knn_graph(x, 2, Metric::euclidean);
    EXPECT_EQ(g.dist(0, 0), 0.0);
    EXPECT_EQ(g.dist(0, 1), 0.0);
    EXPECT_EQ(g.index(0, 0), 1);
    EXPECT_EQ(g.index(0, 1), 2);
}

TEST(Knn, CosineHandlesZeroRows) {
    Matrix x(4, 2);
    x << 0, 0, 1, 0, 0, 1, 2, 0;
    KnnGraph g = knn_graph(x, 1, Metric::cosine);
    EXPECT_EQ(g.index(1, 0), 3);
    EXPECT_DOUBLE_EQ(g.dist(0, 0), 1.0);
    expect_matches_brute(x, 3, Metric::cosine);
}

TEST(Knn, MatchesBruteForceOnRandomInstances) {
    std::mt19937_64 rng(2024);
    for (int inst = 0; inst < 20; ++inst) {
        const long n = 30 + static_cast<long>(rng() % 300);
        const long d = 2 + static_cast<long>(rng() % 40);
        const std::size_t k = 1 + rng() % 20;
        Matrix x = testing_support::random_matrix(rng, n, d);
        expect_matches_brute(x, k, Metric::euclidean);
        expect_matches_brute(x, k, Metric::cosine);
    }
}

TEST(Knn, MatchesBruteForceOnLatticeWithTies) {
    // Integer lattice: many exactly tied distances.
    Matrix x(64, 2);
    for (int i = 0; i < 64; ++i) {
        x(i, 0) = i % 8;
        x(i, 1) = i / 8;
    }
    expect_matches_brute(x, 8, Metric::euclidean);
}
