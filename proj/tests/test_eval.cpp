#include <gtest/gtest.h>

#include "support.hpp"
#include "swirl/eval.hpp"
#include "swirl/tables.hpp"

using namespace swirl;

namespace {

constexpr Label A = Label::antonym;
constexpr Label S = Label::synonym;

std::vector<Pos> adj(std::size_t n) { return std::vector<Pos>(n, Pos::adjective); }

std::vector<Label> random_labels(std::mt19937_64& rng, std::size_t n, double p_ant) {
    std::bernoulli_distribution b(p_ant);
    std::vector<Label> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(b(rng) ? A : S);
    return out;
}

}  // namespace

TEST(Score, HandComputedExample) {
    // gold:  A A A A S S
    // pred:  A A S S S A
    std::vector<Label> gold{A, A, A, A, S, S}, pred{A, A, S, S, S, A};
    EvalReport r = score(pred, gold, adj(6), "cfg");
    EXPECT_DOUBLE_EQ(r.accuracy, 0.5);
    const ClassMetrics& a = r.per_class.at(A);
    EXPECT_EQ(a.tp, 2u);
    EXPECT_EQ(a.fp, 1u);
    EXPECT_EQ(a.fn, 2u);
    EXPECT_DOUBLE_EQ(a.precision, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(a.recall, 0.5);
    EXPECT_NEAR(a.f1, 2 * (2.0 / 3.0) * 0.5 / (2.0 / 3.0 + 0.5), 1e-15);
    const ClassMetrics& s = r.per_class.at(S);
    EXPECT_DOUBLE_EQ(s.precision, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(s.recall, 0.5);
    EXPECT_NEAR(r.macro_f1, (a.f1 + s.f1) / 2, 1e-15);
    EXPECT_EQ(r.config_digest, "cfg");
    EXPECT_EQ(r.n_test, 6u);
}

TEST(Score, AntonymAlwaysPresentAndZeroPrecisionWhenNeverPredicted) {
    EvalReport r = score({S, S}, {S, S}, adj(2));
    EXPECT_EQ(r.positive().support, 0u);
    EXPECT_EQ(r.positive().precision, 0.0);
    EXPECT_EQ(r.positive().f1, 0.0);
    EXPECT_DOUBLE_EQ(r.accuracy, 1.0);
}

TEST(Score, Errors) {
    EXPECT_THROW(score({A}, {A, S}, adj(2)), DataError);
    EXPECT_THROW(score({}, {}, {}), DataError);
}

TEST(Score, PerPosBreakdown) {
    std::vector<Label> gold{A, S, A, S}, pred{A, S, S, S};
    std::vector<Pos> pos{Pos::noun, Pos::noun, Pos::verb, Pos::verb};
    EvalReport r = score(pred, gold, pos);
    EXPECT_DOUBLE_EQ(r.per_pos.at(Pos::noun).accuracy, 1.0);
    EXPECT_DOUBLE_EQ(r.per_pos.at(Pos::verb).accuracy, 0.5);
    EXPECT_FALSE(r.per_pos.count(Pos::adjective));
}

TEST(Score, AccuracyIsSupportWeightedRecall) {
    std::mt19937_64 rng(1);
    for (int inst = 0; inst < 200; ++inst) {
        std::size_t n = 1 + rng() % 80;
        auto gold = random_labels(rng, n, 0.3 + 0.4 * static_cast<double>(inst % 3) / 2);
        auto pred = random_labels(rng, n, 0.5);
        EvalReport r = score(pred, gold, adj(n));
        double weighted = 0;
        std::size_t total = 0;
        for (const auto& [l, c] : r.per_class) {
            weighted += c.recall * static_cast<double>(c.support);
            total += c.support;
            EXPECT_EQ(c.tp + c.fn, c.support);
        }
        EXPECT_EQ(total, n);
        EXPECT_NEAR(r.accuracy, weighted / static_cast<double>(n), 1e-12);
    }
}

TEST(Score, InvariantUnderRelabelling) {
    std::mt19937_64 rng(2);
    for (int inst = 0; inst < 100; ++inst) {
        std::size_t n = 2 + rng() % 50;
        auto gold = random_labels(rng, n, 0.5), pred = random_labels(rng, n, 0.5);
        auto flip = [](std::vector<Label> v) {
            for (auto& l : v) l = l == A ? S : A;
            return v;
        };
        EvalReport r = score(pred, gold, adj(n)), f = score(flip(pred), flip(gold), adj(n));
        EXPECT_DOUBLE_EQ(r.accuracy, f.accuracy);
        if (r.per_class.count(S) && f.per_class.count(S)) {
            EXPECT_DOUBLE_EQ(r.per_class.at(A).f1, f.per_class.at(S).f1);
            EXPECT_DOUBLE_EQ(r.macro_f1, f.macro_f1);
        }
    }
}

TEST(Score, RandomPredictionsNearChance) {
    std::mt19937_64 rng(3);
    std::vector<double> accs;
    for (int t = 0; t < 200; ++t) {
        auto gold = random_labels(rng, 500, 0.5), pred = random_labels(rng, 500, 0.5);
        accs.push_back(score(pred, gold, adj(500)).accuracy);
    }
    Aggregate a = aggregate(accs);
    // Standard error of the mean is about 0.0016.
    EXPECT_NEAR(a.mean, 0.5, 0.01);
    EXPECT_NEAR(a.std, std::sqrt(0.25 / 500), 0.006);
}

TEST(Aggregate, SampleStandardDeviation) {
    Aggregate a = aggregate({1.0, 2.0, 3.0, 4.0});
    EXPECT_DOUBLE_EQ(a.mean, 2.5);
    EXPECT_DOUBLE_EQ(a.std, std::sqrt(5.0 / 3.0));
    EXPECT_EQ(aggregate({7.0}).std, 0.0);
    EXPECT_EQ(aggregate({}).n, 0u);
}

TEST(ReportTsv, ContainsAllScopes) {
    EvalReport r = score({A, S}, {A, A}, {Pos::noun, Pos::verb});
    std::string t = report_to_tsv(r);
    EXPECT_EQ(t.rfind("scope\tclass\tmetric\tvalue\n", 0), 0u);
    EXPECT_NE(t.find("overall\tall\taccuracy\t0.5"), std::string::npos);
    EXPECT_NE(t.find("noun\tantonym\trecall\t1"), std::string::npos);
    EXPECT_NE(t.find("verb\tantonym\trecall\t0"), std::string::npos);
}

TEST(Histogram, EdgesAndCounts) {
    HistogramSpec h = cosine_histogram({{A, {-1.0, -0.99, 0.0, 0.5, 1.0}}, {S, {0.96, 0.999}}}, 50);
    ASSERT_EQ(h.bin_edges.size(), 51u);
    EXPECT_EQ(h.bin_edges.front(), -1.0);
    EXPECT_EQ(h.bin_edges.back(), 1.0);
    const auto& a = h.counts.at(A);
    EXPECT_EQ(a[0], 2u);   // -1 and -0.99 share [-1, -0.96)
    EXPECT_EQ(a[25], 1u);  // 0 is the left edge of bin 25
    EXPECT_EQ(a[49], 1u);  // 1 is in the closed last bin
    EXPECT_EQ(h.counts.at(S)[49], 2u);
    EXPECT_THROW(cosine_histogram({{A, {1.0001}}}), DataError);
    EXPECT_THROW(cosine_histogram({{A, {0.0}}}, 0), ParameterError);
}

TEST(Histogram, CountsMatchBruteForceBinning) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t bins : {1, 7, 20, 50}) {
        std::vector<double> v(2000);
        for (auto& x : v) x = u(rng);
        // Exact edges must land in the bin they open.
        for (std::size_t b = 0; b <= bins; ++b) v.push_back(-1.0 + 2.0 * static_cast<double>(b) / static_cast<double>(bins));
        HistogramSpec h = cosine_histogram({{A, v}}, bins);
        std::vector<std::size_t> ref(bins, 0);
        for (double x : v) {
            std::size_t b = 0;
            while (b + 1 < bins && x >= h.bin_edges[b + 1]) ++b;
            ++ref[b];
        }
        EXPECT_EQ(h.counts.at(A), ref) << bins;
    }
}

TEST(Histogram, TsvRoundTrip) {
    HistogramSpec h = cosine_histogram({{A, {0.1, 0.2}}, {Label::shuffled_antonym, {-0.3}}}, 10);
    HistogramSpec back = histogram_from_tsv(histogram_to_tsv(h));
    EXPECT_EQ(back.counts, h.counts);
    ASSERT_EQ(back.bin_edges.size(), h.bin_edges.size());
    for (std::size_t i = 0; i < h.bin_edges.size(); ++i) EXPECT_NEAR(back.bin_edges[i], h.bin_edges[i], 1e-9);
}

TEST(KolmogorovSmirnov, KnownValues) {
    EXPECT_DOUBLE_EQ(ks_statistic({1, 2, 3}, {1, 2, 3}), 0.0);
    EXPECT_DOUBLE_EQ(ks_statistic({1, 2}, {3, 4}), 1.0);
    EXPECT_DOUBLE_EQ(ks_statistic({1, 3}, {2, 4}), 0.5);
    EXPECT_THROW(ks_statistic({}, {1}), DataError);
}

TEST(KolmogorovSmirnov, MatchesEcdfScan) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    for (int inst = 0; inst < 50; ++inst) {
        std::vector<double> a(1 + rng() % 40), b(1 + rng() % 40);
        for (auto& x : a) x = std::round(nd(rng) * 4) / 4;  // rounding forces ties
        for (auto& x : b) x = std::round((nd(rng) + 0.3) * 4) / 4;
        double ref = 0;
        std::vector<double> all = a;
        all.insert(all.end(), b.begin(), b.end());
        for (double t : all) {
            double fa = 0, fb = 0;
            for (double x : a) fa += x <= t;
            for (double x : b) fb += x <= t;
            ref = std::max(ref, std::abs(fa / static_cast<double>(a.size()) - fb / static_cast<double>(b.size())));
        }
        EXPECT_NEAR(ks_statistic(a, b), ref, 1e-15);
    }
}

TEST(Tables, LayoutAndMissingCells) {
    TableGrid g;
    g[EmbeddingSource::word2vec][{false, Classifier::lr}] = 0.5;
    g[EmbeddingSource::word2vec][{true, Classifier::kmeans}] = 0.87654;
    RenderedTable t = emit_tables(g, TableLayout::table3);
    std::vector<std::string> lines;
    std::string cur;
    for (char c : t.csv) {
        if (c == '\n') lines.push_back(cur), cur.clear();
        else cur += c;
    }
    ASSERT_EQ(lines.size(), 7u);
    EXPECT_EQ(lines[0], "Model,Non-UMAP,Non-UMAP,Non-UMAP,Non-UMAP,UMAP,UMAP,UMAP,UMAP");
    EXPECT_EQ(lines[1], "Model,LR,ShallowNN,KMeans,Spectral,LR,ShallowNN,KMeans,Spectral");
    EXPECT_EQ(lines[2], "word2vec,0.5000,\xE2\x80\x94,\xE2\x80\x94,\xE2\x80\x94,\xE2\x80\x94,\xE2\x80\x94,0.8765,\xE2\x80\x94");
    EXPECT_EQ(lines[4].substr(0, 23), "BERT (bert-base-cased),");
    EXPECT_EQ(t.text.rfind(std::string(table_title(TableLayout::table3)), 0), 0u);
    EXPECT_NE(emit_tables(g, TableLayout::table4).text, t.text);
}

TEST(Tables, TextColumnsAlignInGlyphs) {
    TableGrid g;
    g[EmbeddingSource::glove][{true, Classifier::nn}] = 0.75;
    std::string text = emit_tables(g, TableLayout::table4).text;
    auto glyphs = [](const std::string& s) {
        std::size_t n = 0;
        for (unsigned char c : s) n += (c & 0xC0) != 0x80;
        return n;
    };
    std::vector<std::size_t> widths;
    std::string cur;
    int line = 0;
    for (char c : text) {
        if (c != '\n') {
            cur += c;
            continue;
        }
        if (++line >= 4) widths.push_back(glyphs(cur));  // classifier header and model rows
        cur.clear();
    }
    ASSERT_EQ(widths.size(), 6u);
    for (std::size_t w : widths) EXPECT_EQ(w, widths.front());
}

TEST(Tables, MeanCells) {
    std::map<TableColumn, std::vector<double>> cells{{{true, Classifier::lr}, {0.5, 0.7}}};
    EXPECT_DOUBLE_EQ(mean_cells(cells).at({true, Classifier::lr}), 0.6);
}

TEST(NeighbourVote, MatchesBruteForce) {
    std::mt19937_64 rng(6);
    for (int inst = 0; inst < 20; ++inst) {
        Matrix x = testing_support::random_matrix(rng, 60, 2);
        std::vector<int> l;
        for (int i = 0; i < 60; ++i) l.push_back(static_cast<int>(rng() % 2));
        const std::size_t k = 1 + static_cast<std::size_t>(inst % 10);
        std::size_t agree = 0;
        for (long i = 0; i < 60; ++i) {
            auto nb = testing_support::brute_neighbours(x, i, k, testing_support::naive_euclidean);
            std::size_t same = 0;
            for (const auto& [d, j] : nb) same += l[static_cast<std::size_t>(j)] == l[static_cast<std::size_t>(i)];
            agree += 2 * same > k;
        }
        EXPECT_DOUBLE_EQ(neighbour_vote_agreement(x, l, k), static_cast<double>(agree) / 60.0);
    }
}
