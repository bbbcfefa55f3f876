// Oracle acceptance gate: one PASS/FAIL line per criterion, synthetic data
// only. Exit status 0 iff every criterion passes.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>

#include "support.hpp"
#include "swirl/swirl.hpp"

using namespace swirl;
namespace ts = testing_support;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int g_failed = 0;

void criterion(const char* name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %-28s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++g_failed;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome knn_exact() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    std::size_t mismatches = 0, rows = 0;
    for (int inst = 0; inst < 100; ++inst) {
        const long n = 20 + static_cast<long>(rng() % 481);
        const long d = 2 + static_cast<long>(rng() % 49);
        const std::size_t k = 1 + rng() % std::min<std::size_t>(30, static_cast<std::size_t>(n - 1));
        Matrix x = ts::random_matrix(rng, n, d);
        // Some duplicated rows to exercise ties.
        if (inst % 5 == 0)
            for (long i = 0; i + 1 < n; i += 7) x.row(i + 1) = x.row(i);
        for (Metric m : {Metric::euclidean, Metric::cosine}) {
            KnnGraph g = knn_graph(x, k, m);
            auto dist = m == Metric::euclidean ? ts::naive_euclidean : ts::naive_cosine;
            for (long i = 0; i < n; ++i, ++rows) {
                auto ref = ts::brute_neighbours(x, i, k, dist);
                for (std::size_t j = 0; j < k; ++j)
                    if (g.index(static_cast<std::size_t>(i), j) != ref[j].second ||
                        std::abs(g.dist(static_cast<std::size_t>(i), j) - ref[j].first) > 1e-12) {
                        ++mismatches;
                        break;
                    }
            }
        }
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && secs < 60.0,
            fmt("mismatched rows %.0f of %.0f; %.1fs (limit 60s)", static_cast<double>(mismatches), static_cast<double>(rows), secs)};
}

Outcome smooth_knn() {
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0;
    std::size_t floored = 0;
    for (int r = 0; r < 1000; ++r) {
        const std::size_t k = 3 + rng() % 98;
        const double scale = std::pow(10.0, 4 * u(rng) - 2);
        std::vector<double> d(k);
        for (auto& v : d) v = scale * (0.1 + u(rng));
        std::sort(d.begin(), d.end());
        SmoothKnn s = smooth_knn_calibrate(d);
        if (s.at_floor) ++floored;
        // Residual of the defining equation, summed here independently.
        long double sum = 0;
        for (double v : d) sum += std::exp(-static_cast<long double>(std::max(0.0, v - s.rho)) / s.sigma);
        worst = std::max(worst, std::abs(static_cast<double>(sum) - std::log2(static_cast<double>(k))));
    }
    return {floored == 0 && worst < 1e-5, fmt("max residual %.3g (limit 1e-5); floored rows %.0f", worst, static_cast<double>(floored))};
}

Outcome umap_gradients() {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> coord(-3.0, 3.0), ab(0.3, 2.5), bb(0.5, 1.5);
    double worst = 0;
    int done = 0;
    while (done < 100) {
        const double yi0 = coord(rng), yi1 = coord(rng), yj0 = coord(rng), yj1 = coord(rng);
        const double a = ab(rng), b = bb(rng);
        auto sq = [&](double x0, double x1) { return (x0 - yj0) * (x0 - yj0) + (x1 - yj1) * (x1 - yj1); };
        const double s = sq(yi0, yi1);
        if (s < 0.01) continue;
        const double h = 1e-6 * std::max(1.0, std::sqrt(s));
        for (int comp = 0; comp < 2; ++comp) {
            const double e0 = comp == 0 ? h : 0, e1 = comp == 1 ? h : 0;
            const double diff = comp == 0 ? yi0 - yj0 : yi1 - yj1;
            const double fd_att = (attractive_loss(sq(yi0 + e0, yi1 + e1), a, b) - attractive_loss(sq(yi0 - e0, yi1 - e1), a, b)) / (2 * h);
            const double fd_rep = (repulsive_loss(sq(yi0 + e0, yi1 + e1), a, b) - repulsive_loss(sq(yi0 - e0, yi1 - e1), a, b)) / (2 * h);
            const double an_att = -attractive_coefficient(s, a, b) * diff;
            const double an_rep = -repulsive_coefficient(s, a, b, 1.0, 0.0) * diff;
            worst = std::max(worst, std::abs(an_att - fd_att) / std::max(std::abs(fd_att), 1e-3));
            worst = std::max(worst, std::abs(an_rep - fd_rep) / std::max(std::abs(fd_rep), 1e-3));
        }
        ++done;
    }
    return {worst < 1e-4, fmt("max relative error %.3g (limit 1e-4)", worst)};
}

Outcome pca_oracle() {
    std::mt19937_64 rng(104);
    double worst = 0;
    for (int inst = 0; inst < 5; ++inst) {
        Matrix x = ts::random_matrix(rng, 100, 50);
        for (long j = 0; j < 50; ++j) x.col(j) *= 0.5 + static_cast<double>(rng() % 100) / 25.0;
        PcaResult fit = pca_fit(x, 50);
        Matrix c = x.rowwise() - x.colwise().mean();
        auto ev = ts::jacobi_eigenvalues((c.transpose() * c) / 99.0);
        for (long k = 0; k < 50; ++k) worst = std::max(worst, std::abs(fit.explained_variance(k) - ev[static_cast<std::size_t>(49 - k)]));
    }
    return {worst < 1e-8, fmt("max |explained variance - oracle| %.3g (limit 1e-8)", worst)};
}

Outcome tsne_calibration() {
    std::mt19937_64 rng(105);
    std::vector<int> blob;
    Matrix x = ts::two_blobs(rng, 200, 10, 5.0, blob);
    TsneParams p;
    p.perplexity = 30;
    p.n_iter = 1000;
    TsneResult r = tsne_embed(x, p);
    double worst = 0;
    for (double v : r.row_perplexity) worst = std::max(worst, std::abs(v - p.perplexity));
    // Mean KL of consecutive 50-iteration windows after the exaggeration phase.
    std::size_t rises = 0;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t w = p.n_iter / 4; w + 50 <= r.kl.size(); w += 50) {
        double m = 0;
        for (std::size_t t = w; t < w + 50; ++t) m += r.kl[t];
        m /= 50;
        if (m > prev + 1e-12) ++rises;
        prev = m;
    }
    return {worst < 1e-4 && rises == 0,
            fmt("max |perplexity - 30| %.3g (limit 1e-4); KL window increases %.0f; final KL %.4f", worst, static_cast<double>(rises), r.kl.back())};
}

Outcome blobs() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(106);
    std::vector<int> blob;
    Matrix x = ts::two_blobs(rng, 200, 10, 6.0, blob);
    UmapParams up;
    const double u = neighbour_vote_agreement(umap_embed(x, up), blob, 5);
    TsneParams tp;
    const double t = neighbour_vote_agreement(tsne_embed(x, tp).coords, blob, 5);
    const double s = ts::purity(spectral_cluster(x, 2, 15, 42).cluster_id, blob);
    const double secs = seconds_since(t0);
    return {u >= 0.95 && t >= 0.95 && s >= 0.95 && secs < 120,
            fmt("umap 5-NN %.3f, t-SNE 5-NN %.3f, spectral purity %.3f (each >= 0.95)", u, t, s) +
                fmt("; %.1fs (limit 120s)", secs)};
}

Outcome transductive() {
    std::mt19937_64 rng(107);
    std::normal_distribution<double> nd(0.0, 1.0);
    EmbeddingStore store(16, EmbeddingSource::glove);
    PairDataset real{"real", {}};
    Matrix centres = 6.0 * ts::random_matrix(rng, 4, 16);
    for (int i = 0; i < 400; ++i) {
        const int blob = i % 4;
        std::vector<float> a(16), b(16);
        for (std::size_t j = 0; j < 16; ++j) {
            a[j] = static_cast<float>(nd(rng));
            b[j] = static_cast<float>(a[j] + centres(blob, static_cast<long>(j)) + 0.5 * nd(rng));
        }
        store.add("p" + std::to_string(i), a);
        store.add("q" + std::to_string(i), b);
        real.pairs.push_back({"p" + std::to_string(i), "q" + std::to_string(i), Pos::noun,
                              blob < 2 ? Label::antonym : Label::synonym, Split::none});
    }
    SplitSpec split;
    std::vector<std::size_t> order(400);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t r = 0; r < 400; ++r) (r < 80 ? split.train : split.test).push_back(order[r]);
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    std::string detail;
    bool ok = true;
    for (Classifier c : {Classifier::kmeans, Classifier::spectral}) {
        CellConfig cfg;
        cfg.classifier = c;
        const double acc = run_table_cell(store, real, split, cfg).accuracy;
        ok &= acc >= 0.98;
        detail += std::string(detail.empty() ? "" : ", ") + "UMAP+" + std::string(display_name(c)) + fmt(" %.4f", acc);
    }
    return {ok, detail + " (each >= 0.98, 20% train labels)"};
}

Outcome metric_identity() {
    std::mt19937_64 rng(108);
    double worst = 0;
    for (int inst = 0; inst < 1000; ++inst) {
        // Random 2x2 confusion matrix, then the label vectors realising it.
        std::size_t cm[2][2];
        std::size_t n = 0;
        for (auto& row : cm)
            for (auto& c : row) n += (c = rng() % 60);
        if (n == 0) cm[0][0] = n = 1;
        std::vector<Label> gold, pred;
        const Label lab[2] = {Label::antonym, Label::synonym};
        for (int g = 0; g < 2; ++g)
            for (int p = 0; p < 2; ++p)
                for (std::size_t c = 0; c < cm[g][p]; ++c) gold.push_back(lab[g]), pred.push_back(lab[p]);
        EvalReport r = score(pred, gold, std::vector<Pos>(n, Pos::noun));
        double weighted = 0;
        for (const auto& [l, m] : r.per_class) weighted += m.recall * static_cast<double>(m.support);
        worst = std::max(worst, std::abs(r.accuracy - weighted / static_cast<double>(n)));
        // And against the confusion matrix directly.
        worst = std::max(worst, std::abs(r.accuracy - static_cast<double>(cm[0][0] + cm[1][1]) / static_cast<double>(n)));
    }
    return {worst <= 1e-15, fmt("max |accuracy - weighted recall| %.3g over 1000 matrices", worst)};
}

}  // namespace

int main() {
    criterion("knn-brute-force", knn_exact);
    criterion("smooth-knn-calibration", smooth_knn);
    criterion("umap-gradients", umap_gradients);
    criterion("pca-eigen-oracle", pca_oracle);
    criterion("tsne-perplexity-kl", tsne_calibration);
    criterion("two-blob-sanity", blobs);
    criterion("transductive-pipeline", transductive);
    criterion("metric-identity", metric_identity);
    std::printf("%d of 8 oracle criteria failed\n", g_failed);
    return g_failed ? 1 : 0;
}
