#pragma once

// One cell of the results tables: difference vectors of antonym, synonym and
// shuffled-control pairs, an optional joint UMAP projection, then either a
// supervised classifier or transductive cluster voting on the real pairs.

#include <string>
#include <vector>

#include "swirl/classify/logreg.hpp"
#include "swirl/classify/shallow_nn.hpp"
#include "swirl/classify/transduce.hpp"
#include "swirl/embedstore.hpp"
#include "swirl/eval.hpp"
#include "swirl/pairdata.hpp"
#include "swirl/reduce/umap.hpp"
#include "swirl/vectorize.hpp"

namespace swirl {

enum class Classifier : std::uint8_t { lr, nn, kmeans, spectral };

inline constexpr std::array<Classifier, 4> kAllClassifiers{Classifier::lr, Classifier::nn, Classifier::kmeans,
                                                           Classifier::spectral};

inline std::string_view to_string(Classifier c) {
    switch (c) {
        case Classifier::lr: return "lr";
        case Classifier::nn: return "nn";
        case Classifier::kmeans: return "kmeans";
        case Classifier::spectral: return "spectral";
    }
    return "?";
}

inline std::string_view display_name(Classifier c) {
    switch (c) {
        case Classifier::lr: return "LR";
        case Classifier::nn: return "ShallowNN";
        case Classifier::kmeans: return "KMeans";
        case Classifier::spectral: return "Spectral";
    }
    return "?";
}

inline Classifier parse_classifier(std::string_view s) {
    for (Classifier c : kAllClassifiers)
        if (to_string(c) == s) return c;
    throw ParseError("unknown classifier '" + std::string(s) + "'");
}

struct CellConfig {
    bool use_umap = true;
    Classifier classifier = Classifier::kmeans;
    UmapParams umap;
    std::size_t k = 10;
    std::size_t affinity_neighbors = 15;
    std::size_t n_init = 10;
    NNParams nn;
    double l2_penalty = 1.0;
    std::uint64_t seed = 42;

    std::string digest() const {
        std::string s = std::string(use_umap ? "umap" : "raw") + " classifier=" + std::string(to_string(classifier)) +
                        " seed=" + std::to_string(seed);
        if (use_umap)
            s += " n_neighbors=" + std::to_string(umap.n_neighbors) + " min_dist=" + io::format_double(umap.min_dist, 6) +
                 " metric=" + std::string(to_string(umap.metric));
        if (classifier == Classifier::kmeans || classifier == Classifier::spectral) s += " k=" + std::to_string(k);
        if (classifier == Classifier::spectral) s += " affinity_neighbors=" + std::to_string(affinity_neighbors);
        if (classifier == Classifier::nn)
            s += " hidden=" + std::to_string(nn.hidden_width) + " epochs=" + std::to_string(nn.epochs);
        if (classifier == Classifier::lr) s += " l2=" + io::format_double(l2_penalty, 6);
        return s;
    }
};

/// Shuffled controls for the antonym and synonym parts of `real`, each the
/// size of its source and excluding every real pair in either orientation.
inline std::vector<PairDataset> shuffled_controls(const PairDataset& real, std::uint64_t seed) {
    PairDataset ant{"antonym", {}}, syn{"synonym", {}};
    for (const auto& p : real.pairs) {
        if (p.label == Label::antonym) ant.pairs.push_back(p);
        else if (p.label == Label::synonym) syn.pairs.push_back(p);
    }
    const auto exclude = pair_keys({real});
    std::vector<PairDataset> out;
    if (!ant.empty()) out.push_back(make_shuffled(ant, derive_seed(seed, "shuffle-antonym"), ant.size(), exclude));
    if (!syn.empty()) out.push_back(make_shuffled(syn, derive_seed(seed, "shuffle-synonym"), syn.size(), exclude));
    return out;
}

struct CellRun {
    EvalReport report;
    /// Test rows in cloud order with their predictions.
    std::vector<WordPair> test_pairs;
    std::vector<Label> predicted;
};

/// Classifier input for every real pair: the 2-D joint projection of real and
/// shuffled pairs, or the raw difference vectors. Row i belongs to pair i of
/// the real dataset, so any split of that dataset indexes it directly.
struct CellFeatures {
    Matrix features;
    std::vector<WordPair> real_pairs;
    bool projected = false;
};

/// The projection sees no split information, so one set of features serves
/// every classifier and split for a given seed.
inline CellFeatures prepare_features(const EmbeddingStore& store, const PairDataset& real, bool use_umap,
                                     const UmapParams& umap_params, std::uint64_t seed) {
    for (const auto& p : real.pairs)
        if (p.label != Label::antonym && p.label != Label::synonym)
            throw DataError("run_table_cell: real pairs must be antonym or synonym");
    std::vector<PairDataset> parts{real};
    // Controls only matter to the projection.
    if (use_umap)
        for (auto& s : shuffled_controls(real, derive_seed(seed, "controls"))) parts.push_back(std::move(s));
    LabeledCloud cloud = difference_cloud(parts, store);
    CellFeatures f;
    f.projected = use_umap;
    f.real_pairs = real.pairs;
    if (use_umap) {
        UmapParams up = umap_params;
        up.seed = derive_seed(seed, "umap");
        // Shuffled rows leave the picture after the projection.
        f.features = umap_embed(cloud.points, up).topRows(static_cast<Eigen::Index>(real.size()));
    } else {
        f.features = std::move(cloud.points);
    }
    return f;
}

/// Trains or votes on the train rows of `split` and scores its test rows.
/// Rows outside both sides are left out.
inline CellRun classify_cell(const CellFeatures& f, const SplitSpec& split, const CellConfig& cfg) {
    const std::size_t n_real = f.real_pairs.size();
    std::vector<Split> tags(n_real, Split::none);
    for (std::size_t i : split.train) tags.at(i) = Split::train;
    for (std::size_t i : split.test) tags.at(i) = Split::test;
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < n_real; ++i) {
        if (tags[i] == Split::train) train_rows.push_back(i);
        else if (tags[i] == Split::test) test_rows.push_back(i);
    }
    if (train_rows.empty() || test_rows.empty()) throw SplitError("run_table_cell: empty train or test side");

    auto gather = [&](const std::vector<std::size_t>& rows) {
        Matrix m(static_cast<Eigen::Index>(rows.size()), f.features.cols());
        for (std::size_t r = 0; r < rows.size(); ++r)
            m.row(static_cast<Eigen::Index>(r)) = f.features.row(static_cast<Eigen::Index>(rows[r]));
        return m;
    };
    auto binary = [&](const std::vector<std::size_t>& rows) {
        std::vector<int> y;
        y.reserve(rows.size());
        for (std::size_t i : rows) y.push_back(f.real_pairs[i].label == Label::antonym ? 1 : 0);
        return y;
    };
    auto from_binary = [](const std::vector<int>& y) {
        std::vector<Label> out;
        out.reserve(y.size());
        for (int v : y) out.push_back(v ? Label::antonym : Label::synonym);
        return out;
    };

    CellRun run;
    switch (cfg.classifier) {
        case Classifier::lr: {
            LinearModel m = fit_logreg(gather(train_rows), binary(train_rows), cfg.l2_penalty);
            run.predicted = from_binary(predict(m, gather(test_rows)));
            break;
        }
        case Classifier::nn: {
            NNParams np = cfg.nn;
            np.seed = derive_seed(cfg.seed, "nn");
            NNModel m = fit_shallow_nn(gather(train_rows), binary(train_rows), np);
            run.predicted = from_binary(predict(m, gather(test_rows)));
            break;
        }
        case Classifier::kmeans:
        case Classifier::spectral: {
            std::vector<Label> labels;
            labels.reserve(n_real);
            for (const auto& p : f.real_pairs) labels.push_back(p.label);
            TransduceConfig tc;
            tc.clusterer = cfg.classifier == Classifier::kmeans ? Clusterer::kmeans : Clusterer::spectral;
            tc.k = cfg.k;
            tc.seed = derive_seed(cfg.seed, "transduce");
            tc.affinity_neighbors = cfg.affinity_neighbors;
            tc.n_init = cfg.n_init;
            TransductiveResult tr = transduce(f.features, labels, tags, tc);
            run.predicted = std::move(tr.predicted);
            break;
        }
    }

    std::vector<Label> gold;
    std::vector<Pos> pos;
    for (std::size_t i : test_rows) {
        gold.push_back(f.real_pairs[i].label);
        pos.push_back(f.real_pairs[i].pos);
        run.test_pairs.push_back(f.real_pairs[i]);
        run.test_pairs.back().split = Split::test;
    }
    run.report = score(run.predicted, gold, pos, cfg.digest());
    return run;
}

/// Runs one table cell. `real` holds the antonym and synonym pairs (all words
/// covered by `store`); `split` indexes into it. Pairs outside both sides of
/// the split still take part in the projection.
inline CellRun run_table_cell_detailed(const EmbeddingStore& store, const PairDataset& real, const SplitSpec& split,
                                       const CellConfig& cfg) {
    return classify_cell(prepare_features(store, real, cfg.use_umap, cfg.umap, cfg.seed), split, cfg);
}

inline EvalReport run_table_cell(const EmbeddingStore& store, const PairDataset& real, const SplitSpec& split,
                                 const CellConfig& cfg) {
    return run_table_cell_detailed(store, real, split, cfg).report;
}

/// The antonym and synonym pairs whose words both have vectors, merged into
/// one dataset in that order.
inline PairDataset covered_real_pairs(const PairDataset& antonyms, const PairDataset& synonyms,
                                      const EmbeddingStore& store) {
    return merge({filter_pairs(antonyms, store), filter_pairs(synonyms, store)}, "real");
}

}  // namespace swirl
