#pragma once

// Transductive labelling: cluster train and test points together and let the
// train points in each cluster vote on its label.

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "swirl/classify/kmeans.hpp"
#include "swirl/classify/spectral.hpp"
#include "swirl/error.hpp"
#include "swirl/types.hpp"

namespace swirl {

enum class Clusterer : std::uint8_t { kmeans, spectral };

inline std::string_view to_string(Clusterer c) { return c == Clusterer::kmeans ? "kmeans" : "spectral"; }

struct ClusterVote {
    Label label = Label::antonym;
    /// Share of the cluster's train votes that went to `label`; 0 when the
    /// cluster held no train points.
    double margin = 0;
    std::size_t antonym_votes = 0;
    std::size_t synonym_votes = 0;
    /// How the label was decided: "majority", "tie: global majority",
    /// "tie: fixed order" or "nearest labelled cluster <id>".
    std::string decision;
};

struct TransduceConfig {
    Clusterer clusterer = Clusterer::kmeans;
    std::size_t k = 10;
    std::uint64_t seed = 42;
    std::size_t affinity_neighbors = 15;
    std::size_t n_init = 10;
};

struct TransductiveResult {
    /// Row indices (into the input) of the test points, ascending.
    std::vector<std::size_t> test_rows;
    /// One label per entry of test_rows.
    std::vector<Label> predicted;
    std::map<int, ClusterVote> per_cluster_vote;
    ClusterAssignment assignment;  // over the clustered rows
    TransduceConfig config;
};

/// Rows tagged train or test are clustered jointly; other rows are ignored.
/// Train labels must be antonym or synonym.
inline TransductiveResult transduce(const Matrix& points, const std::vector<Label>& labels,
                                    const std::vector<Split>& splits, const TransduceConfig& cfg) {
    const auto n = static_cast<std::size_t>(points.rows());
    if (labels.size() != n || splits.size() != n) throw ParameterError("transduce: row count mismatch");

    std::vector<std::size_t> rows;
    std::size_t global_ant = 0, global_syn = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (splits[i] != Split::train && splits[i] != Split::test) continue;
        rows.push_back(i);
        if (splits[i] != Split::train) continue;
        if (labels[i] == Label::antonym) ++global_ant;
        else if (labels[i] == Label::synonym) ++global_syn;
        else throw DataError("transduce: train rows must be antonym or synonym, got " + std::string(to_string(labels[i])));
    }
    if (global_ant + global_syn == 0) throw DataError("transduce: no train points");

    Matrix x(static_cast<Eigen::Index>(rows.size()), points.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) x.row(static_cast<Eigen::Index>(r)) = points.row(static_cast<Eigen::Index>(rows[r]));

    TransductiveResult res;
    res.config = cfg;
    res.assignment = cfg.clusterer == Clusterer::kmeans
                         ? kmeans(x, cfg.k, derive_seed(cfg.seed, "transduce-kmeans"), cfg.n_init)
                         : spectral_cluster(x, cfg.k, cfg.affinity_neighbors, derive_seed(cfg.seed, "transduce-spectral"));
    const auto& ids = res.assignment.cluster_id;

    // Centroids in the input space, whatever space the clusterer worked in.
    const auto k = static_cast<Eigen::Index>(res.assignment.k);
    Matrix centroid = Matrix::Zero(k, x.cols());
    std::vector<std::size_t> members(res.assignment.k, 0);
    std::map<int, ClusterVote> votes;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        centroid.row(ids[r]) += x.row(static_cast<Eigen::Index>(r));
        ++members[static_cast<std::size_t>(ids[r])];
        auto& v = votes[ids[r]];
        if (splits[rows[r]] == Split::train) (labels[rows[r]] == Label::antonym ? v.antonym_votes : v.synonym_votes)++;
    }
    for (Eigen::Index c = 0; c < k; ++c)
        if (members[static_cast<std::size_t>(c)]) centroid.row(c) /= static_cast<double>(members[static_cast<std::size_t>(c)]);

    const Label global = global_ant >= global_syn ? Label::antonym : Label::synonym;
    const bool global_tie = global_ant == global_syn;
    std::vector<int> labelled;
    for (auto& [c, v] : votes) {
        const std::size_t total = v.antonym_votes + v.synonym_votes;
        if (total == 0) continue;
        labelled.push_back(c);
        if (v.antonym_votes != v.synonym_votes) {
            v.label = v.antonym_votes > v.synonym_votes ? Label::antonym : Label::synonym;
            v.decision = "majority";
        } else {
            v.label = global;
            v.decision = global_tie ? "tie: fixed order" : "tie: global majority";
        }
        v.margin = static_cast<double>(v.label == Label::antonym ? v.antonym_votes : v.synonym_votes) /
                   static_cast<double>(total);
    }
    for (auto& [c, v] : votes) {
        if (v.antonym_votes + v.synonym_votes) continue;
        double best = std::numeric_limits<double>::infinity();
        int arg = labelled.front();
        for (int l : labelled) {
            double d = (centroid.row(c) - centroid.row(l)).squaredNorm();
            if (d < best) {
                best = d;
                arg = l;
            }
        }
        v.label = votes[arg].label;
        v.margin = 0;
        v.decision = "nearest labelled cluster " + std::to_string(arg);
    }

    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (splits[rows[r]] != Split::test) continue;
        res.test_rows.push_back(rows[r]);
        res.predicted.push_back(votes[ids[r]].label);
    }
    res.per_cluster_vote = std::move(votes);
    return res;
}

}  // namespace swirl
