#pragma once

// Point clouds built from embedded word pairs.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "swirl/embedstore.hpp"
#include "swirl/io.hpp"
#include "swirl/pairdata.hpp"
#include "swirl/types.hpp"

namespace swirl {

enum class Construction : std::uint8_t { difference, concatenation };

inline std::string_view to_string(Construction c) {
    return c == Construction::difference ? "diff" : "concat";
}

inline Construction parse_construction(std::string_view s) {
    if (s == "diff" || s == "difference") return Construction::difference;
    if (s == "concat" || s == "concatenation") return Construction::concatenation;
    throw ParseError("unknown vector construction '" + std::string(s) + "'");
}

/// One row per word pair; labels and split tags are row-aligned.
struct LabeledCloud {
    Matrix points;
    std::vector<Label> labels;
    std::vector<Split> split_tags;
    Construction construction = Construction::difference;
    std::vector<WordPair> source_pairs;

    std::size_t rows() const noexcept { return labels.size(); }
};

namespace detail {

template <class RowFn>
LabeledCloud build_cloud(const std::vector<PairDataset>& data, const EmbeddingStore& store, Construction c,
                         RowFn&& fill_row) {
    std::size_t n = 0;
    for (const auto& d : data) n += d.size();
    const std::size_t width = c == Construction::difference ? store.dim() : 2 * store.dim();
    LabeledCloud cloud;
    cloud.construction = c;
    cloud.points.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width));
    cloud.labels.reserve(n);
    cloud.split_tags.reserve(n);
    cloud.source_pairs.reserve(n);
    Eigen::Index row = 0;
    for (const auto& d : data)
        for (const auto& p : d.pairs) {
            auto e1 = store.lookup(p.word1);
            auto e2 = store.lookup(p.word2);
            fill_row(cloud.points.row(row), e1, e2);
            cloud.labels.push_back(p.label);
            cloud.split_tags.push_back(p.split);
            cloud.source_pairs.push_back(p);
            ++row;
        }
    return cloud;
}

}  // namespace detail

/// Row i = E(word2_i) - E(word1_i), datasets concatenated in order.
inline LabeledCloud difference_cloud(const std::vector<PairDataset>& data, const EmbeddingStore& store) {
    return detail::build_cloud(data, store, Construction::difference, [](auto row, auto e1, auto e2) {
        for (std::size_t j = 0; j < e1.size(); ++j)
            row(static_cast<Eigen::Index>(j)) = static_cast<double>(e2[j]) - static_cast<double>(e1[j]);
    });
}

/// Row i = E(word1_i) followed by E(word2_i).
inline LabeledCloud concat_cloud(const std::vector<PairDataset>& data, const EmbeddingStore& store) {
    return detail::build_cloud(data, store, Construction::concatenation, [](auto row, auto e1, auto e2) {
        const std::size_t d = e1.size();
        for (std::size_t j = 0; j < d; ++j) {
            row(static_cast<Eigen::Index>(j)) = e1[j];
            row(static_cast<Eigen::Index>(d + j)) = e2[j];
        }
    });
}

inline LabeledCloud make_cloud(const std::vector<PairDataset>& data, const EmbeddingStore& store, Construction c) {
    return c == Construction::difference ? difference_cloud(data, store) : concat_cloud(data, store);
}

inline double cosine_similarity(std::span<const float> a, std::span<const float> b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        dot += static_cast<double>(a[j]) * b[j];
        na += static_cast<double>(a[j]) * a[j];
        nb += static_cast<double>(b[j]) * b[j];
    }
    double c = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::clamp(c, -1.0, 1.0);
}

/// Cosine similarity between the two words of every pair.
inline std::vector<double> pair_cosines(const PairDataset& data, const EmbeddingStore& store) {
    std::vector<double> out;
    out.reserve(data.size());
    auto nonzero = [](std::span<const float> v) {
        for (float x : v)
            if (x != 0.0f) return true;
        return false;
    };
    for (const auto& p : data.pairs) {
        auto e1 = store.lookup(p.word1);
        auto e2 = store.lookup(p.word2);
        if (!nonzero(e1)) throw NumericError("zero-norm embedding for '" + p.word1 + "'");
        if (!nonzero(e2)) throw NumericError("zero-norm embedding for '" + p.word2 + "'");
        out.push_back(cosine_similarity(e1, e2));
    }
    return out;
}

/// Rows whose label satisfies `keep`, preserving order.
template <class Pred>
LabeledCloud select_rows(const LabeledCloud& cloud, Pred&& keep) {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < cloud.rows(); ++i)
        if (keep(i)) rows.push_back(static_cast<Eigen::Index>(i));
    LabeledCloud out;
    out.construction = cloud.construction;
    out.points.resize(static_cast<Eigen::Index>(rows.size()), cloud.points.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.points.row(static_cast<Eigen::Index>(r)) = cloud.points.row(rows[r]);
        auto i = static_cast<std::size_t>(rows[r]);
        out.labels.push_back(cloud.labels[i]);
        out.split_tags.push_back(cloud.split_tags[i]);
        out.source_pairs.push_back(cloud.source_pairs[i]);
    }
    return out;
}

/// TSV: label, split, word1, word2, then one column per coordinate.
inline std::string cloud_to_tsv(const LabeledCloud& cloud) {
    std::string out;
    for (std::size_t i = 0; i < cloud.rows(); ++i) {
        const auto& p = cloud.source_pairs[i];
        out += to_string(cloud.labels[i]);
        out += '\t';
        out += to_string(cloud.split_tags[i]);
        out += '\t';
        out += p.word1;
        out += '\t';
        out += p.word2;
        for (Eigen::Index j = 0; j < cloud.points.cols(); ++j) {
            out += '\t';
            out += io::format_double(cloud.points(static_cast<Eigen::Index>(i), j), 17);
        }
        out += '\n';
    }
    return out;
}

/// Inverse of cloud_to_tsv. The format carries no part of speech, so pairs
/// come back tagged as adjectives.
inline LabeledCloud cloud_from_tsv(std::string_view text, Construction construction = Construction::difference) {
    LabeledCloud cloud;
    cloud.construction = construction;
    std::vector<std::vector<double>> rows;
    io::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (line.empty()) return;
        auto f = io::split(line, '\t');
        if (f.size() < 5) throw ParseError("cloud: line " + std::to_string(line_no) + " has too few columns", line_no);
        if (!rows.empty() && f.size() - 4 != rows.front().size())
            throw ParseError("cloud: line " + std::to_string(line_no) + " has inconsistent width", line_no);
        Label label = parse_label(f[0]);
        Split split = parse_split(f[1]);
        cloud.labels.push_back(label);
        cloud.split_tags.push_back(split);
        cloud.source_pairs.push_back(WordPair{std::string(f[2]), std::string(f[3]), Pos::adjective, label, split});
        std::vector<double> r;
        for (std::size_t j = 4; j < f.size(); ++j) r.push_back(std::stod(std::string(f[j])));
        rows.push_back(std::move(r));
    });
    const Eigen::Index d = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
    cloud.points.resize(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (Eigen::Index j = 0; j < d; ++j) cloud.points(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
    return cloud;
}

}  // namespace swirl
