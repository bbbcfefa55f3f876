#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "swirl/io.hpp"
#include "swirl/vectorize.hpp"

namespace swirl {

enum class Method : std::uint8_t { umap, tsne, pca };

inline std::string_view to_string(Method m) {
    switch (m) {
        case Method::umap: return "umap";
        case Method::tsne: return "tsne";
        case Method::pca: return "pca";
    }
    return "?";
}

inline Method parse_method(std::string_view s) {
    for (Method m : {Method::umap, Method::tsne, Method::pca})
        if (to_string(m) == s) return m;
    throw ParseError("unknown projection method '" + std::string(s) + "'");
}

/// 2-D coordinates with the labels of the cloud they came from.
struct Projection {
    Matrix coords;  // N x 2
    std::vector<Label> labels;
    std::vector<Split> split_tags;
    std::vector<WordPair> source_pairs;
    Method method = Method::umap;
    /// Canonical "key=value" rendering of the run parameters.
    std::string params_digest;
    /// The same parameters, for captions.
    std::map<std::string, std::string> params;

    std::size_t rows() const noexcept { return labels.size(); }
};

inline std::string make_params_digest(Method m, const std::map<std::string, std::string>& params) {
    std::string out(to_string(m));
    for (const auto& [k, v] : params) out += " " + k + "=" + v;
    return out;
}

inline Projection attach_labels(Matrix coords, const LabeledCloud& cloud, Method m,
                                std::map<std::string, std::string> params) {
    Projection p;
    p.coords = std::move(coords);
    p.labels = cloud.labels;
    p.split_tags = cloud.split_tags;
    p.source_pairs = cloud.source_pairs;
    p.method = m;
    p.params_digest = make_params_digest(m, params);
    p.params = std::move(params);
    for (Eigen::Index i = 0; i < p.coords.rows(); ++i)
        for (Eigen::Index j = 0; j < p.coords.cols(); ++j)
            if (!std::isfinite(p.coords(i, j))) throw NumericError("projection produced a non-finite coordinate");
    return p;
}

/// TSV with a header: x, y, label, split, word1, word2.
inline std::string projection_to_tsv(const Projection& p) {
    std::string out = "x\ty\tlabel\tsplit\tword1\tword2\n";
    for (std::size_t i = 0; i < p.rows(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        out += io::format_double(p.coords(r, 0), 17);
        out += '\t';
        out += io::format_double(p.coords(r, 1), 17);
        out += '\t';
        out += to_string(p.labels[i]);
        out += '\t';
        out += to_string(p.split_tags[i]);
        out += '\t';
        out += p.source_pairs[i].word1;
        out += '\t';
        out += p.source_pairs[i].word2;
        out += '\n';
    }
    return out;
}

inline void write_projection_tsv(const std::filesystem::path& path, const Projection& p) {
    io::write_file_atomic(path, projection_to_tsv(p));
}

inline Projection projection_from_tsv(std::string_view text) {
    Projection p;
    std::vector<std::pair<double, double>> xy;
    io::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (line_no == 1 || line.empty()) return;
        auto f = io::split(line, '\t');
        if (f.size() != 6) throw ParseError("projection: line " + std::to_string(line_no) + " needs 6 columns", line_no);
        xy.emplace_back(std::stod(std::string(f[0])), std::stod(std::string(f[1])));
        Label l = parse_label(f[2]);
        Split s = parse_split(f[3]);
        p.labels.push_back(l);
        p.split_tags.push_back(s);
        p.source_pairs.push_back(WordPair{std::string(f[4]), std::string(f[5]), Pos::adjective, l, s});
    });
    p.coords.resize(static_cast<Eigen::Index>(xy.size()), 2);
    for (std::size_t i = 0; i < xy.size(); ++i) {
        p.coords(static_cast<Eigen::Index>(i), 0) = xy[i].first;
        p.coords(static_cast<Eigen::Index>(i), 1) = xy[i].second;
    }
    return p;
}

}  // namespace swirl
