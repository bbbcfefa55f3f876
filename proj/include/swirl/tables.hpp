#pragma once

// Results tables: five embedding models by eight (projection, classifier)
// columns, as CSV and as aligned text.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swirl/classify/pipeline.hpp"
#include "swirl/embedstore.hpp"
#include "swirl/io.hpp"

namespace swirl {

enum class TableLayout : std::uint8_t { table3, table4 };

inline std::string_view table_title(TableLayout l) {
    return l == TableLayout::table3 ? "Test accuracy, lexical split" : "Test accuracy, Stuttgart split";
}

inline constexpr std::array<EmbeddingSource, 5> kTableRows{EmbeddingSource::word2vec, EmbeddingSource::glove,
                                                           EmbeddingSource::bert_table, EmbeddingSource::api_small,
                                                           EmbeddingSource::api_large};

inline std::string_view row_name(EmbeddingSource s) {
    switch (s) {
        case EmbeddingSource::word2vec: return "word2vec";
        case EmbeddingSource::glove: return "glove";
        case EmbeddingSource::bert_table: return "BERT (bert-base-cased)";
        case EmbeddingSource::api_small: return "text-embedding-3-small";
        case EmbeddingSource::api_large: return "text-embedding-3-large";
    }
    return "?";
}

struct TableColumn {
    bool use_umap = false;
    Classifier classifier = Classifier::lr;
    auto operator<=>(const TableColumn&) const = default;
};

/// Non-UMAP columns first, each group in LR, ShallowNN, KMeans, Spectral order.
inline std::vector<TableColumn> table_columns() {
    std::vector<TableColumn> cols;
    for (bool u : {false, true})
        for (Classifier c : kAllClassifiers) cols.push_back({u, c});
    return cols;
}

/// Cell values (typically mean accuracy over seeds) keyed by model and column.
using TableGrid = std::map<EmbeddingSource, std::map<TableColumn, double>>;

inline constexpr std::string_view kMissingCell = "\xE2\x80\x94";  // U+2014

struct RenderedTable {
    std::string csv;
    std::string text;
};

inline std::string format_cell(const TableGrid& grid, EmbeddingSource row, const TableColumn& col) {
    auto r = grid.find(row);
    if (r == grid.end()) return std::string(kMissingCell);
    auto c = r->second.find(col);
    if (c == r->second.end()) return std::string(kMissingCell);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", c->second);
    return buf;
}

inline RenderedTable emit_tables(const TableGrid& grid, TableLayout layout) {
    const auto cols = table_columns();
    RenderedTable out;
    // CSV: two header rows (projection group, classifier).
    out.csv = "Model";
    for (const auto& c : cols) out.csv += std::string(",") + (c.use_umap ? "UMAP" : "Non-UMAP");
    out.csv += "\nModel";
    for (const auto& c : cols) out.csv += "," + std::string(display_name(c.classifier));
    out.csv += '\n';
    for (EmbeddingSource row : kTableRows) {
        out.csv += row_name(row);
        for (const auto& c : cols) out.csv += "," + format_cell(grid, row, c);
        out.csv += '\n';
    }

    // Text: fixed-width columns. The missing-cell mark is one glyph but three
    // bytes, so widths are counted in glyphs.
    auto glyphs = [](const std::string& s) {
        std::size_t n = 0;
        for (unsigned char ch : s)
            if ((ch & 0xC0) != 0x80) ++n;
        return n;
    };
    auto pad = [&](const std::string& s, std::size_t w) { return s + std::string(w > glyphs(s) ? w - glyphs(s) : 0, ' '); };
    std::size_t name_w = 5;
    for (EmbeddingSource r : kTableRows) name_w = std::max(name_w, row_name(r).size());
    const std::size_t cell_w = 10;
    out.text = std::string(table_title(layout)) + "\n\n";
    out.text += pad("", name_w) + "  " + pad("Non-UMAP", cell_w * 4) + pad("UMAP", cell_w * 4) + '\n';
    out.text += pad("Model", name_w) + "  ";
    for (const auto& c : cols) out.text += pad(std::string(display_name(c.classifier)), cell_w);
    out.text += '\n';
    for (EmbeddingSource row : kTableRows) {
        out.text += pad(std::string(row_name(row)), name_w) + "  ";
        for (const auto& c : cols) out.text += pad(format_cell(grid, row, c), cell_w);
        out.text += '\n';
    }
    return out;
}

inline SplitSpec make_split(const PairDataset& real, SplitMode mode, double test_fraction, std::uint64_t seed) {
    return mode == SplitMode::stuttgart ? stuttgart_split(real)
                                        : lexical_split(real, test_fraction, derive_seed(seed, "lexical-split"));
}

struct SweepConfig {
    std::vector<std::uint64_t> seeds{1, 2, 3};
    /// Everything except use_umap, classifier and seed, which vary per cell.
    CellConfig base;
    std::vector<TableColumn> columns = table_columns();
    SplitMode split = SplitMode::stuttgart;
    double test_fraction = 0.2;
};

struct SweepResult {
    /// One entry per seed, in seed order.
    std::map<TableColumn, std::vector<double>> accuracy;
    std::map<TableColumn, std::vector<double>> macro_f1;
};

/// All requested cells of one table row. The projection is computed once per
/// seed and shared by the four classifiers.
template <class Progress>
SweepResult sweep_model(const EmbeddingStore& store, const PairDataset& real, const SweepConfig& cfg,
                        Progress&& progress) {
    SweepResult res;
    for (std::uint64_t seed : cfg.seeds) {
        const SplitSpec split = make_split(real, cfg.split, cfg.test_fraction, seed);
        for (bool use_umap : {false, true}) {
            std::vector<TableColumn> cols;
            for (const auto& c : cfg.columns)
                if (c.use_umap == use_umap) cols.push_back(c);
            if (cols.empty()) continue;
            const CellFeatures f = prepare_features(store, real, use_umap, cfg.base.umap, seed);
            for (const auto& c : cols) {
                CellConfig cell = cfg.base;
                cell.use_umap = use_umap;
                cell.classifier = c.classifier;
                cell.seed = seed;
                const CellRun run = classify_cell(f, split, cell);
                res.accuracy[c].push_back(run.report.accuracy);
                res.macro_f1[c].push_back(run.report.macro_f1);
                progress(seed, c, run.report);
            }
        }
    }
    return res;
}

inline SweepResult sweep_model(const EmbeddingStore& store, const PairDataset& real, const SweepConfig& cfg) {
    return sweep_model(store, real, cfg, [](std::uint64_t, const TableColumn&, const EvalReport&) {});
}

/// Seed means of a sweep, ready for a TableGrid row.
inline std::map<TableColumn, double> mean_cells(const std::map<TableColumn, std::vector<double>>& cells) {
    std::map<TableColumn, double> out;
    for (const auto& [c, v] : cells)
        if (!v.empty()) out[c] = aggregate(v).mean;
    return out;
}

}  // namespace swirl
