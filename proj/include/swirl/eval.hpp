#pragma once

// Classification metrics and cosine-similarity histograms.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "swirl/error.hpp"
#include "swirl/io.hpp"
#include "swirl/reduce/knn.hpp"
#include "swirl/types.hpp"

namespace swirl {

struct ClassMetrics {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    std::size_t support = 0;  // gold count
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
};

struct MetricSet {
    double accuracy = 0;
    std::map<Label, ClassMetrics> per_class;
    double macro_f1 = 0;
    std::size_t n = 0;
};

struct EvalReport {
    double accuracy = 0;
    std::map<Label, ClassMetrics> per_class;
    double macro_f1 = 0;
    std::map<Pos, MetricSet> per_pos;
    std::size_t n_test = 0;
    std::string config_digest;

    /// Binary metrics with antonym as the positive class.
    const ClassMetrics& positive() const { return per_class.at(Label::antonym); }
};

namespace detail {

/// Classes scored are those occurring in gold or predictions. Precision of a
/// never-predicted class and F1 with P + R = 0 are 0.
inline MetricSet metric_set(const std::vector<Label>& predicted, const std::vector<Label>& gold,
                            const std::vector<std::size_t>& rows) {
    MetricSet m;
    m.n = rows.size();
    std::size_t correct = 0;
    for (std::size_t i : rows) {
        m.per_class[gold[i]];
        m.per_class[predicted[i]];
        if (predicted[i] == gold[i]) ++correct;
    }
    for (std::size_t i : rows) {
        auto& g = m.per_class[gold[i]];
        ++g.support;
        if (predicted[i] == gold[i]) ++g.tp;
        else {
            ++g.fn;
            ++m.per_class[predicted[i]].fp;
        }
    }
    double f1_sum = 0;
    for (auto& [label, c] : m.per_class) {
        c.precision = c.tp + c.fp ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
        c.recall = c.support ? static_cast<double>(c.tp) / static_cast<double>(c.support) : 0.0;
        c.f1 = c.precision + c.recall > 0 ? 2 * c.precision * c.recall / (c.precision + c.recall) : 0.0;
        f1_sum += c.f1;
    }
    m.accuracy = m.n ? static_cast<double>(correct) / static_cast<double>(m.n) : 0.0;
    m.macro_f1 = m.per_class.empty() ? 0.0 : f1_sum / static_cast<double>(m.per_class.size());
    return m;
}

}  // namespace detail

inline EvalReport score(const std::vector<Label>& predicted, const std::vector<Label>& gold,
                        const std::vector<Pos>& pos_tags, std::string config_digest = {}) {
    if (predicted.size() != gold.size() || pos_tags.size() != gold.size())
        throw DataError("score: predicted, gold and POS lengths differ (" + std::to_string(predicted.size()) + ", " +
                        std::to_string(gold.size()) + ", " + std::to_string(pos_tags.size()) + ")");
    if (gold.empty()) throw DataError("score: nothing to score");
    std::vector<std::size_t> all(gold.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    MetricSet overall = detail::metric_set(predicted, gold, all);
    EvalReport r;
    r.accuracy = overall.accuracy;
    r.per_class = std::move(overall.per_class);
    r.macro_f1 = overall.macro_f1;
    r.n_test = gold.size();
    r.config_digest = std::move(config_digest);
    // Binary reports always carry the positive class.
    r.per_class[Label::antonym];
    std::map<Pos, std::vector<std::size_t>> by_pos;
    for (std::size_t i = 0; i < gold.size(); ++i) by_pos[pos_tags[i]].push_back(i);
    for (const auto& [p, rows] : by_pos) r.per_pos[p] = detail::metric_set(predicted, gold, rows);
    return r;
}

inline std::string report_to_tsv(const EvalReport& r) {
    std::string out = "scope\tclass\tmetric\tvalue\n";
    auto row = [&](std::string_view scope, std::string_view cls, std::string_view metric, double v) {
        out += std::string(scope) + '\t' + std::string(cls) + '\t' + std::string(metric) + '\t' +
               io::format_double(v, 6) + '\n';
    };
    auto block = [&](std::string_view scope, double acc, double macro, std::size_t n,
                     const std::map<Label, ClassMetrics>& per_class) {
        row(scope, "all", "accuracy", acc);
        row(scope, "all", "macro_f1", macro);
        row(scope, "all", "n", static_cast<double>(n));
        for (const auto& [l, c] : per_class) {
            row(scope, to_string(l), "precision", c.precision);
            row(scope, to_string(l), "recall", c.recall);
            row(scope, to_string(l), "f1", c.f1);
            row(scope, to_string(l), "support", static_cast<double>(c.support));
        }
    };
    block("overall", r.accuracy, r.macro_f1, r.n_test, r.per_class);
    for (const auto& [p, m] : r.per_pos) block(to_string(p), m.accuracy, m.macro_f1, m.n, m.per_class);
    return out;
}

/// Mean and sample standard deviation (0 for a single value).
struct Aggregate {
    double mean = 0;
    double std = 0;
    std::size_t n = 0;
};

inline Aggregate aggregate(const std::vector<double>& values) {
    Aggregate a;
    a.n = values.size();
    if (values.empty()) return a;
    for (double v : values) a.mean += v;
    a.mean /= static_cast<double>(a.n);
    if (a.n > 1) {
        double ss = 0;
        for (double v : values) ss += (v - a.mean) * (v - a.mean);
        a.std = std::sqrt(ss / static_cast<double>(a.n - 1));
    }
    return a;
}

struct HistogramSpec {
    std::vector<double> bin_edges;  // n_bins + 1, strictly increasing
    std::map<Label, std::vector<std::size_t>> counts;

    std::size_t bins() const { return bin_edges.empty() ? 0 : bin_edges.size() - 1; }
};

/// Uniform bins over [-1, 1]; every bin is [lo, hi) except the last, which is
/// closed on the right.
inline HistogramSpec cosine_histogram(const std::map<Label, std::vector<double>>& values, std::size_t n_bins = 50) {
    if (n_bins == 0) throw ParameterError("cosine_histogram: need at least one bin");
    HistogramSpec h;
    h.bin_edges.resize(n_bins + 1);
    for (std::size_t i = 0; i <= n_bins; ++i)
        h.bin_edges[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n_bins);
    h.bin_edges.back() = 1.0;
    for (const auto& [label, vs] : values) {
        auto& c = h.counts[label];
        c.assign(n_bins, 0);
        for (double v : vs) {
            if (!(v >= -1.0 && v <= 1.0))
                throw DataError("cosine_histogram: value " + io::format_double(v, 17) + " outside [-1, 1]");
            auto idx = static_cast<std::size_t>(std::floor((v + 1.0) * static_cast<double>(n_bins) / 2.0));
            idx = std::min(idx, n_bins - 1);
            // The closed-form index can be off by one next to an edge.
            if (idx > 0 && v < h.bin_edges[idx]) --idx;
            if (idx + 1 < n_bins && v >= h.bin_edges[idx + 1]) ++idx;
            ++c[idx];
        }
    }
    return h;
}

/// Columns: bin_lo, bin_hi, then one count column per label.
inline std::string histogram_to_tsv(const HistogramSpec& h) {
    std::string out = "bin_lo\tbin_hi";
    for (const auto& [label, c] : h.counts) out += "\t" + std::string(to_string(label));
    out += '\n';
    for (std::size_t b = 0; b < h.bins(); ++b) {
        out += io::format_double(h.bin_edges[b], 9) + '\t' + io::format_double(h.bin_edges[b + 1], 9);
        for (const auto& [label, c] : h.counts) out += '\t' + std::to_string(c[b]);
        out += '\n';
    }
    return out;
}

inline HistogramSpec histogram_from_tsv(std::string_view text) {
    HistogramSpec h;
    std::vector<Label> cols;
    io::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (line.empty()) return;
        auto f = io::split(line, '\t');
        if (line_no == 1) {
            if (f.size() < 2) throw ParseError("histogram: bad header", 1);
            for (std::size_t j = 2; j < f.size(); ++j) {
                cols.push_back(parse_label(f[j]));
                h.counts[cols.back()];
            }
            return;
        }
        if (f.size() != cols.size() + 2) throw ParseError("histogram: line " + std::to_string(line_no) + " has wrong width", line_no);
        if (h.bin_edges.empty()) h.bin_edges.push_back(std::stod(std::string(f[0])));
        h.bin_edges.push_back(std::stod(std::string(f[1])));
        for (std::size_t j = 0; j < cols.size(); ++j) h.counts[cols[j]].push_back(std::stoull(std::string(f[j + 2])));
    });
    return h;
}

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw DataError("ks_statistic: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0;
    const auto na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

/// Share of points whose k nearest neighbours (self excluded) hold a strict
/// majority of the point's own label. Ties count as disagreement.
template <class L>
double neighbour_vote_agreement(const Matrix& points, const std::vector<L>& labels, std::size_t k,
                                Metric metric = Metric::euclidean) {
    if (static_cast<std::size_t>(points.rows()) != labels.size())
        throw ParameterError("neighbour_vote_agreement: row count mismatch");
    KnnGraph g = knn_graph(points, k, metric);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < g.n; ++i) {
        std::size_t same = 0;
        for (std::size_t j = 0; j < k; ++j) same += labels[static_cast<std::size_t>(g.index(i, j))] == labels[i];
        agree += 2 * same > k;
    }
    return static_cast<double>(agree) / static_cast<double>(g.n);
}

}  // namespace swirl
