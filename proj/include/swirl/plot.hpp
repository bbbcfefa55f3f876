#pragma once

// Deterministic SVG rendering of projections and cosine histograms.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "swirl/error.hpp"
#include "swirl/eval.hpp"
#include "swirl/io.hpp"
#include "swirl/reduce/projection.hpp"

namespace swirl {

struct PlotStyle {
    std::map<Label, std::string> color_map{{Label::antonym, "#1f4fd8"},
                                           {Label::shuffled_antonym, "#2ca02c"},
                                           {Label::synonym, "#d62728"},
                                           {Label::shuffled_synonym, "#ff8c00"}};
    double point_radius = 2.0;
    int width = 640;
    int height = 640;
    double opacity = 0.5;
    bool legend = true;
};

namespace svg {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    // Avoid "-0.00".
    if (std::string_view(buf) == "-0.00") return "0.00";
    return buf;
}

inline std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string open(double w, double h) {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           num(w) + "\" height=\"" + num(h) + "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n";
}

inline constexpr const char* kClose = "</svg>\n";

/// Affine map from a data box onto a pixel box, y pointing up.
struct Frame {
    double x0, y0, w, h;          // pixel box
    double dx0, dx1, dy0, dy1;    // data box

    double px(double x) const { return x0 + (x - dx0) / (dx1 - dx0) * w; }
    double py(double y) const { return y0 + h - (y - dy0) / (dy1 - dy0) * h; }
};

/// Data bounds grown by 5% on each side; a degenerate extent becomes a unit
/// interval around its value, so a single point sits in the middle.
inline void padded_range(double lo, double hi, double& out_lo, double& out_hi) {
    if (!(hi > lo)) {
        out_lo = lo - 1.0;
        out_hi = lo + 1.0;
        return;
    }
    const double m = 0.05 * (hi - lo);
    out_lo = lo - m;
    out_hi = hi + m;
}

inline std::string axes(const Frame& f) {
    std::string out;
    out += "<rect x=\"" + num(f.x0) + "\" y=\"" + num(f.y0) + "\" width=\"" + num(f.w) + "\" height=\"" + num(f.h) +
           "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    auto label = [&](double x, double y, const char* anchor, double v) {
        out += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"" +
               anchor + "\" fill=\"#444444\">" + io::format_double(v, 4) + "</text>\n";
    };
    label(f.x0, f.y0 + f.h + 12, "start", f.dx0);
    label(f.x0 + f.w, f.y0 + f.h + 12, "end", f.dx1);
    label(f.x0 - 4, f.y0 + f.h, "end", f.dy0);
    label(f.x0 - 4, f.y0 + 10, "end", f.dy1);
    return out;
}

inline std::string legend(const std::vector<Label>& labels, const PlotStyle& style, double x, double y, bool lines) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double yy = y + 14.0 * static_cast<double>(i);
        const std::string& color = style.color_map.at(labels[i]);
        if (lines)
            out += "<line x1=\"" + num(x) + "\" y1=\"" + num(yy) + "\" x2=\"" + num(x + 12) + "\" y2=\"" + num(yy) +
                   "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        else
            out += "<circle cx=\"" + num(x + 6) + "\" cy=\"" + num(yy) + "\" r=\"4\" fill=\"" + color + "\"/>\n";
        out += "<text x=\"" + num(x + 16) + "\" y=\"" + num(yy + 4) + "\" font-family=\"sans-serif\" font-size=\"11\">" +
               escape(to_string(labels[i])) + "</text>\n";
    }
    return out;
}

inline std::vector<Label> present_labels(const std::vector<Label>& labels) {
    std::vector<Label> out;
    for (Label l : kAllLabels)
        if (std::find(labels.begin(), labels.end(), l) != labels.end()) out.push_back(l);
    return out;
}

/// Body of a scatter plot inside the pixel box (x, y, w, h).
inline std::string scatter_body(const Projection& p, const PlotStyle& style, double x, double y, double w, double h) {
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    if (p.rows() > 0) {
        xmin = p.coords.col(0).minCoeff();
        xmax = p.coords.col(0).maxCoeff();
        ymin = p.coords.col(1).minCoeff();
        ymax = p.coords.col(1).maxCoeff();
    }
    Frame f{x, y, w, h, 0, 0, 0, 0};
    padded_range(xmin, xmax, f.dx0, f.dx1);
    padded_range(ymin, ymax, f.dy0, f.dy1);
    std::string out = axes(f);
    for (std::size_t i = 0; i < p.rows(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        auto it = style.color_map.find(p.labels[i]);
        if (it == style.color_map.end()) throw ParameterError("plot: no color for label " + std::string(to_string(p.labels[i])));
        out += "<circle cx=\"" + num(f.px(p.coords(r, 0))) + "\" cy=\"" + num(f.py(p.coords(r, 1))) + "\" r=\"" +
               num(style.point_radius) + "\" fill=\"" + it->second + "\" fill-opacity=\"" + num(style.opacity) + "\"/>\n";
    }
    if (style.legend) out += legend(present_labels(p.labels), style, x + 8, y + 12, false);
    return out;
}

inline void check_style(const PlotStyle& style) {
    std::vector<std::string> seen;
    for (Label l : kAllLabels) {
        auto it = style.color_map.find(l);
        if (it == style.color_map.end()) throw ParameterError("plot: color map lacks " + std::string(to_string(l)));
        if (std::find(seen.begin(), seen.end(), it->second) != seen.end())
            throw ParameterError("plot: labels must have distinct colors");
        seen.push_back(it->second);
    }
}

}  // namespace svg

inline constexpr double kPlotMargin = 40.0;

inline std::string scatter_svg(const Projection& p, const PlotStyle& style = {}) {
    svg::check_style(style);
    for (Eigen::Index i = 0; i < p.coords.rows(); ++i)
        if (!std::isfinite(p.coords(i, 0)) || !std::isfinite(p.coords(i, 1)))
            throw NumericError("scatter_svg: non-finite coordinate in row " + std::to_string(i));
    const double w = style.width, h = style.height;
    std::string out = svg::open(w, h);
    out += svg::scatter_body(p, style, kPlotMargin, kPlotMargin / 2, w - 1.5 * kPlotMargin, h - 1.5 * kPlotMargin);
    out += svg::kClose;
    return out;
}

inline void write_scatter_svg(const std::filesystem::path& path, const Projection& p, const PlotStyle& style = {}) {
    io::write_file_atomic(path, scatter_svg(p, style));
}

/// Caption of a grid cell: the UMAP neighbourhood parameters when present,
/// the full parameter digest otherwise.
inline std::string grid_caption(const Projection& p) {
    auto nn = p.params.find("n_neighbors");
    auto md = p.params.find("min_dist");
    if (nn != p.params.end() && md != p.params.end()) return "n_neighbors=" + nn->second + ", min_dist=" + md->second;
    return p.params_digest;
}

/// Panels filled row by row; cells past the end of the list stay blank.
inline std::string grid_svg(const std::vector<Projection>& projections, std::size_t rows, std::size_t cols,
                            const PlotStyle& style = {}) {
    if (rows == 0 || cols == 0) throw ParameterError("grid_svg: rows and cols must be positive");
    if (rows * cols < projections.size())
        throw ParameterError("grid_svg: " + std::to_string(projections.size()) + " plots do not fit a " +
                             std::to_string(rows) + "x" + std::to_string(cols) + " grid");
    svg::check_style(style);
    const double cw = style.width, ch = style.height + 20.0;
    std::string out = svg::open(cw * static_cast<double>(cols), ch * static_cast<double>(rows));
    for (std::size_t i = 0; i < projections.size(); ++i) {
        const double ox = cw * static_cast<double>(i % cols), oy = ch * static_cast<double>(i / cols);
        out += "<text x=\"" + svg::num(ox + cw / 2) + "\" y=\"" + svg::num(oy + 16) +
               "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" +
               svg::escape(grid_caption(projections[i])) + "</text>\n";
        out += svg::scatter_body(projections[i], style, ox + kPlotMargin, oy + 20 + kPlotMargin / 2,
                                 cw - 1.5 * kPlotMargin, style.height - 1.5 * kPlotMargin);
    }
    out += svg::kClose;
    return out;
}

inline void write_grid_svg(const std::filesystem::path& path, const std::vector<Projection>& projections,
                           std::size_t rows, std::size_t cols, const PlotStyle& style = {}) {
    io::write_file_atomic(path, grid_svg(projections, rows, cols, style));
}

/// One step line per label, each normalised to its own total so datasets of
/// different sizes share the y axis.
inline std::string histogram_svg(const HistogramSpec& spec, const PlotStyle& style = {}) {
    svg::check_style(style);
    const std::size_t nb = spec.bins();
    if (nb == 0) throw ParameterError("histogram_svg: no bins");
    for (std::size_t b = 0; b + 1 < spec.bin_edges.size(); ++b)
        if (!(spec.bin_edges[b] < spec.bin_edges[b + 1])) throw ParameterError("histogram_svg: edges must increase");
    double ymax = 0;
    std::map<Label, std::vector<double>> frac;
    for (const auto& [label, counts] : spec.counts) {
        if (counts.size() != nb) throw ParameterError("histogram_svg: count vector length differs from bin count");
        double total = 0;
        for (auto c : counts) total += static_cast<double>(c);
        auto& f = frac[label];
        for (auto c : counts) f.push_back(total > 0 ? static_cast<double>(c) / total : 0.0);
        for (double v : f) ymax = std::max(ymax, v);
    }
    if (ymax == 0) ymax = 1;
    const double w = style.width, h = style.height;
    svg::Frame fr{kPlotMargin, kPlotMargin / 2, w - 1.5 * kPlotMargin, h - 1.5 * kPlotMargin,
                  spec.bin_edges.front(), spec.bin_edges.back(), 0.0, ymax * 1.05};
    std::string out = svg::open(w, h);
    out += svg::axes(fr);
    std::vector<Label> labels;
    for (const auto& [label, f] : frac) {
        labels.push_back(label);
        std::string d = "M" + svg::num(fr.px(spec.bin_edges[0])) + " " + svg::num(fr.py(f[0]));
        for (std::size_t b = 0; b < nb; ++b) {
            if (b > 0) d += " L" + svg::num(fr.px(spec.bin_edges[b])) + " " + svg::num(fr.py(f[b]));
            d += " L" + svg::num(fr.px(spec.bin_edges[b + 1])) + " " + svg::num(fr.py(f[b]));
        }
        out += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + style.color_map.at(label) + "\" stroke-width=\"1.5\"/>\n";
    }
    if (style.legend) out += svg::legend(labels, style, fr.x0 + 8, fr.y0 + 12, true);
    out += svg::kClose;
    return out;
}

inline void write_histogram_svg(const std::filesystem::path& path, const HistogramSpec& spec, const PlotStyle& style = {}) {
    io::write_file_atomic(path, histogram_svg(spec, style));
}

}  // namespace swirl
