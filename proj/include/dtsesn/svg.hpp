#pragma once

// Deterministic SVG charts rendered straight from the CSV outputs: sweep
// curves with error bars, timescale histograms, and weight-vs-leak-rate
// scatters. Numbers are written with the shortest round-trip form, so a
// given input always produces byte-identical SVG.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dtsesn/config.hpp"
#include "dtsesn/csv.hpp"
#include "dtsesn/errors.hpp"

namespace dtsesn {

enum class MarkerStyle { circle, cross };

struct ChartSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> err;  // optional, same length as y when present
    MarkerStyle marker = MarkerStyle::circle;
    std::string color = "#2c8c2c";
};

namespace svg_detail {

constexpr double kWidth = 640.0, kHeight = 440.0;
constexpr double kLeft = 80.0, kRight = 20.0, kTop = 40.0, kBottom = 60.0;

struct AxisMap {
    double lo = 0.0, hi = 1.0;
    bool log = false;
    double px0 = 0.0, px1 = 1.0;

    [[nodiscard]] double map(double v) const {
        const double t = log ? std::log10(v) : v;
        return px0 + (t - lo) / (hi - lo) * (px1 - px0);
    }
};

inline AxisMap make_axis(const std::vector<double>& values, bool log, double px0, double px1) {
    AxisMap axis;
    axis.log = log;
    axis.px0 = px0;
    axis.px1 = px1;
    double lo = log ? std::log10(values.at(0)) : values.at(0);
    double hi = lo;
    for (double v : values) {
        const double t = log ? std::log10(v) : v;
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    axis.lo = lo - pad;
    axis.hi = hi + pad;
    return axis;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string num(double v) { return format_double(v); }

inline void open_chart(std::ostream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
        << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\">\n";
    out << "<rect width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" font-family=\"sans-serif\" "
        << "font-size=\"15\" text-anchor=\"middle\">" << escape(title) << "</text>\n";
    out << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\""
        << num(kWidth - kLeft - kRight) << "\" height=\"" << num(kHeight - kTop - kBottom)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
}

inline void axis_labels(std::ostream& out, const std::string& xlabel, const std::string& ylabel) {
    out << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << num(kHeight - 14)
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
        << escape(xlabel) << "</text>\n";
    out << "<text x=\"18\" y=\"" << num((kTop + kHeight - kBottom) / 2)
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
        << "transform=\"rotate(-90 18 " << num((kTop + kHeight - kBottom) / 2) << ")\">"
        << escape(ylabel) << "</text>\n";
}

inline std::string tick_label(double t, bool log) {
    return log ? ("1e" + format_double(t)) : format_double(t);
}

inline void draw_ticks(std::ostream& out, const AxisMap& axis, bool horizontal) {
    std::vector<double> ticks;
    if (axis.log) {
        for (double t = std::ceil(axis.lo); t <= axis.hi + 1e-12; t += 1.0) ticks.push_back(t);
        if (ticks.size() < 2) ticks = {axis.lo, axis.hi};
    } else {
        for (int i = 0; i <= 4; ++i) ticks.push_back(axis.lo + (axis.hi - axis.lo) * i / 4.0);
    }
    for (double t : ticks) {
        const double p = axis.px0 + (t - axis.lo) / (axis.hi - axis.lo) * (axis.px1 - axis.px0);
        if (horizontal) {
            out << "<line x1=\"" << num(p) << "\" y1=\"" << num(kHeight - kBottom) << "\" x2=\""
                << num(p) << "\" y2=\"" << num(kHeight - kBottom + 5)
                << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << num(p) << "\" y=\"" << num(kHeight - kBottom + 18)
                << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
                << tick_label(t, axis.log) << "</text>\n";
        } else {
            out << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(p) << "\" x2=\""
                << num(kLeft) << "\" y2=\"" << num(p) << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(p + 4)
                << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
                << tick_label(t, axis.log) << "</text>\n";
        }
    }
}

inline void draw_marker(std::ostream& out, double px, double py, MarkerStyle style,
                        const std::string& color) {
    if (style == MarkerStyle::circle) {
        out << "<circle cx=\"" << num(px) << "\" cy=\"" << num(py)
            << "\" r=\"4\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    } else {
        out << "<path d=\"M" << num(px - 4) << ' ' << num(py - 4) << " L" << num(px + 4) << ' '
            << num(py + 4) << " M" << num(px - 4) << ' ' << num(py + 4) << " L" << num(px + 4)
            << ' ' << num(py - 4) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    }
}

}  // namespace svg_detail

/// True when a log scale is sensible: strictly positive values spanning at
/// least one decade.
inline bool log_scale_fits(const std::vector<double>& values) {
    if (values.empty()) return false;
    double lo = values[0], hi = values[0];
    for (double v : values) {
        if (!(v > 0.0)) return false;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi / lo >= 10.0;
}

/// Line-and-marker chart with optional symmetric error bars. A
/// single-point series renders one marker and no line.
inline void render_sweep_chart(std::ostream& out, const std::string& title,
                               const std::string& xlabel, const std::string& ylabel,
                               const std::vector<ChartSeries>& series, bool log_x, bool log_y) {
    using namespace svg_detail;
    std::vector<double> all_x, all_y;
    for (const auto& s : series) {
        all_x.insert(all_x.end(), s.x.begin(), s.x.end());
        for (std::size_t i = 0; i < s.y.size(); ++i) {
            all_y.push_back(s.y[i]);
            if (i < s.err.size() && s.err[i] > 0.0) {
                const double lo_v = s.y[i] - s.err[i];
                if (!log_y || lo_v > 0.0) all_y.push_back(lo_v);
                all_y.push_back(s.y[i] + s.err[i]);
            }
        }
    }
    if (all_x.empty()) throw PreconditionError("render_sweep_chart: no data points");
    const AxisMap ax = make_axis(all_x, log_x, kLeft, kWidth - kRight);
    const AxisMap ay = make_axis(all_y, log_y, kHeight - kBottom, kTop);

    open_chart(out, title);
    draw_ticks(out, ax, true);
    draw_ticks(out, ay, false);
    axis_labels(out, xlabel, ylabel);

    for (const auto& s : series) {
        if (s.x.size() > 1) {
            out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (i) out << ' ';
                out << num(ax.map(s.x[i])) << ',' << num(ay.map(s.y[i]));
            }
            out << "\"/>\n";
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double px = ax.map(s.x[i]);
            const double py = ay.map(s.y[i]);
            if (i < s.err.size() && s.err[i] > 0.0) {
                const double lo_v = s.y[i] - s.err[i];
                // On a log axis a bar reaching zero or below has no lower cap.
                const double y0 = (!log_y || lo_v > 0.0) ? ay.map(lo_v) : py;
                const double y1 = ay.map(s.y[i] + s.err[i]);
                out << "<line x1=\"" << num(px) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(px)
                    << "\" y2=\"" << num(y1) << "\" stroke=\"" << s.color << "\"/>\n";
                for (double yc : {y0, y1})
                    out << "<line x1=\"" << num(px - 3) << "\" y1=\"" << num(yc) << "\" x2=\""
                        << num(px + 3) << "\" y2=\"" << num(yc) << "\" stroke=\"" << s.color
                        << "\"/>\n";
            }
            draw_marker(out, px, py, s.marker, s.color);
        }
    }
    out << "</svg>\n";
}

/// Bar chart over log10-spaced bin edges.
inline void render_histogram(std::ostream& out, const std::string& title,
                             const std::vector<double>& edges,
                             const std::vector<std::size_t>& counts,
                             std::size_t non_decaying) {
    using namespace svg_detail;
    if (counts.empty() || edges.size() != counts.size() + 1)
        throw PreconditionError("render_histogram: malformed bins");
    const AxisMap ax = make_axis(edges, true, kLeft, kWidth - kRight);
    std::vector<double> ys = {0.0};
    for (auto c : counts) ys.push_back(static_cast<double>(c));
    const AxisMap ay = make_axis(ys, false, kHeight - kBottom, kTop);

    open_chart(out, title);
    draw_ticks(out, ax, true);
    draw_ticks(out, ay, false);
    axis_labels(out, "tau", "count");
    for (std::size_t j = 0; j < counts.size(); ++j) {
        const double x0 = ax.map(edges[j]);
        const double x1 = ax.map(edges[j + 1]);
        const double y0 = ay.map(0.0);
        const double y1 = ay.map(static_cast<double>(counts[j]));
        out << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0)
            << "\" height=\"" << num(y0 - y1)
            << "\" fill=\"#7aa6d6\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    }
    out << "<text x=\"" << num(kWidth - kRight - 6) << "\" y=\"" << num(kTop + 16)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">non-decaying: "
        << non_decaying << "</text>\n";
    out << "</svg>\n";
}

/// Scatter chart (used for |W_out| against leak rate).
inline void render_scatter(std::ostream& out, const std::string& title, const std::string& xlabel,
                           const std::string& ylabel, const std::vector<double>& x,
                           const std::vector<double>& y, bool log_x, bool log_y,
                           const std::string& color) {
    using namespace svg_detail;
    if (x.empty() || x.size() != y.size())
        throw PreconditionError("render_scatter: empty or mismatched data");
    const AxisMap ax = make_axis(x, log_x, kLeft, kWidth - kRight);
    const AxisMap ay = make_axis(y, log_y, kHeight - kBottom, kTop);
    open_chart(out, title);
    draw_ticks(out, ax, true);
    draw_ticks(out, ay, false);
    axis_labels(out, xlabel, ylabel);
    for (std::size_t i = 0; i < x.size(); ++i)
        out << "<circle cx=\"" << num(ax.map(x[i])) << "\" cy=\"" << num(ay.map(y[i]))
            << "\" r=\"2\" fill=\"" << color << "\" fill-opacity=\"0.6\"/>\n";
    out << "</svg>\n";
}

namespace svg_detail {

inline std::optional<double> parse_optional(const std::string& field, std::size_t line) {
    if (field.empty()) return std::nullopt;
    return parse_double(field, line);
}

}  // namespace svg_detail

/// Render SVG charts for whatever CSV outputs exist in the configured
/// output directory: summary.csv becomes a sweep chart (error bars use the
/// variance for task 1 and the standard error for task 2), histogram_*.csv
/// become bar charts, profile.csv becomes one scatter per output variable.
inline std::vector<std::string> emit_plots(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    std::vector<std::string> written;
    const fs::path dir(cfg.out_dir);

    const fs::path summary = dir / "summary.csv";
    if (fs::exists(summary)) {
        const CsvTable table = read_csv(summary.string());
        ChartSeries series;
        series.marker = cfg.kind == ModelKind::dts ? MarkerStyle::circle : MarkerStyle::cross;
        series.color = cfg.kind == ModelKind::dts ? "#2c8c2c" : "#000000";
        const bool task1 = cfg.task == TaskKind::task1;
        std::size_t line = 1;
        for (const auto& row : table.rows) {
            ++line;
            const auto value = svg_detail::parse_optional(row[0], line);
            const auto mean = svg_detail::parse_optional(row[1], line);
            if (!mean) continue;  // grid point with every run failed
            series.x.push_back(value.value_or(0.0));
            series.y.push_back(*mean);
            const auto bar = svg_detail::parse_optional(row[task1 ? 2 : 3], line);
            series.err.push_back(bar.value_or(0.0));
        }
        if (series.x.empty()) throw PreconditionError("summary.csv has no aggregate rows");
        const bool log_x = log_scale_fits(series.x);
        const bool log_y = task1 && log_scale_fits(series.y);
        const std::string title = std::string(system_name(cfg.system)) + " " +
                                  task_name(cfg.task) + " " + kind_name(cfg.kind);
        const std::string xlabel = cfg.sweep ? cfg.sweep->name : "";
        const std::string ylabel = task1 ? "NRMSE" : "valid time";
        const fs::path out_path = dir / "plot_summary.svg";
        std::ofstream out(out_path, std::ios::binary);
        render_sweep_chart(out, title, xlabel, ylabel, {series}, log_x, log_y);
        written.push_back(out_path.string());
    }

    std::vector<fs::path> hist_files;
    if (fs::exists(dir))
        for (const auto& entry : fs::directory_iterator(dir)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("histogram_", 0) == 0 && entry.path().extension() == ".csv")
                hist_files.push_back(entry.path());
        }
    std::sort(hist_files.begin(), hist_files.end());
    for (const auto& hf : hist_files) {
        const CsvTable table = read_csv(hf.string());
        std::vector<double> edges;
        std::vector<std::size_t> counts;
        std::size_t non_decaying = 0;
        std::size_t line = 1;
        for (const auto& row : table.rows) {
            ++line;
            if (row[0] == "inf") {
                non_decaying = static_cast<std::size_t>(parse_double(row[2], line));
                continue;
            }
            const double lo = parse_double(row[0], line);
            const double hi = parse_double(row[1], line);
            if (edges.empty()) edges.push_back(lo);
            edges.push_back(hi);
            counts.push_back(static_cast<std::size_t>(parse_double(row[2], line)));
        }
        if (counts.empty()) throw PreconditionError(hf.string() + " has no bins");
        const std::string stem = hf.stem().string();
        const fs::path out_path = dir / ("plot_" + stem + ".svg");
        std::ofstream out(out_path, std::ios::binary);
        render_histogram(out, stem, edges, counts, non_decaying);
        written.push_back(out_path.string());
    }

    const fs::path profile = dir / "profile.csv";
    if (fs::exists(profile)) {
        const CsvTable table = read_csv(profile.string());
        for (std::size_t col = 2; col < table.header.size(); ++col) {
            std::vector<double> xs, ys;
            std::size_t line = 1;
            for (const auto& row : table.rows) {
                ++line;
                const double alpha = parse_double(row[1], line);
                const double w = parse_double(row[col], line);
                if (w > 0.0) {
                    xs.push_back(alpha);
                    ys.push_back(w);
                }
            }
            if (xs.empty()) continue;
            const std::string label = table.header[col];
            const bool fast = label.find("_fast") != std::string::npos;
            const fs::path out_path = dir / ("plot_profile_" + label + ".svg");
            std::ofstream out(out_path, std::ios::binary);
            render_scatter(out, label, "alpha", "|w|", xs, ys, true, log_scale_fits(ys),
                           fast ? "#c03030" : "#3050c0");
            written.push_back(out_path.string());
        }
    }

    if (written.empty())
        throw PreconditionError("no chartable CSV files in '" + cfg.out_dir + "'");
    return written;
}

}  // namespace dtsesn
