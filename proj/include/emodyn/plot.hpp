#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "emodyn/emotions.hpp"
#include "emodyn/error.hpp"

namespace emodyn::plot {

/// Per-song dynamics: the verse-level scores, the song-level model output
/// with its +-1 sigma band, and gold when the song carries labels. All
/// series run over the same verses in file order.
struct DynamicsTrace {
    std::string song_id;
    std::vector<std::string> verse_ids;
    bool has_gold = false;
    bool has_ssm = true;
    std::vector<EmotionScores> gold;
    std::vector<EmotionScores> verse_scores;
    std::vector<EmotionScores> ssm_mean;
    std::vector<EmotionScores> ssm_sd;

    std::size_t length() const { return verse_ids.size(); }

    void validate() const {
        if (verse_ids.empty()) throw InputError("empty dynamics trace for " + song_id);
        if (verse_scores.size() != verse_ids.size())
            throw DimensionError("trace series lengths differ for " + song_id);
        if (has_gold && gold.size() != verse_ids.size())
            throw DimensionError("gold series length differs for " + song_id);
        if (has_ssm &&
            (ssm_mean.size() != verse_ids.size() || ssm_sd.size() != verse_ids.size()))
            throw DimensionError("model series length differs for " + song_id);
    }
};

enum class PlotFormat { csv, svg };

inline PlotFormat plot_format_from_string(const std::string& s) {
    if (s == "csv") return PlotFormat::csv;
    if (s == "svg") return PlotFormat::svg;
    throw InputError("unknown plot format: " + s);
}

namespace detail {

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline std::string fmt2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace detail

inline constexpr const char* kTraceCsvHeader = "song,emotion,verse_idx,series,value";

/// Long-format rows: song, emotion, verse_idx, series, value. Series are
/// gold (when present), verse, and for model traces ssm/ssm_lo/ssm_hi.
inline void append_trace_csv(std::string& out, const DynamicsTrace& trace) {
    trace.validate();
    for (std::size_t e = 0; e < kEmotionCount; ++e) {
        for (std::size_t t = 0; t < trace.length(); ++t) {
            const std::string prefix =
                trace.song_id + "," + kEmotionNames[e] + "," + std::to_string(t) + ",";
            if (trace.has_gold)
                out += prefix + "gold," + detail::fmt(trace.gold[t][e]) + "\n";
            out += prefix + "verse," + detail::fmt(trace.verse_scores[t][e]) + "\n";
            if (trace.has_ssm) {
                const double m = trace.ssm_mean[t][e];
                const double s = trace.ssm_sd[t][e];
                out += prefix + "ssm," + detail::fmt(m) + "\n";
                out += prefix + "ssm_lo," + detail::fmt(m - s) + "\n";
                out += prefix + "ssm_hi," + detail::fmt(m + s) + "\n";
            }
        }
    }
}

inline std::string traces_to_csv(std::span<const DynamicsTrace> traces) {
    std::string out = std::string(kTraceCsvHeader) + "\n";
    for (const auto& t : traces) append_trace_csv(out, t);
    return out;
}

/// Rebuilds per-song traces from the long CSV format (for the plot command).
inline std::vector<DynamicsTrace> traces_from_csv_stream(std::istream& in,
                                                         const std::string& origin) {
    std::string line;
    if (!std::getline(in, line) || line != kTraceCsvHeader)
        throw InputError(origin + ": not a dynamics-trace CSV");

    struct Row {
        std::size_t verse;
        std::size_t emotion;
        std::string series;
        double value;
    };
    std::map<std::string, std::vector<Row>> by_song;  // keeps parse groups
    std::vector<std::string> song_order;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string context = origin + ":" + std::to_string(line_no);
        std::stringstream ss(line);
        std::string song, emotion, verse, series, value;
        if (!std::getline(ss, song, ',') || !std::getline(ss, emotion, ',') ||
            !std::getline(ss, verse, ',') || !std::getline(ss, series, ',') ||
            !std::getline(ss, value))
            throw InputError(context + ": expected 5 comma-separated fields");
        if (by_song.find(song) == by_song.end()) song_order.push_back(song);
        by_song[song].push_back(Row{std::stoul(verse), emotion_index(emotion), series,
                                    std::stod(value)});
    }

    std::vector<DynamicsTrace> traces;
    for (const auto& song_id : song_order) {
        const auto& rows = by_song[song_id];
        std::size_t length = 0;
        for (const auto& r : rows) length = std::max(length, r.verse + 1);

        DynamicsTrace trace;
        trace.song_id = song_id;
        trace.has_gold = false;
        trace.has_ssm = false;
        for (std::size_t t = 0; t < length; ++t)
            trace.verse_ids.push_back(song_id + "v" + std::to_string(t + 1));
        trace.gold.resize(length);
        trace.verse_scores.resize(length);
        trace.ssm_mean.resize(length);
        trace.ssm_sd.resize(length);

        std::vector<EmotionScores> lo(length), hi(length);
        for (const auto& r : rows) {
            if (r.verse >= length) continue;
            if (r.series == "gold") {
                trace.gold[r.verse][r.emotion] = r.value;
                trace.has_gold = true;
            } else if (r.series == "verse") {
                trace.verse_scores[r.verse][r.emotion] = r.value;
            } else if (r.series == "ssm") {
                trace.ssm_mean[r.verse][r.emotion] = r.value;
                trace.has_ssm = true;
            } else if (r.series == "ssm_lo") {
                lo[r.verse][r.emotion] = r.value;
            } else if (r.series == "ssm_hi") {
                hi[r.verse][r.emotion] = r.value;
            } else {
                throw InputError(origin + ": unknown series '" + r.series + "'");
            }
        }
        for (std::size_t t = 0; t < length; ++t)
            for (std::size_t e = 0; e < kEmotionCount; ++e)
                trace.ssm_sd[t][e] = 0.5 * (hi[t][e] - lo[t][e]);
        if (!trace.has_gold) trace.gold.clear();
        if (!trace.has_ssm) {
            trace.ssm_mean.clear();
            trace.ssm_sd.clear();
        }
        trace.validate();
        traces.push_back(std::move(trace));
    }
    return traces;
}

namespace detail {

struct ChartGeometry {
    static constexpr double kWidth = 800.0;
    static constexpr double kHeight = 300.0;
    static constexpr double kLeft = 55.0;
    static constexpr double kRight = 660.0;   // legend lives to the right
    static constexpr double kTop = 34.0;
    static constexpr double kBottom = 266.0;
};

inline std::string polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                            const char* colour, const char* dash) {
    std::string points;
    for (std::size_t i = 0; i < xs.size(); ++i)
        points += fmt2(xs[i]) + "," + fmt2(ys[i]) + " ";
    std::string out = "  <polyline fill=\"none\" stroke=\"" + std::string(colour) +
                      "\" stroke-width=\"1.5\"";
    if (dash && *dash) out += " stroke-dasharray=\"" + std::string(dash) + "\"";
    out += " points=\"" + points + "\"/>\n";
    return out;
}

/// One 800x300 chart for a single emotion, offset vertically by `y_shift`.
inline std::string emotion_chart(const DynamicsTrace& trace, std::size_t e, double y_shift) {
    using G = ChartGeometry;
    const std::size_t n = trace.length();

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    auto take = [&](double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    };
    for (std::size_t t = 0; t < n; ++t) {
        take(trace.verse_scores[t][e]);
        if (trace.has_gold) take(trace.gold[t][e]);
        if (trace.has_ssm) {
            take(trace.ssm_mean[t][e] - trace.ssm_sd[t][e]);
            take(trace.ssm_mean[t][e] + trace.ssm_sd[t][e]);
        }
    }
    if (!(hi > lo)) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    auto x_at = [&](std::size_t t) {
        if (n == 1) return 0.5 * (G::kLeft + G::kRight);
        return G::kLeft + (G::kRight - G::kLeft) * static_cast<double>(t) /
                              static_cast<double>(n - 1);
    };
    auto y_at = [&](double v) {
        return y_shift + G::kBottom - (G::kBottom - G::kTop) * (v - lo) / (hi - lo);
    };

    std::string svg;
    svg += "  <g>\n";
    svg += "  <rect x=\"0\" y=\"" + fmt2(y_shift) + "\" width=\"" + fmt2(G::kWidth) +
           "\" height=\"" + fmt2(G::kHeight) + "\" fill=\"white\" stroke=\"#ddd\"/>\n";
    svg += "  <text x=\"" + fmt2(G::kLeft) + "\" y=\"" + fmt2(y_shift + 20.0) +
           "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#333\">" + trace.song_id +
           " / " + kEmotionNames[e] + "</text>\n";
    // axes
    svg += "  <line x1=\"" + fmt2(G::kLeft) + "\" y1=\"" + fmt2(y_shift + G::kBottom) +
           "\" x2=\"" + fmt2(G::kRight) + "\" y2=\"" + fmt2(y_shift + G::kBottom) +
           "\" stroke=\"#999\"/>\n";
    svg += "  <line x1=\"" + fmt2(G::kLeft) + "\" y1=\"" + fmt2(y_shift + G::kTop) +
           "\" x2=\"" + fmt2(G::kLeft) + "\" y2=\"" + fmt2(y_shift + G::kBottom) +
           "\" stroke=\"#999\"/>\n";
    svg += "  <text x=\"8\" y=\"" + fmt2(y_at(hi - pad) + 4) +
           "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#666\">" + fmt(hi - pad) +
           "</text>\n";
    svg += "  <text x=\"8\" y=\"" + fmt2(y_at(lo + pad)) +
           "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#666\">" + fmt(lo + pad) +
           "</text>\n";

    std::vector<double> xs(n);
    for (std::size_t t = 0; t < n; ++t) xs[t] = x_at(t);

    if (trace.has_ssm) {
        // +-1 sigma band as a closed polygon
        std::string points;
        for (std::size_t t = 0; t < n; ++t)
            points += fmt2(xs[t]) + "," +
                      fmt2(y_at(trace.ssm_mean[t][e] + trace.ssm_sd[t][e])) + " ";
        for (std::size_t t = n; t-- > 0;)
            points += fmt2(xs[t]) + "," +
                      fmt2(y_at(trace.ssm_mean[t][e] - trace.ssm_sd[t][e])) + " ";
        svg += "  <polygon fill=\"#4477aa\" fill-opacity=\"0.15\" stroke=\"none\" points=\"" +
               points + "\"/>\n";
    }

    std::vector<double> ys(n);
    if (trace.has_gold) {
        for (std::size_t t = 0; t < n; ++t) ys[t] = y_at(trace.gold[t][e]);
        svg += polyline(xs, ys, "#228833", "");
    }
    for (std::size_t t = 0; t < n; ++t) ys[t] = y_at(trace.verse_scores[t][e]);
    svg += polyline(xs, ys, "#bbbbbb", "4 3");
    if (trace.has_ssm) {
        for (std::size_t t = 0; t < n; ++t) ys[t] = y_at(trace.ssm_mean[t][e]);
        svg += polyline(xs, ys, "#4477aa", "");
    }

    // legend
    const double lx = G::kRight + 16.0;
    double ly = y_shift + G::kTop + 10.0;
    auto legend_row = [&](const char* colour, const std::string& label, const char* dash) {
        std::string row = "  <line x1=\"" + fmt2(lx) + "\" y1=\"" + fmt2(ly) + "\" x2=\"" +
                          fmt2(lx + 26.0) + "\" y2=\"" + fmt2(ly) + "\" stroke=\"" + colour +
                          "\" stroke-width=\"2\"";
        if (dash && *dash) row += " stroke-dasharray=\"" + std::string(dash) + "\"";
        row += "/>\n  <text x=\"" + fmt2(lx + 32.0) + "\" y=\"" + fmt2(ly + 4.0) +
               "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">" + label +
               "</text>\n";
        ly += 18.0;
        return row;
    };
    if (trace.has_gold) svg += legend_row("#228833", "gold", "");
    svg += legend_row("#bbbbbb", "verse-level", "4 3");
    if (trace.has_ssm) {
        svg += legend_row("#4477aa", "ssm", "");
        svg += "  <rect x=\"" + fmt2(lx) + "\" y=\"" + fmt2(ly - 5.0) +
               "\" width=\"26\" height=\"10\" fill=\"#4477aa\" fill-opacity=\"0.15\"/>\n" +
               "  <text x=\"" + fmt2(lx + 32.0) + "\" y=\"" + fmt2(ly + 4.0) +
               "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">+-1 sigma</text>\n";
    }
    svg += "  </g>\n";
    return svg;
}

}  // namespace detail

/// One stacked SVG per song: a fixed 800x300 chart per emotion.
inline std::string trace_to_svg(const DynamicsTrace& trace) {
    trace.validate();
    using G = detail::ChartGeometry;
    const double total_height = G::kHeight * static_cast<double>(kEmotionCount);
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      detail::fmt2(G::kWidth) + "\" height=\"" + detail::fmt2(total_height) +
                      "\" viewBox=\"0 0 " + detail::fmt2(G::kWidth) + " " +
                      detail::fmt2(total_height) + "\">\n";
    for (std::size_t e = 0; e < kEmotionCount; ++e)
        svg += detail::emotion_chart(trace, e, G::kHeight * static_cast<double>(e));
    svg += "</svg>\n";
    return svg;
}

/// Writes one trace in the requested format. CSV gets the long-format rows
/// with a header; SVG gets the stacked per-emotion charts.
inline void emit_plot(const DynamicsTrace& trace, PlotFormat format,
                      const std::filesystem::path& path) {
    trace.validate();
    std::string payload;
    if (format == PlotFormat::csv) {
        payload = std::string(kTraceCsvHeader) + "\n";
        append_trace_csv(payload, trace);
    } else {
        payload = trace_to_svg(trace);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write plot file: " + path.string());
    out << payload;
    if (!out.good()) throw InputError("failed while writing plot file: " + path.string());
}

}  // namespace emodyn::plot
