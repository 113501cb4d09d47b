#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "collapse/ensemble.hpp"
#include "collapse/errors.hpp"

namespace collapse {

enum class PlotKind { paths, histogram, persistence };

inline PlotKind plot_kind_from_name(std::string_view name) {
    if (name == "paths") return PlotKind::paths;
    if (name == "histogram") return PlotKind::histogram;
    if (name == "persistence") return PlotKind::persistence;
    throw contract_error("plot kind must be paths, histogram or persistence");
}

namespace plot_detail {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream stream(path, std::ios::binary);
    if (!stream) throw io_error("cannot open: " + path.string());
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    return buffer.str();
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(sep, pos);
        if (next == std::string_view::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
}

inline double parse_field(std::string_view text, const std::string& file, int row) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw parse_error(file + " row " + std::to_string(row) + ": bad number '" + std::string(text) + "'");
    return v;
}

// Applies fn(row_number, fields) to each data row after validating the header.
template <typename Fn>
inline void for_each_csv_row(const std::filesystem::path& path, std::string_view header, Fn&& fn) {
    const std::string content = read_file(path);
    const std::string name = path.filename().string();
    std::size_t pos = 0;
    int row = 0;
    while (pos < content.size()) {
        auto eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string_view line(content.data() + pos, eol - pos);
        pos = eol + 1;
        ++row;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (row == 1) {
            if (line != header)
                throw parse_error(name + " row 1: expected header '" + std::string(header) + "'");
            continue;
        }
        if (line.empty()) continue;
        fn(row, name, split(line, ','));
    }
}

struct PathsData {
    std::vector<std::vector<Sample>> paths;  // indexed by path_index
    double t_end = 0.0;
};

inline PathsData read_paths_csv(const std::filesystem::path& dir) {
    PathsData data;
    for_each_csv_row(dir / "paths.csv", "path_index,t,p",
                     [&](int row, const std::string& name, const std::vector<std::string_view>& f) {
                         if (f.size() != 3)
                             throw parse_error(name + " row " + std::to_string(row) + ": expected 3 fields");
                         const auto idx = static_cast<std::size_t>(parse_field(f[0], name, row));
                         if (idx >= data.paths.size()) data.paths.resize(idx + 1);
                         const double t = parse_field(f[1], name, row);
                         const double p = parse_field(f[2], name, row);
                         data.paths[idx].push_back({t, p});
                         data.t_end = std::max(data.t_end, t);
                     });
    return data;
}

struct HistogramData {
    std::vector<double> left, right;
    std::vector<std::int64_t> count_R, count_L;
};

inline HistogramData read_histogram_csv(const std::filesystem::path& dir) {
    HistogramData data;
    for_each_csv_row(dir / "histogram.csv", "bin_left,bin_right,count_R,count_L",
                     [&](int row, const std::string& name, const std::vector<std::string_view>& f) {
                         if (f.size() != 4)
                             throw parse_error(name + " row " + std::to_string(row) + ": expected 4 fields");
                         data.left.push_back(parse_field(f[0], name, row));
                         data.right.push_back(parse_field(f[1], name, row));
                         data.count_R.push_back(static_cast<std::int64_t>(parse_field(f[2], name, row)));
                         data.count_L.push_back(static_cast<std::int64_t>(parse_field(f[3], name, row)));
                     });
    return data;
}

struct PersistenceData {
    std::vector<double> t, all, cond_R;
};

inline PersistenceData read_persistence_csv(const std::filesystem::path& dir) {
    PersistenceData data;
    for_each_csv_row(dir / "persistence.csv", "t,fraction_all,fraction_converged_R",
                     [&](int row, const std::string& name, const std::vector<std::string_view>& f) {
                         if (f.size() != 3)
                             throw parse_error(name + " row " + std::to_string(row) + ": expected 3 fields");
                         data.t.push_back(parse_field(f[0], name, row));
                         data.all.push_back(parse_field(f[1], name, row));
                         data.cond_R.push_back(parse_field(f[2], name, row));
                     });
    return data;
}

inline bool run_is_activated(const std::filesystem::path& dir) {
    const auto summary = nlohmann::json::parse(read_file(dir / "summary.json"));
    return summary.at("config").at("T").get<double>() > 0.0;
}

inline std::string fixed2(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
    return std::string(buf, ptr);
}

inline std::string shortest(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

// Tick step of the form {1, 2, 5} * 10^k giving roughly `target` divisions.
inline double nice_step(double range, int target) {
    if (!(range > 0.0)) return 1.0;
    const double raw = range / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (const double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) return m * mag;
    }
    return 10.0 * mag;
}

struct Canvas {
    static constexpr double width = 960, height = 600;
    static constexpr double ml = 76, mr = 24, mt = 26, mb = 58;
    double x_max = 1.0, y_max = 1.0;
    std::string body;

    double x(double v) const { return ml + (width - ml - mr) * (v / x_max); }
    double y(double v) const { return height - mb - (height - mt - mb) * (v / y_max); }

    void axes(const std::string& x_label, const std::string& y_label) {
        body += "<g class=\"axes\">\n";
        body += "<line x1=\"" + fixed2(ml) + "\" y1=\"" + fixed2(height - mb) + "\" x2=\"" +
                fixed2(width - mr) + "\" y2=\"" + fixed2(height - mb) + "\"/>\n";
        body += "<line x1=\"" + fixed2(ml) + "\" y1=\"" + fixed2(height - mb) + "\" x2=\"" + fixed2(ml) +
                "\" y2=\"" + fixed2(mt) + "\"/>\n";
        const double dx = nice_step(x_max, 6);
        for (double v = 0.0; v <= x_max * (1.0 + 1e-9); v += dx) {
            body += "<line x1=\"" + fixed2(x(v)) + "\" y1=\"" + fixed2(height - mb) + "\" x2=\"" +
                    fixed2(x(v)) + "\" y2=\"" + fixed2(height - mb + 6) + "\"/>\n";
            body += "<text class=\"tick\" x=\"" + fixed2(x(v)) + "\" y=\"" + fixed2(height - mb + 22) +
                    "\" text-anchor=\"middle\">" + shortest(v) + "</text>\n";
        }
        const double dy = nice_step(y_max, 5);
        for (double v = 0.0; v <= y_max * (1.0 + 1e-9); v += dy) {
            body += "<line x1=\"" + fixed2(ml - 6) + "\" y1=\"" + fixed2(y(v)) + "\" x2=\"" + fixed2(ml) +
                    "\" y2=\"" + fixed2(y(v)) + "\"/>\n";
            body += "<text class=\"tick\" x=\"" + fixed2(ml - 10) + "\" y=\"" + fixed2(y(v) + 4) +
                    "\" text-anchor=\"end\">" + shortest(v) + "</text>\n";
        }
        body += "<text class=\"label\" x=\"" + fixed2((ml + width - mr) / 2) + "\" y=\"" +
                fixed2(height - 12) + "\" text-anchor=\"middle\">" + x_label + "</text>\n";
        body += "<text class=\"label\" transform=\"translate(20," + fixed2((mt + height - mb) / 2) +
                ") rotate(-90)\" text-anchor=\"middle\">" + y_label + "</text>\n";
        body += "</g>\n";
    }

    std::string finish() const {
        std::string out =
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"600\" "
            "viewBox=\"0 0 960 600\">\n"
            "<style>\n"
            ".axes line{stroke:#333;stroke-width:1}\n"
            "text{font-family:sans-serif;font-size:13px;fill:#333}\n"
            ".tick{font-size:11px}\n"
            ".series-off{stroke:#1f77b4}\n"
            ".series-on{stroke:#d62728}\n"
            ".bar-R-off{fill:#1f77b4}\n"
            ".bar-L-off{fill:#2ca02c}\n"
            ".bar-R-on{fill:#111111}\n"
            ".bar-L-on{fill:#d62728}\n"
            "polyline{fill:none}\n"
            "</style>\n"
            "<rect width=\"960\" height=\"600\" fill=\"white\"/>\n";
        out += body;
        out += "</svg>\n";
        return out;
    }
};

inline constexpr double ns = 1e-9;

inline std::string render_paths(const std::vector<std::filesystem::path>& dirs) {
    std::vector<PathsData> runs;
    std::vector<bool> activated;
    double t_end = 0.0;
    for (const auto& dir : dirs) {
        runs.push_back(read_paths_csv(dir));
        activated.push_back(run_is_activated(dir));
        t_end = std::max(t_end, runs.back().t_end);
    }
    Canvas canvas;
    canvas.x_max = t_end > 0.0 ? t_end / ns : 1.0;
    canvas.y_max = 1.0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const char* cls = activated[r] ? "series-on" : "series-off";
        for (const auto& path : runs[r].paths) {
            if (path.empty()) continue;
            std::string points;
            for (const auto& s : path) {
                points += fixed2(canvas.x(s.t / ns));
                points += ',';
                points += fixed2(canvas.y(s.p));
                points += ' ';
            }
            canvas.body += "<polyline class=\"" + std::string(cls) + "\" stroke-opacity=\"0.25\" data-final-p=\"" +
                           shortest(path.back().p) + "\" points=\"" + points + "\"/>\n";
        }
    }
    canvas.axes("t [ns]", "p (R-sector probability)");
    return canvas.finish();
}

inline std::string render_histogram(const std::vector<std::filesystem::path>& dirs) {
    std::vector<HistogramData> runs;
    std::vector<bool> activated;
    double t_end = 0.0;
    std::int64_t count_max = 1;
    for (const auto& dir : dirs) {
        runs.push_back(read_histogram_csv(dir));
        activated.push_back(run_is_activated(dir));
        if (!runs.back().right.empty()) t_end = std::max(t_end, runs.back().right.back());
        for (std::size_t b = 0; b < runs.back().count_R.size(); ++b)
            count_max = std::max({count_max, runs.back().count_R[b], runs.back().count_L[b]});
    }
    Canvas canvas;
    canvas.x_max = t_end > 0.0 ? t_end / ns : 1.0;
    canvas.y_max = static_cast<double>(count_max);
    const double base = canvas.y(0.0);
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto& h = runs[r];
        const std::string suffix = activated[r] ? "on" : "off";
        for (std::size_t b = 0; b < h.count_R.size(); ++b) {
            const double x0 = canvas.x(h.left[b] / ns);
            const double x1 = canvas.x(h.right[b] / ns);
            const double half = (x1 - x0) / 2.0;
            auto bar = [&](double x_left, std::int64_t count, const std::string& side) {
                if (count <= 0) return;
                const double top = canvas.y(static_cast<double>(count));
                canvas.body += "<rect class=\"bar-" + side + "-" + suffix + "\" fill-opacity=\"0.75\" x=\"" +
                               fixed2(x_left) + "\" y=\"" + fixed2(top) + "\" width=\"" + fixed2(half) +
                               "\" height=\"" + fixed2(base - top) + "\" data-count=\"" +
                               std::to_string(count) + "\"/>\n";
            };
            bar(x0, h.count_R[b], "R");
            bar(x0 + half, h.count_L[b], "L");
        }
    }
    canvas.axes("first-passage time [ns]", "paths per bin");
    return canvas.finish();
}

inline std::string render_persistence(const std::vector<std::filesystem::path>& dirs) {
    std::vector<PersistenceData> runs;
    std::vector<bool> activated;
    double t_end = 0.0;
    for (const auto& dir : dirs) {
        runs.push_back(read_persistence_csv(dir));
        activated.push_back(run_is_activated(dir));
        if (!runs.back().t.empty()) t_end = std::max(t_end, runs.back().t.back());
    }
    Canvas canvas;
    canvas.x_max = t_end > 0.0 ? t_end / ns : 1.0;
    canvas.y_max = 1.0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const char* cls = activated[r] ? "series-on" : "series-off";
        auto step_curve = [&](const std::vector<double>& values, const char* dash, const char* which) {
            if (runs[r].t.empty()) return;
            std::string points;
            for (std::size_t j = 0; j < runs[r].t.size(); ++j) {
                const double px = canvas.x(runs[r].t[j] / ns);
                if (j > 0) points += fixed2(px) + ',' + fixed2(canvas.y(values[j - 1])) + ' ';
                points += fixed2(px) + ',' + fixed2(canvas.y(values[j])) + ' ';
            }
            canvas.body += "<polyline class=\"" + std::string(cls) + "\" stroke-dasharray=\"" + dash +
                           "\" data-series=\"" + which + "\" points=\"" + points + "\"/>\n";
        };
        step_curve(runs[r].all, "none", "all_paths");
        step_curve(runs[r].cond_R, "6 3", "converged_R_only");
    }
    canvas.axes("t [ns]", "fraction in superposition");
    return canvas.finish();
}

} // namespace plot_detail

// Renders a standalone deterministic SVG (no timestamps, locale-free number
// formatting) from the CSV outputs of one or more run directories. Series
// style encodes the activation state of each run (blue: T = 0, red: T > 0).
inline std::string plot_command(const std::vector<std::filesystem::path>& run_dirs, PlotKind kind) {
    detail::require(!run_dirs.empty(), "plot_command: need at least one run directory");
    switch (kind) {
        case PlotKind::paths: return plot_detail::render_paths(run_dirs);
        case PlotKind::histogram: return plot_detail::render_histogram(run_dirs);
        case PlotKind::persistence: return plot_detail::render_persistence(run_dirs);
    }
    throw contract_error("plot_command: unknown kind");
}

} // namespace collapse
