#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "collapse/output.hpp"
#include "collapse/svg_plot.hpp"

namespace fs = std::filesystem;
using collapse::ExperimentConfig;
using collapse::Model;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream stream(p, std::ios::binary);
    REQUIRE(stream);
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    return buffer.str();
}

int count_lines(const std::string& text) {
    int n = 0;
    for (const char c : text) n += c == '\n' ? 1 : 0;
    return n;
}

int count_occurrences(const std::string& text, const std::string& needle) {
    int n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

// Dimensionless two-level setup that converges within ~100 steps.
ExperimentConfig quick_config(std::uint64_t seed, std::int64_t n_paths) {
    ExperimentConfig cfg;
    cfg.model = Model::one_detector;
    cfg.gamma = 1.0;
    cfg.a = 1.0;
    cfg.T = 0.0;
    cfg.p0 = 0.5;
    cfg.n_paths = n_paths;
    cfg.seed = seed;
    cfg.dt = 2.5e-3;
    cfg.t_max = 10.0;
    cfg.epsilon = 1e-3;
    cfg.record_stride = 40;
    return cfg;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "collapse_tests" / name;
    fs::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("paths.csv has one row per recorded sample plus a header") {
    ExperimentConfig cfg = quick_config(3, 2);
    cfg.t_max = 2.5e-3 * 10.0;  // 10 steps
    cfg.record_stride = 5;      // records at steps 0, 5, 10 -> 3 samples/path
    cfg.epsilon = 1e-6;         // effectively no early freezing
    const fs::path dir = fresh_dir("rowcount");
    collapse::run_command(cfg, dir);
    const std::string csv = slurp(dir / "paths.csv");
    REQUIRE(count_lines(csv) == 1 + 2 * 3);
    REQUIRE(csv.rfind("path_index,t,p\n", 0) == 0);
}

TEST_CASE("equal seeds give identical manifests; different seeds differ") {
    const ExperimentConfig cfg = quick_config(11, 16);
    const auto m1 = collapse::run_command(cfg, fresh_dir("det_a"));
    const auto m2 = collapse::run_command(cfg, fresh_dir("det_b"));
    REQUIRE(m1.files.size() == m2.files.size());
    for (std::size_t i = 0; i < m1.files.size(); ++i) {
        REQUIRE(m1.files[i].name == m2.files[i].name);
        REQUIRE(m1.files[i].fnv1a64 == m2.files[i].fnv1a64);
    }
    ExperimentConfig other = quick_config(12, 16);
    const auto m3 = collapse::run_command(other, fresh_dir("det_c"));
    bool any_diff = false;
    for (std::size_t i = 0; i < m1.files.size(); ++i)
        any_diff = any_diff || m1.files[i].fnv1a64 != m3.files[i].fnv1a64;
    REQUIRE(any_diff);
}

TEST_CASE("summary.json echoes the configuration and the born statistics") {
    const ExperimentConfig cfg = quick_config(21, 400);
    const fs::path dir = fresh_dir("summary");
    collapse::run_command(cfg, dir);
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    REQUIRE(summary.at("seed").get<std::uint64_t>() == 21);
    REQUIRE(summary.at("config").at("model").get<std::string>() == "one_detector");
    REQUIRE(summary.at("config").at("n_paths").get<std::int64_t>() == 400);
    const double f = summary.at("born_fraction_R").get<double>();
    REQUIRE(std::abs(f - 0.5) < 3.0 * std::sqrt(0.25 / 400.0));
    const auto unresolved = summary.at("unresolved_count").get<std::int64_t>();
    REQUIRE(unresolved >= 0);
}

TEST_CASE("histogram.csv counts match summary.json resolved paths") {
    const ExperimentConfig cfg = quick_config(31, 200);
    const fs::path dir = fresh_dir("hist");
    collapse::run_command(cfg, dir);
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    const auto data = collapse::plot_detail::read_histogram_csv(dir);
    std::int64_t total = 0;
    for (std::size_t b = 0; b < data.count_R.size(); ++b) total += data.count_R[b] + data.count_L[b];
    REQUIRE(total == 200 - summary.at("unresolved_count").get<std::int64_t>());
}

TEST_CASE("an unwritable output directory raises io_error") {
    const ExperimentConfig cfg = quick_config(41, 2);
    REQUIRE_THROWS_AS(collapse::run_command(cfg, "/proc/definitely/not/writable"),
                      collapse::io_error);
}

TEST_CASE("paths SVG: polylines end on the eigenstate boundaries") {
    const ExperimentConfig cfg = quick_config(51, 64);
    const fs::path dir = fresh_dir("svg_paths");
    collapse::run_command(cfg, dir);
    const std::string svg = collapse::plot_command({dir}, collapse::PlotKind::paths);
    REQUIRE(count_occurrences(svg, "<polyline") == 64);
    // Resolved paths are frozen at 0 or 1; with this horizon all 64 resolve.
    REQUIRE(count_occurrences(svg, "data-final-p=\"1\"") +
                count_occurrences(svg, "data-final-p=\"0\"") ==
            64);
    REQUIRE(svg.find("t [ns]") != std::string::npos);
}

TEST_CASE("an empty run still renders axes") {
    const fs::path dir = fresh_dir("svg_empty");
    fs::create_directories(dir);
    std::ofstream(dir / "paths.csv") << "path_index,t,p\n";
    std::ofstream(dir / "summary.json") << R"({"config":{"T":0.0}})";
    const std::string svg = collapse::plot_command({dir}, collapse::PlotKind::paths);
    REQUIRE(count_occurrences(svg, "<polyline") == 0);
    REQUIRE(svg.find("class=\"axes\"") != std::string::npos);
    REQUIRE(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("histogram SVG bar data sums to the resolved path count") {
    const ExperimentConfig cfg = quick_config(61, 128);
    const fs::path dir = fresh_dir("svg_hist");
    collapse::run_command(cfg, dir);
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    const std::string svg = collapse::plot_command({dir}, collapse::PlotKind::histogram);

    std::int64_t sum = 0;
    const std::string key = "data-count=\"";
    for (auto pos = svg.find(key); pos != std::string::npos; pos = svg.find(key, pos + 1)) {
        const auto end = svg.find('"', pos + key.size());
        sum += std::stoll(svg.substr(pos + key.size(), end - pos - key.size()));
    }
    REQUIRE(sum == 128 - summary.at("unresolved_count").get<std::int64_t>());
}

TEST_CASE("persistence SVG draws both conditionings per run") {
    const ExperimentConfig cfg = quick_config(71, 64);
    const fs::path dir = fresh_dir("svg_pers");
    collapse::run_command(cfg, dir);
    const std::string svg = collapse::plot_command({dir}, collapse::PlotKind::persistence);
    REQUIRE(count_occurrences(svg, "data-series=\"all_paths\"") == 1);
    REQUIRE(count_occurrences(svg, "data-series=\"converged_R_only\"") == 1);
}

TEST_CASE("activated runs use the activated style") {
    ExperimentConfig cfg = quick_config(81, 8);
    cfg.T = 1.0;
    cfg.t_max = 12.0;
    const fs::path dir = fresh_dir("svg_act");
    collapse::run_command(cfg, dir);
    const std::string svg = collapse::plot_command({dir}, collapse::PlotKind::paths);
    REQUIRE(count_occurrences(svg, "class=\"series-on\"") == 8);
    REQUIRE(count_occurrences(svg, "class=\"series-off\"") == 0);
}

TEST_CASE("malformed CSV reports the row number") {
    const fs::path dir = fresh_dir("bad_csv");
    fs::create_directories(dir);
    std::ofstream(dir / "paths.csv") << "path_index,t,p\n0,0.0,0.5\n0,oops,0.5\n";
    std::ofstream(dir / "summary.json") << R"({"config":{"T":0.0}})";
    try {
        (void)collapse::plot_command({dir}, collapse::PlotKind::paths);
        FAIL("expected parse_error");
    } catch (const collapse::parse_error& e) {
        REQUIRE(std::string(e.what()).find("row 3") != std::string::npos);
    }
}

TEST_CASE("SVG output is deterministic") {
    const ExperimentConfig cfg = quick_config(91, 16);
    const fs::path dir_a = fresh_dir("svg_det_a");
    const fs::path dir_b = fresh_dir("svg_det_b");
    collapse::run_command(cfg, dir_a);
    collapse::run_command(cfg, dir_b);
    for (const auto kind :
         {collapse::PlotKind::paths, collapse::PlotKind::histogram, collapse::PlotKind::persistence}) {
        REQUIRE(collapse::plot_command({dir_a}, kind) == collapse::plot_command({dir_b}, kind));
    }
}
