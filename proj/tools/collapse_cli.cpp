// Command-line front end: run ensembles from config files, render SVG figures
// from run directories, compare hitting and continuous ensembles, and list the
// built-in parameter presets.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "collapse/collapse.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream stream(path, std::ios::binary);
    if (!stream) throw collapse::io_error("cannot open config: " + path.string());
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    return buffer.str();
}

collapse::ExperimentConfig load_config(const fs::path& path) {
    try {
        return collapse::parse_config(slurp(path));
    } catch (const collapse::parse_error& e) {
        throw collapse::parse_error(path.string() + ": " + e.what());
    }
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

int run_subcommand(const fs::path& config_path, const fs::path& out_dir, unsigned threads) {
    const auto cfg = load_config(config_path);
    std::vector<std::string> warnings;
    const auto manifest = collapse::run_command(cfg, out_dir, threads, &warnings);
    print_warnings(warnings);
    for (const auto& f : manifest.files)
        std::cout << f.name << "  " << collapse::detail::hex_u64(f.fnv1a64) << "\n";
    return 0;
}

int plot_subcommand(const std::string& kind_name, const std::vector<fs::path>& dirs,
                    fs::path out_path) {
    const auto kind = collapse::plot_kind_from_name(kind_name);
    const std::string svg = collapse::plot_command(dirs, kind);
    if (out_path.empty()) out_path = dirs.front() / (kind_name + ".svg");
    std::ofstream stream(out_path, std::ios::binary | std::ios::trunc);
    if (!stream) throw collapse::io_error("cannot open for writing: " + out_path.string());
    stream << svg;
    if (!stream) throw collapse::io_error("write failed: " + out_path.string());
    std::cout << out_path.string() << "\n";
    return 0;
}

int equivalence_subcommand(const fs::path& config_a, const fs::path& config_b,
                           const std::string& t_star_text, unsigned threads) {
    const double t_star = collapse::detail::parse_time(t_star_text, "t-star", 0);
    std::vector<std::string> warnings;
    const auto ens_a = collapse::run_ensemble(load_config(config_a).resolve(&warnings), threads);
    const auto ens_b = collapse::run_ensemble(load_config(config_b).resolve(&warnings), threads);
    print_warnings(warnings);
    const double d = collapse::equivalence_test(ens_a, ens_b, t_star);
    std::cout << "ks_distance = " << collapse::detail::format_double(d) << "\n";
    return 0;
}

int presets_subcommand() {
    std::printf("%-12s  %-14s  %-8s  %s\n", "name", "gamma [cm^-2/s]", "a [cm]", "note");
    for (const auto& p : collapse::presets()) {
        std::printf("%-12s  %-14g  %-8s  %s\n", p.name.c_str(), p.gamma,
                    p.a ? collapse::detail::format_double(*p.a).c_str() : "-", p.note.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo simulation of spontaneous collapse dynamics for beam-splitter experiments"};
    app.require_subcommand(1);

    fs::path config_path, out_dir, out_svg, config_a, config_b;
    std::vector<fs::path> plot_dirs;
    std::string plot_kind, t_star_text;
    unsigned threads = 0;

    auto* run = app.add_subcommand("run", "Run an ensemble from a config file");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_option("-o,--out", out_dir, "output directory")->required();
    run->add_option("--threads", threads, "worker threads (0 = hardware)");

    auto* plot = app.add_subcommand("plot", "Render an SVG figure from run output");
    plot->add_option("kind", plot_kind, "paths | histogram | persistence")->required();
    plot->add_option("dirs", plot_dirs, "run output directories")->required()->expected(-1);
    plot->add_option("-o,--out", out_svg, "output SVG path (default <dir>/<kind>.svg)");

    auto* equiv = app.add_subcommand("equivalence", "KS distance between two runs at a common time");
    equiv->add_option("configA", config_a, "first config (e.g. hitting)")->required();
    equiv->add_option("configB", config_b, "second config (e.g. continuous)")->required();
    equiv->add_option("--t-star", t_star_text, "comparison time, e.g. '3 ns'")->required();
    equiv->add_option("--threads", threads, "worker threads (0 = hardware)");

    app.add_subcommand("presets", "List built-in parameter presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("run")) return run_subcommand(config_path, out_dir, threads);
        if (app.got_subcommand("plot")) return plot_subcommand(plot_kind, plot_dirs, out_svg);
        if (app.got_subcommand("equivalence"))
            return equivalence_subcommand(config_a, config_b, t_star_text, threads);
        if (app.got_subcommand("presets")) return presets_subcommand();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
