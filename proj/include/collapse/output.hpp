#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "collapse/ensemble.hpp"
#include "collapse/experiment_config.hpp"
#include "collapse/stats.hpp"

namespace collapse {

struct ManifestEntry {
    std::string name;
    std::uint64_t fnv1a64;
};

struct RunManifest {
    std::vector<ManifestEntry> files;
};

namespace detail {

// FNV-1a 64-bit; a determinism checksum, not a cryptographic digest.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::string hex_u64(std::uint64_t v) {
    char buf[19] = "0x0000000000000000";
    for (int i = 0; i < 16; ++i) buf[17 - i] = "0123456789abcdef"[(v >> (4 * i)) & 0xF];
    return std::string(buf, 18);
}

inline void append_double(std::string& out, double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream stream(path, std::ios::binary | std::ios::trunc);
    if (!stream) throw io_error("cannot open for writing: " + path.string());
    stream.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!stream) throw io_error("write failed: " + path.string());
}

inline std::string paths_csv(const Ensemble& e) {
    std::string out = "path_index,t,p\n";
    for (std::size_t i = 0; i < e.paths.size(); ++i) {
        for (const auto& s : e.paths[i].samples) {
            out += std::to_string(i);
            out += ',';
            append_double(out, s.t);
            out += ',';
            append_double(out, s.p);
            out += '\n';
        }
    }
    return out;
}

inline std::string histogram_csv(const ConvergenceHistogram& h) {
    std::string out = "bin_left,bin_right,count_R,count_L\n";
    for (std::size_t b = 0; b + 1 < h.bin_edges.size(); ++b) {
        append_double(out, h.bin_edges[b]);
        out += ',';
        append_double(out, h.bin_edges[b + 1]);
        out += ',';
        out += std::to_string(h.counts_R[b]);
        out += ',';
        out += std::to_string(h.counts_L[b]);
        out += '\n';
    }
    return out;
}

inline std::string persistence_csv(const PersistenceCurve& all, const PersistenceCurve& cond) {
    std::string out = "t,fraction_all,fraction_converged_R\n";
    for (std::size_t j = 0; j < all.times.size(); ++j) {
        append_double(out, all.times[j]);
        out += ',';
        append_double(out, all.fraction[j]);
        out += ',';
        append_double(out, cond.fraction[j]);
        out += '\n';
    }
    return out;
}

inline nlohmann::json config_json(const ExperimentConfig& cfg, const RunConfig& run) {
    nlohmann::json j{
        {"model", model_name(cfg.model)},
        {"gamma", cfg.gamma},
        {"a", cfg.a},
        {"T", cfg.T},
        {"p0", cfg.p0},
        {"n_paths", cfg.n_paths},
        {"seed", cfg.seed},
        {"dt", run.dt},
        {"t_max", run.t_max},
        {"epsilon", run.epsilon},
        {"record_stride", run.record_stride},
    };
    if (cfg.model == Model::full_hitting) {
        j["alpha"] = run.hitting.alpha;
        j["lambda"] = run.hitting.lambda;
    }
    return j;
}

} // namespace detail

inline constexpr std::int64_t default_histogram_bins = 100;

// Runs the configured ensemble and writes paths.csv, summary.json,
// histogram.csv, persistence.csv and manifest.json into output_dir. All
// numbers are serialized with locale-independent shortest round-trip
// formatting, so equal seeds give byte-identical files.
inline RunManifest run_command(const ExperimentConfig& cfg, const std::filesystem::path& output_dir,
                               unsigned n_threads = 0, std::vector<std::string>* warnings = nullptr) {
    const RunConfig run = cfg.resolve(warnings);

    std::error_code ec;
    std::filesystem::create_directories(output_dir, ec);
    if (ec) throw io_error("cannot create output directory: " + output_dir.string());

    const Ensemble ensemble = run_ensemble(run, n_threads);

    const EnsembleSummary summary = [&] {
        try {
            return born_fraction(ensemble);
        } catch (const empty_statistics_error&) {
            EnsembleSummary s;  // nothing resolved: report the unresolved count only
            s.unresolved_count = run.n_paths;
            return s;
        }
    }();
    const ConvergenceHistogram hist = first_passage_histogram(ensemble, default_histogram_bins);
    const PersistenceCurve pers_all = persistence_curve(ensemble, Conditioning::all_paths);
    const PersistenceCurve pers_R = persistence_curve(ensemble, Conditioning::converged_R_only);

    nlohmann::json summary_json{
        {"born_fraction_R", summary.born_fraction_R},
        {"born_stderr", summary.born_stderr},
        {"median_fpt_R", summary.median_fpt_R},
        {"median_fpt_L", summary.median_fpt_L},
        {"unresolved_count", summary.unresolved_count},
        {"mean_p_drift", summary.mean_p_drift},
        {"config", detail::config_json(cfg, run)},
        {"seed", cfg.seed},
    };

    RunManifest manifest;
    auto emit = [&](const char* name, std::string content) {
        detail::write_file(output_dir / name, content);
        manifest.files.push_back({name, detail::fnv1a64(content)});
    };
    emit("paths.csv", detail::paths_csv(ensemble));
    emit("summary.json", summary_json.dump(2) + "\n");
    emit("histogram.csv", detail::histogram_csv(hist));
    emit("persistence.csv", detail::persistence_csv(pers_all, pers_R));

    nlohmann::json manifest_json;
    for (const auto& f : manifest.files)
        manifest_json["files"].push_back({{"name", f.name}, {"fnv1a64", detail::hex_u64(f.fnv1a64)}});
    detail::write_file(output_dir / "manifest.json", manifest_json.dump(2) + "\n");
    return manifest;
}

} // namespace collapse
