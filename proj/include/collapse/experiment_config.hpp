#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "collapse/ensemble.hpp"
#include "collapse/errors.hpp"

namespace collapse {

// Named parameter sets: effectiveness gamma in cm^-2 s^-1 plus, for the
// macroscopic detectors, the pointer shift in cm.
struct Preset {
    std::string name;
    double gamma;
    std::optional<double> a;
    std::string note;
};

inline const std::vector<Preset>& presets() {
    static const std::vector<Preset> table = {
        {"gamma_micro", 0.5e-9, std::nullopt, "single constituent"},
        {"gamma_1", 0.5e14, 1.0, "1 cm^3 detector (10^23 constituents), a = 1 cm"},
        {"gamma_2", 0.5e11, 0.1, "1 mm^3 detector (10^20 constituents), a = 1 mm"},
    };
    return table;
}

// Parsed experiment description in internal units (cm, s). Optional fields
// fall back to derived defaults in resolve().
struct ExperimentConfig {
    Model model = Model::one_detector;
    double gamma = 0.0;  // cm^-2 s^-1
    double a = 0.0;      // cm
    double T = 0.0;      // s
    double p0 = 0.5;
    std::int64_t n_paths = 1;
    std::uint64_t seed = 0;
    std::optional<double> dt;       // s
    std::optional<double> t_max;    // s
    std::optional<double> epsilon;
    std::optional<std::int64_t> record_stride;
    std::optional<double> alpha;    // cm^-2, hitting only
    std::optional<double> lambda;   // s^-1, hitting only

    bool operator==(const ExperimentConfig&) const = default;

    RunConfig resolve(std::vector<std::string>* warnings = nullptr) const;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

[[noreturn]] inline void fail_key(const std::string& key, int line, const std::string& message) {
    throw parse_error(key + " (line " + std::to_string(line) + "): " + message);
}

inline double parse_double(std::string_view text, const std::string& key, int line,
                           std::string_view* rest = nullptr) {
    text = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr == text.data()) fail_key(key, line, "expected a number");
    if (rest)
        *rest = trim(std::string_view(ptr, static_cast<std::size_t>(text.data() + text.size() - ptr)));
    else if (ptr != text.data() + text.size() && !trim({ptr, static_cast<std::size_t>(text.data() + text.size() - ptr)}).empty())
        fail_key(key, line, "trailing characters after number");
    return value;
}

// Times accept "s" (or bare) and "ns"; everything is stored in seconds.
inline double parse_time(std::string_view text, const std::string& key, int line) {
    std::string_view unit;
    const double value = parse_double(text, key, line, &unit);
    if (unit.empty() || unit == "s") return value;
    if (unit == "ns") return value * 1e-9;
    fail_key(key, line, "unknown time unit '" + std::string(unit) + "' (use s or ns)");
}

// Lengths accept "cm" (or bare) and "mm"; everything is stored in cm.
inline double parse_length(std::string_view text, const std::string& key, int line) {
    std::string_view unit;
    const double value = parse_double(text, key, line, &unit);
    if (unit.empty() || unit == "cm") return value;
    if (unit == "mm") return value * 0.1;
    fail_key(key, line, "unknown length unit '" + std::string(unit) + "' (use cm or mm)");
}

// p0 accepts decimals and exact fractions such as 2/3.
inline double parse_probability(std::string_view text, const std::string& key, int line) {
    text = trim(text);
    double value;
    const auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        const double num = parse_double(text.substr(0, slash), key, line);
        const double den = parse_double(text.substr(slash + 1), key, line);
        if (den == 0.0) fail_key(key, line, "zero denominator");
        value = num / den;
    } else {
        value = parse_double(text, key, line);
    }
    if (!(value >= 0.0 && value <= 1.0)) fail_key(key, line, "value must lie in [0, 1]");
    return value;
}

template <typename Int>
inline Int parse_integer(std::string_view text, const std::string& key, int line) {
    text = trim(text);
    Int value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        fail_key(key, line, "expected an integer");
    return value;
}

inline Model parse_model(std::string_view text, const std::string& key, int line) {
    text = trim(text);
    if (text == "one_detector") return Model::one_detector;
    if (text == "two_detector") return Model::two_detector;
    if (text == "full_continuous") return Model::full_continuous;
    if (text == "full_hitting") return Model::full_hitting;
    fail_key(key, line,
             "unknown model '" + std::string(text) +
                 "' (one_detector, two_detector, full_continuous, full_hitting)");
}

inline std::string model_name(Model m) {
    switch (m) {
        case Model::one_detector: return "one_detector";
        case Model::two_detector: return "two_detector";
        case Model::full_continuous: return "full_continuous";
        case Model::full_hitting: return "full_hitting";
    }
    return "?";
}

inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace detail

// Parses the line-oriented "key = value" format. '#' starts a comment,
// "[section]" headers are allowed and purely organizational, units convert to
// internal cm/s on the spot. Every diagnostic carries key and line number.
inline ExperimentConfig parse_config(std::string_view text) {
    struct Pending {
        std::string value;
        int line;
    };
    std::map<std::string, Pending> entries;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw parse_error("section (line " + std::to_string(line_no) + "): missing closing ']'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw parse_error("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key{detail::trim(line.substr(0, eq))};
        const std::string value{detail::trim(line.substr(eq + 1))};
        if (key.empty()) throw parse_error("line " + std::to_string(line_no) + ": empty key");
        if (!entries.emplace(key, Pending{value, line_no}).second)
            detail::fail_key(key, line_no, "duplicate key");
    }

    static const char* const known[] = {"model",   "preset",  "gamma",         "a",
                                        "T",       "p0",      "n_paths",       "seed",
                                        "dt",      "t_max",   "epsilon",       "record_stride",
                                        "alpha",   "lambda"};
    for (const auto& [key, pending] : entries) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) detail::fail_key(key, pending.line, "unknown key");
    }

    ExperimentConfig cfg;
    std::optional<Preset> preset;
    if (auto it = entries.find("preset"); it != entries.end()) {
        for (const auto& p : presets())
            if (p.name == it->second.value) preset = p;
        if (!preset)
            detail::fail_key("preset", it->second.line,
                             "unknown preset '" + it->second.value + "' (gamma_micro, gamma_1, gamma_2)");
    }

    auto lookup = [&](const char* key) -> const Pending* {
        const auto it = entries.find(key);
        return it == entries.end() ? nullptr : &it->second;
    };

    std::vector<std::string> missing;
    if (const auto* e = lookup("model"))
        cfg.model = detail::parse_model(e->value, "model", e->line);
    else
        missing.push_back("model");

    if (const auto* e = lookup("gamma"))
        cfg.gamma = detail::parse_double(e->value, "gamma", e->line);
    else if (preset)
        cfg.gamma = preset->gamma;
    else
        missing.push_back("gamma (or preset)");

    if (const auto* e = lookup("a"))
        cfg.a = detail::parse_length(e->value, "a", e->line);
    else if (preset && preset->a)
        cfg.a = *preset->a;
    else
        missing.push_back("a (or a preset that provides it)");

    if (const auto* e = lookup("p0"))
        cfg.p0 = detail::parse_probability(e->value, "p0", e->line);
    else
        missing.push_back("p0");

    if (const auto* e = lookup("n_paths"))
        cfg.n_paths = detail::parse_integer<std::int64_t>(e->value, "n_paths", e->line);
    else
        missing.push_back("n_paths");

    if (const auto* e = lookup("seed"))
        cfg.seed = detail::parse_integer<std::uint64_t>(e->value, "seed", e->line);
    else
        missing.push_back("seed");

    if (const auto* e = lookup("T")) cfg.T = detail::parse_time(e->value, "T", e->line);
    if (const auto* e = lookup("dt")) {
        cfg.dt = detail::parse_time(e->value, "dt", e->line);
        if (*cfg.dt <= 0.0) detail::fail_key("dt", e->line, "must be positive");
    }
    if (const auto* e = lookup("t_max")) {
        cfg.t_max = detail::parse_time(e->value, "t_max", e->line);
        if (*cfg.t_max <= 0.0) detail::fail_key("t_max", e->line, "must be positive");
    }
    if (const auto* e = lookup("epsilon")) {
        cfg.epsilon = detail::parse_double(e->value, "epsilon", e->line);
        if (!(*cfg.epsilon > 0.0 && *cfg.epsilon < 0.5))
            detail::fail_key("epsilon", e->line, "must lie in (0, 0.5)");
    }
    if (const auto* e = lookup("record_stride")) {
        cfg.record_stride = detail::parse_integer<std::int64_t>(e->value, "record_stride", e->line);
        if (*cfg.record_stride < 1) detail::fail_key("record_stride", e->line, "must be >= 1");
    }
    if (const auto* e = lookup("alpha")) {
        cfg.alpha = detail::parse_double(e->value, "alpha", e->line);
        if (*cfg.alpha <= 0.0) detail::fail_key("alpha", e->line, "must be positive");
    }
    if (const auto* e = lookup("lambda")) {
        cfg.lambda = detail::parse_double(e->value, "lambda", e->line);
        if (*cfg.lambda <= 0.0) detail::fail_key("lambda", e->line, "must be positive");
    }

    if (!missing.empty()) {
        std::string msg = "missing required keys:";
        for (const auto& m : missing) msg += " " + m + ",";
        msg.pop_back();
        throw parse_error(msg);
    }
    if (cfg.gamma <= 0.0) throw parse_error("gamma: must be positive");
    if (cfg.a <= 0.0) throw parse_error("a: must be positive");
    if (cfg.T < 0.0) throw parse_error("T: must be >= 0");
    if (cfg.n_paths < 1) throw parse_error("n_paths: must be >= 1");
    return cfg;
}

// Serializes in internal units with shortest round-trip formatting;
// parse_config(emit_config(c)) == c for every valid config.
inline std::string emit_config(const ExperimentConfig& cfg) {
    std::string out;
    auto put = [&out](const std::string& key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += "\n";
    };
    put("model", detail::model_name(cfg.model));
    put("gamma", detail::format_double(cfg.gamma));
    put("a", detail::format_double(cfg.a));
    put("T", detail::format_double(cfg.T));
    put("p0", detail::format_double(cfg.p0));
    put("n_paths", std::to_string(cfg.n_paths));
    put("seed", std::to_string(cfg.seed));
    if (cfg.dt) put("dt", detail::format_double(*cfg.dt));
    if (cfg.t_max) put("t_max", detail::format_double(*cfg.t_max));
    if (cfg.epsilon) put("epsilon", detail::format_double(*cfg.epsilon));
    if (cfg.record_stride) put("record_stride", std::to_string(*cfg.record_stride));
    if (cfg.alpha) put("alpha", detail::format_double(*cfg.alpha));
    if (cfg.lambda) put("lambda", detail::format_double(*cfg.lambda));
    return out;
}

inline RunConfig ExperimentConfig::resolve(std::vector<std::string>* warnings) const {
    RunConfig run;
    run.model = model;
    run.params = DetectorParams{a, gamma, T};
    run.p0 = p0;
    run.n_paths = n_paths;
    run.master_seed = seed;
    run.epsilon = epsilon.value_or(1.0 / static_cast<double>(n_paths));

    const double drive = gamma * a * a;  // characteristic reduction rate scale
    run.dt = dt.value_or(1e-3 / (4.0 * drive));
    run.t_max = t_max.value_or(40.0 / drive + 2.0 * T);

    if (model == Model::full_hitting) {
        if (alpha && lambda) {
            run.hitting = HittingConfig{*alpha, *lambda};
            if (warnings && std::abs(*alpha * *lambda - 2.0 * gamma) > 1e-9 * 2.0 * gamma)
                warnings->push_back("alpha*lambda differs from 2*gamma; dt/t_max defaults use gamma");
        } else if (alpha) {
            run.hitting = HittingConfig{*alpha, 2.0 * gamma / *alpha};
        } else if (lambda) {
            run.hitting = HittingConfig{2.0 * gamma / *lambda, *lambda};
        } else {
            throw config_error("full_hitting requires alpha and/or lambda (alpha*lambda = 2*gamma)");
        }
    } else if (alpha || lambda) {
        throw config_error("alpha/lambda apply only to the full_hitting model");
    }

    const std::int64_t n_steps = run.step_count();
    run.record_stride = record_stride.value_or(std::max<std::int64_t>(1, n_steps / 1000));

    if (warnings && run.t_max < 5.0 / (4.0 * drive))
        warnings->push_back("t_max is below several multiples of 1/(4*gamma*a^2); few paths will resolve");
    run.validate();
    return run;
}

} // namespace collapse
