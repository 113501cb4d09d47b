#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "collapse/ensemble.hpp"
#include "collapse/errors.hpp"

namespace collapse {

// First-passage counts per time bin, split by convergence side. The total
// count over all bins equals the number of resolved paths.
struct ConvergenceHistogram {
    std::vector<double> bin_edges;       // n_bins + 1 edges over [0, t_max], s
    std::vector<std::int64_t> counts_R;  // paths reaching p >= 1-eps per bin
    std::vector<std::int64_t> counts_L;  // paths reaching p <= eps per bin
};

enum class Conditioning { all_paths, converged_R_only };

// Fraction of paths still in superposition (p strictly inside (eps, 1-eps))
// at each recorded time; nonincreasing because paths freeze after passage.
struct PersistenceCurve {
    std::vector<double> times;     // s, the shared record grid
    std::vector<double> fraction;  // in [0, 1]
    Conditioning conditioning = Conditioning::all_paths;
};

struct EnsembleSummary {
    double born_fraction_R = 0.0;  // resolved paths that converged to R
    double born_stderr = 0.0;      // binomial sqrt(f(1-f)/n_resolved)
    double median_fpt_R = std::numeric_limits<double>::quiet_NaN();  // s
    double median_fpt_L = std::numeric_limits<double>::quiet_NaN();  // s
    std::int64_t unresolved_count = 0;
    double mean_p_drift = 0.0;     // mean p(t_max) - p0, martingale diagnostic
};

namespace detail {

inline double median_of(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    double hi = values[mid];
    if (values.size() % 2 == 1) return hi;
    const double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

} // namespace detail

// Fraction of resolved paths that converged to the R sector, with binomial
// standard error, per-side median first-passage times, and the ensemble-mean
// drift of p at t_max relative to p0.
inline EnsembleSummary born_fraction(const Ensemble& e) {
    EnsembleSummary s;
    std::int64_t n_R = 0, n_L = 0;
    std::vector<double> fpt_R, fpt_L;
    double p_final_sum = 0.0;
    for (const auto& path : e.paths) {
        p_final_sum += path.samples.back().p;
        switch (path.outcome) {
            case Outcome::converged_R:
                ++n_R;
                fpt_R.push_back(*path.first_passage_time);
                break;
            case Outcome::converged_L:
                ++n_L;
                fpt_L.push_back(*path.first_passage_time);
                break;
            case Outcome::unresolved:
                ++s.unresolved_count;
                break;
        }
    }
    const std::int64_t n_resolved = n_R + n_L;
    if (n_resolved == 0) throw empty_statistics_error("born_fraction: no resolved paths");

    s.born_fraction_R = static_cast<double>(n_R) / static_cast<double>(n_resolved);
    s.born_stderr = std::sqrt(s.born_fraction_R * (1.0 - s.born_fraction_R) /
                              static_cast<double>(n_resolved));
    s.median_fpt_R = detail::median_of(std::move(fpt_R));
    s.median_fpt_L = detail::median_of(std::move(fpt_L));
    s.mean_p_drift = p_final_sum / static_cast<double>(e.paths.size()) - e.config.p0;
    return s;
}

// Bins first-passage times by outcome over [0, t_max]; unresolved paths are
// excluded (they are reported separately, not discarded).
inline ConvergenceHistogram first_passage_histogram(const Ensemble& e, std::int64_t n_bins) {
    detail::require(n_bins >= 1, "first_passage_histogram: need n_bins >= 1");
    ConvergenceHistogram h;
    h.bin_edges.resize(static_cast<std::size_t>(n_bins) + 1);
    const double width = e.config.t_max / static_cast<double>(n_bins);
    for (std::int64_t b = 0; b <= n_bins; ++b)
        h.bin_edges[static_cast<std::size_t>(b)] = static_cast<double>(b) * width;
    h.counts_R.assign(static_cast<std::size_t>(n_bins), 0);
    h.counts_L.assign(static_cast<std::size_t>(n_bins), 0);

    for (const auto& path : e.paths) {
        if (path.outcome == Outcome::unresolved) continue;
        auto bin = static_cast<std::int64_t>(*path.first_passage_time / width);
        bin = std::clamp<std::int64_t>(bin, 0, n_bins - 1);
        (path.outcome == Outcome::converged_R ? h.counts_R : h.counts_L)[static_cast<std::size_t>(bin)]++;
    }
    return h;
}

// Persistence of the superposition: per recorded time, the fraction of paths
// (optionally restricted to those that end on R) with p strictly inside
// (eps, 1-eps). Denominator is the conditioned path count.
inline PersistenceCurve persistence_curve(const Ensemble& e, Conditioning conditioning) {
    detail::require(!e.paths.empty() && !e.paths.front().samples.empty(),
                    "persistence_curve: ensemble has no recorded samples");
    const std::size_t n_times = e.paths.front().samples.size();
    PersistenceCurve curve;
    curve.conditioning = conditioning;
    curve.times.resize(n_times);
    for (std::size_t j = 0; j < n_times; ++j) curve.times[j] = e.paths.front().samples[j].t;

    std::vector<std::int64_t> inside(n_times, 0);
    std::int64_t denom = 0;
    const double eps = e.config.epsilon;
    for (const auto& path : e.paths) {
        if (conditioning == Conditioning::converged_R_only && path.outcome != Outcome::converged_R)
            continue;
        ++denom;
        detail::require(path.samples.size() == n_times,
                        "persistence_curve: paths must share one record grid");
        for (std::size_t j = 0; j < n_times; ++j) {
            const double p = path.samples[j].p;
            if (p > eps && p < 1.0 - eps) ++inside[j];
        }
    }
    curve.fraction.resize(n_times, 0.0);
    if (denom > 0) {
        for (std::size_t j = 0; j < n_times; ++j)
            curve.fraction[j] = static_cast<double>(inside[j]) / static_cast<double>(denom);
    }
    return curve;
}

// Two-sample Kolmogorov-Smirnov distance sup_x |F_a(x) - F_b(x)|.
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
    detail::require(!a.empty() && !b.empty(), "ks_distance: samples must be nonempty");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

// p(t_star) for every path: the latest recorded sample at or before t_star.
inline std::vector<double> values_at(const Ensemble& e, double t_star) {
    detail::require(!e.paths.empty() && !e.paths.front().samples.empty(),
                    "values_at: ensemble has no recorded samples");
    const auto& grid = e.paths.front().samples;
    const double tol = 1e-9 * (std::abs(grid.back().t) + std::abs(grid.front().t));
    detail::require(t_star >= grid.front().t - tol && t_star <= grid.back().t + tol,
                    "values_at: t_star outside the recorded range");
    std::size_t idx = grid.size() - 1;
    if (t_star < grid.back().t) {
        idx = 0;
        for (std::size_t j = 0; j < grid.size() && grid[j].t <= t_star; ++j) idx = j;
    }

    std::vector<double> values;
    values.reserve(e.paths.size());
    for (const auto& path : e.paths) {
        detail::require(path.samples.size() == grid.size(),
                        "values_at: paths must share one record grid");
        values.push_back(path.samples[idx].p);
    }
    return values;
}

// KS distance between the p(t_star) distributions of two ensembles sharing
// p0 and pointer geometry; used to quantify hitting -> continuous convergence
// at fixed alpha*lambda = 2*gamma.
inline double equivalence_test(const Ensemble& hitting, const Ensemble& continuous, double t_star) {
    detail::require(hitting.config.p0 == continuous.config.p0,
                    "equivalence_test: ensembles must share p0");
    detail::require(hitting.config.params.a == continuous.config.params.a,
                    "equivalence_test: ensembles must share the pointer shift");
    return ks_distance(values_at(hitting, t_star), values_at(continuous, t_star));
}

} // namespace collapse
