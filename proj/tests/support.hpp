#pragma once

// Shared oracles and generators for the test suite. Everything here is
// independent of the library's own sampling/statistics paths: quadrature for
// densities, direct moment formulas, and a tiny config factory.

#include <cmath>
#include <functional>
#include <vector>

#include "collapse/collapse.hpp"

namespace testsupport {

// Composite Simpson rule on [lo, hi]; n subintervals (rounded up to even).
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int n) {
    if (n % 2 == 1) ++n;
    const double h = (hi - lo) / n;
    double acc = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) acc += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
};

inline Moments moments(const std::vector<double>& xs) {
    Moments m;
    const double n = static_cast<double>(xs.size());
    for (double x : xs) m.mean += x;
    m.mean /= n;
    double m2 = 0.0, m3 = 0.0;
    for (double x : xs) {
        const double d = x - m.mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m.variance = m2;
    m.skewness = m3 / std::pow(m2, 1.5);
    return m;
}

// gamma_2 detector: 1 mm^3 pointer, a = 1 mm.
inline collapse::DetectorParams gamma2_params(double T = 0.0) {
    return collapse::DetectorParams{0.1, 0.5e11, T};
}

// gamma_1 detector: 1 cm^3 pointer, a = 1 cm.
inline collapse::DetectorParams gamma1_params(double T = 0.0) {
    return collapse::DetectorParams{1.0, 0.5e14, T};
}

inline collapse::RunConfig base_run(collapse::Model model, const collapse::DetectorParams& params,
                                    double p0, std::int64_t n_paths, std::uint64_t seed) {
    collapse::RunConfig cfg;
    cfg.model = model;
    cfg.params = params;
    cfg.p0 = p0;
    cfg.n_paths = n_paths;
    cfg.master_seed = seed;
    const double drive = params.gamma * params.a * params.a;
    cfg.dt = 1e-3 / (4.0 * drive);
    cfg.t_max = 40.0 / drive + 2.0 * params.T;
    cfg.epsilon = 1.0 / static_cast<double>(n_paths);
    cfg.record_stride = std::max<std::int64_t>(1, cfg.step_count() / 1000);
    return cfg;
}

} // namespace testsupport
