#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "collapse/errors.hpp"
#include "collapse/rng.hpp"
#include "collapse/state.hpp"

namespace collapse {

// Discrete sharpening process: hits arrive with Poisson frequency lambda and
// multiply the state by a Gaussian of accuracy alpha around a random center.
// Only the product alpha*lambda is physically meaningful.
struct HittingConfig {
    double alpha;   // cm^-2, sharpening accuracy
    double lambda;  // s^-1, Poisson frequency

    void validate() const {
        detail::require(alpha > 0.0 && lambda > 0.0 && std::isfinite(alpha * lambda),
                        "HittingConfig: alpha and lambda must be positive with finite product");
    }
};

// Result of one hit: the renormalized post-hit state and the squared norm
// of the unnormalized sharpened state (the probability weight of the center).
struct SharpeningResult {
    StateVector state;
    double weight;
};

// Applies the sharpening multiplier: each amplitude is scaled by
// (alpha/pi)^(K/4) * exp(-alpha/2 * sum_m (a_m,i - x_m)^2), then the state is
// renormalized. Exponents are shifted by their maximum before exponentiation
// so the surviving components never underflow; the unshifted weight is
// reconstructed separately. Phases are untouched (all factors real).
inline SharpeningResult apply_sharpening(const StateVector& state, const ObservableSet& obs,
                                         std::span<const double> center, double alpha) {
    detail::require(obs.dim() == state.dim(), "apply_sharpening: observable/state dimensions differ");
    detail::require(center.size() == obs.count(), "apply_sharpening: center must have K components");
    detail::require(alpha > 0.0, "apply_sharpening: alpha must be positive");

    const std::size_t d = state.dim();
    const std::size_t k = obs.count();

    std::vector<double> log_factor(d, 0.0);
    double log_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d; ++i) {
        double dist2 = 0.0;
        for (std::size_t m = 0; m < k; ++m) {
            const double delta = obs.eigenvalue(m, i) - center[m];
            dist2 += delta * delta;
        }
        log_factor[i] = -0.5 * alpha * dist2;
        if (state.probability(i) > 0.0) log_max = std::max(log_max, log_factor[i]);
    }

    const double log_prefactor = 0.25 * static_cast<double>(k) * std::log(alpha / std::numbers::pi);

    // Hit so remote that the literal product c_i * S_i(x) underflows for every
    // populated component; callers reject and resample.
    constexpr double log_denorm_min = -1074.0 * 0.6931471805599453;  // ln(2^-1074)
    if (!(log_max + log_prefactor > log_denorm_min)) {
        throw degenerate_hit_error("apply_sharpening: all amplitudes underflow; hit rejected");
    }

    std::vector<complex_t> amps(d);
    double weight_shifted = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double f = std::exp(log_factor[i] - log_max);
        amps[i] = state[i] * f;
        weight_shifted += state.probability(i) * f * f;
    }

    // ||phi||^2 = (alpha/pi)^(K/2) * sum_i |c_i|^2 exp(2 log_factor_i).
    const double weight = std::exp(2.0 * (log_prefactor + log_max) + std::log(weight_shifted));
    return SharpeningResult{StateVector(std::move(amps)), weight};
}

// Draws a hit center from P(x) = ||S(x) psi||^2. For diagonal observables this
// density is exactly the mixture sum_i |c_i|^2 N(a_i, 1/(2 alpha) per
// component), so sampling is basis choice + K independent Gaussians.
inline std::vector<double> sample_hitting_center(const StateVector& state, const ObservableSet& obs,
                                                 double alpha, PathRng& rng) {
    detail::require(obs.dim() == state.dim(),
                    "sample_hitting_center: observable/state dimensions differ");
    detail::require(alpha > 0.0, "sample_hitting_center: alpha must be positive");

    const double u = rng.uniform();
    double cumulative = 0.0;
    std::size_t pick = state.dim() - 1;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        cumulative += state.probability(i);
        if (u < cumulative) {
            pick = i;
            break;
        }
    }

    const double sigma = std::sqrt(0.5 / alpha);
    std::vector<double> center(obs.count());
    for (std::size_t m = 0; m < obs.count(); ++m)
        center[m] = obs.eigenvalue(m, pick) + sigma * rng.gaussian();
    return center;
}

// Waiting time to the next hit: exponential with mean 1/lambda.
inline double hitting_waiting_time(double lambda, PathRng& rng) {
    detail::require(lambda > 0.0, "hitting_waiting_time: lambda must be positive");
    return rng.exponential(1.0 / lambda);
}

} // namespace collapse
