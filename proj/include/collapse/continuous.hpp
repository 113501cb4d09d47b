#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "collapse/errors.hpp"
#include "collapse/state.hpp"

namespace collapse {

// Brownian-driven localization: the state diffuses under
//   d|psi> = [ sqrt(gamma) (A - <A>) . dB - 1/2 gamma (A - <A>)^2 dt ] |psi>,
// integrated by Euler-Maruyama with exact renormalization each step.
struct ContinuousConfig {
    double gamma;  // cm^-2 s^-1, process effectiveness
    double dt;     // s

    // Per-step multiplicative noise stays <= 0.2 (negative Euler factors only
    // in the ~1e-6 tail); violating configs are rejected, never clamped.
    void validate(double max_spread) const {
        detail::require(gamma > 0.0 && dt > 0.0, "ContinuousConfig: gamma and dt must be positive");
        if (dt * gamma * max_spread * max_spread > 0.01) {
            throw config_error("ContinuousConfig: stability guard dt*gamma*spread^2 <= 0.01 violated");
        }
    }
};

// One Euler-Maruyama step. noises are the increments dB_m, drawn externally
// with variance dt. All factors are real: amplitude phases are unchanged, and
// a common eigenvector of every observable is an exact fixed point.
inline StateVector continuous_step(const StateVector& state, const ObservableSet& obs,
                                   const ContinuousConfig& cfg, std::span<const double> noises) {
    detail::require(obs.dim() == state.dim(), "continuous_step: observable/state dimensions differ");
    detail::require(noises.size() == obs.count(), "continuous_step: need one noise per observable");
    cfg.validate(obs.max_spread());

    const std::size_t k = obs.count();
    std::vector<double> mean(k);
    for (std::size_t m = 0; m < k; ++m) mean[m] = expectation(state, obs.eigenvalues(m));

    const double sqrt_gamma = std::sqrt(cfg.gamma);
    std::vector<complex_t> amps(state.dim());
    for (std::size_t i = 0; i < state.dim(); ++i) {
        double factor = 1.0;
        for (std::size_t m = 0; m < k; ++m) {
            const double dev = obs.eigenvalue(m, i) - mean[m];
            factor += sqrt_gamma * dev * noises[m] - 0.5 * cfg.gamma * dev * dev * cfg.dt;
        }
        amps[i] = state[i] * factor;
    }
    return StateVector(std::move(amps));
}

} // namespace collapse
