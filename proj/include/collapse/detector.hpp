#pragma once

#include <algorithm>
#include <cmath>

#include "collapse/errors.hpp"
#include "collapse/state.hpp"

namespace collapse {

// Reduced description of the beam-splitter experiments: only p = |c_R|^2 is
// tracked. Every stochastic factor of the reduced dynamics is real, so the
// phases never feed back and (p, t) is the complete state.
struct TwoLevelState {
    double p;  // |c_R|^2, dimensionless
    double t;  // s
};

struct DetectorParams {
    double a;      // cm, pointer shift between "ready" and "clicked"
    double gamma;  // cm^-2 s^-1
    double T;      // s, activation time; 0 = instantaneous coupling

    void validate() const {
        detail::require(a > 0.0 && gamma > 0.0 && std::isfinite(gamma * a * a),
                        "DetectorParams: need a > 0, gamma > 0, finite gamma*a^2");
        detail::require(T >= 0.0, "DetectorParams: activation time must be >= 0");
    }
};

// Piecewise-linear activation of the system/detector coupling, fully developed
// at time T.
struct ActivationProfile {
    double T;  // s
};

// beta(t) = min(t/T, 1); the T = 0 limit is instantaneous switching.
inline double activation_beta(double t, const ActivationProfile& profile) {
    detail::require(t >= 0.0, "activation_beta: t must be >= 0");
    if (profile.T <= 0.0) return 1.0;
    return std::min(t / profile.T, 1.0);
}

namespace detail {

// Common increment of both reduced models: u = kick * p * (1-p), where kick
// already contains 2 a sqrt(gamma) beta(t) and the noise realization. Using
// one shared product keeps p' + q' = 1 an algebraic identity before clamping.
inline double two_level_increment(double p, double kick) {
    return kick * p * (1.0 - p);
}

inline double clamp_unit(double p) { return std::clamp(p, 0.0, 1.0); }

} // namespace detail

// One step of the single-detector reduced dynamics,
//   p' = [1 + 2 a sqrt(gamma) beta(t) (1-p) dB] p,
// clamped to [0, 1]. Clamping only fires in the tail left open by the
// stability guard; the exact process keeps p inside on its own. beta is
// evaluated at the step's start time (left-point rule).
inline TwoLevelState one_detector_step(const TwoLevelState& s, const DetectorParams& params,
                                       double dt, double dB) {
    const double beta = activation_beta(s.t, ActivationProfile{params.T});
    const double kick = 2.0 * params.a * std::sqrt(params.gamma) * beta * dB;
    const double p_raw = s.p + detail::two_level_increment(s.p, kick);
    return TwoLevelState{detail::clamp_unit(p_raw), s.t + dt};
}

// Two identical detectors: the two noises enter only through dC = dB_R - dB_L,
// which has variance 2 dt. Common-mode noise cancels exactly.
inline TwoLevelState two_detector_step(const TwoLevelState& s, const DetectorParams& params,
                                       double dt, double dBR, double dBL) {
    const double beta = activation_beta(s.t, ActivationProfile{params.T});
    const double kick = 2.0 * params.a * std::sqrt(params.gamma) * beta * (dBR - dBL);
    const double p_raw = s.p + detail::two_level_increment(s.p, kick);
    return TwoLevelState{detail::clamp_unit(p_raw), s.t + dt};
}

// Bridge from the full D=2 state (index 1 = R sector) to the reduced model.
inline TwoLevelState reduced_from_full(const StateVector& state) {
    detail::require(state.dim() == 2, "reduced_from_full: state must be two-dimensional");
    return TwoLevelState{state.probability(1), 0.0};
}

} // namespace collapse
