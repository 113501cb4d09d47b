#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "collapse/errors.hpp"

namespace collapse {

using complex_t = std::complex<double>;

// Normalized state |psi> over a finite basis 0..D-1. Every public operation
// that returns a StateVector leaves it with unit norm to 1e-12.
class StateVector {
public:
    explicit StateVector(std::vector<complex_t> amplitudes)
        : amps_(std::move(amplitudes)) {
        detail::require(!amps_.empty(), "StateVector: dimension must be >= 1");
        normalize();
    }

    // Two-level (L, R) state with the R sector holding probability p.
    static StateVector two_level(double p_right) {
        detail::require(p_right >= 0.0 && p_right <= 1.0,
                        "StateVector::two_level: p must lie in [0, 1]");
        return StateVector({complex_t(std::sqrt(1.0 - p_right), 0.0),
                            complex_t(std::sqrt(p_right), 0.0)});
    }

    std::size_t dim() const { return amps_.size(); }
    const complex_t& operator[](std::size_t i) const { return amps_[i]; }
    const std::vector<complex_t>& amplitudes() const { return amps_; }

    double probability(std::size_t i) const { return std::norm(amps_[i]); }

    double norm() const {
        double s = 0.0;
        for (const auto& c : amps_) s += std::norm(c);
        return std::sqrt(s);
    }

    // Used internally after multiplicative updates; keeps the class invariant.
    void normalize() {
        const double n = norm();
        detail::require(n > 0.0 && std::isfinite(n),
                        "StateVector: amplitudes must have nonzero finite norm");
        if (n != 1.0) {
            for (auto& c : amps_) c /= n;
        }
    }

    std::vector<complex_t>& mutable_amplitudes() { return amps_; }

private:
    std::vector<complex_t> amps_;
};

// K commuting observables, diagonal in the shared basis: one real eigenvalue
// vector of length D per observable. Units: pointer position, cm.
class ObservableSet {
public:
    explicit ObservableSet(std::vector<std::vector<double>> eigenvalues)
        : eig_(std::move(eigenvalues)) {
        detail::require(!eig_.empty(), "ObservableSet: need K >= 1 observables");
        const std::size_t d = eig_.front().size();
        detail::require(d >= 1, "ObservableSet: dimension must be >= 1");
        for (const auto& v : eig_)
            detail::require(v.size() == d, "ObservableSet: eigenvalue vectors must share one length");
    }

    // Single pointer observable with eigenvalues (0, a): "ready" and "clicked".
    static ObservableSet pointer(double shift) {
        return ObservableSet({{0.0, shift}});
    }

    std::size_t count() const { return eig_.size(); }
    std::size_t dim() const { return eig_.front().size(); }
    std::span<const double> eigenvalues(std::size_t m) const { return eig_[m]; }
    double eigenvalue(std::size_t m, std::size_t i) const { return eig_[m][i]; }

    // Largest eigenvalue spread over the set; enters the stability guard.
    double max_spread() const {
        double spread = 0.0;
        for (const auto& v : eig_) {
            double lo = v.front(), hi = v.front();
            for (double x : v) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
            spread = std::max(spread, hi - lo);
        }
        return spread;
    }

private:
    std::vector<std::vector<double>> eig_;
};

// <A>_psi = sum_i a_i |c_i|^2 for one eigenvalue vector.
inline double expectation(const StateVector& state, std::span<const double> eigenvalues) {
    detail::require(eigenvalues.size() == state.dim(),
                    "expectation: eigenvalue vector and state dimensions differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i)
        acc += eigenvalues[i] * state.probability(i);
    return acc;
}

} // namespace collapse
