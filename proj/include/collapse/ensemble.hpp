#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "collapse/continuous.hpp"
#include "collapse/detector.hpp"
#include "collapse/errors.hpp"
#include "collapse/hitting.hpp"
#include "collapse/rng.hpp"
#include "collapse/state.hpp"

namespace collapse {

enum class Model { one_detector, two_detector, full_continuous, full_hitting };

enum class Outcome { converged_R, converged_L, unresolved };

// Everything a run needs; a run is a pure function of this struct.
struct RunConfig {
    Model model = Model::one_detector;
    DetectorParams params{};    // a, gamma, T for every model
    HittingConfig hitting{};    // alpha, lambda; full_hitting only
    double p0 = 0.5;            // initial |c_R|^2
    double dt = 0.0;            // s, integration step (also the record grid unit)
    double t_max = 0.0;         // s
    std::int64_t n_paths = 1;
    double epsilon = 0.0;       // convergence threshold, usually 1/n_paths
    std::uint64_t master_seed = 0;
    std::int64_t record_stride = 1;

    void validate() const {
        params.validate();
        detail::require(p0 >= 0.0 && p0 <= 1.0, "RunConfig: p0 must lie in [0, 1]");
        detail::require(dt > 0.0 && t_max > 0.0, "RunConfig: dt and t_max must be positive");
        detail::require(n_paths >= 1, "RunConfig: n_paths must be >= 1");
        detail::require(epsilon > 0.0 && epsilon < 0.5, "RunConfig: epsilon must lie in (0, 0.5)");
        detail::require(record_stride >= 1, "RunConfig: record_stride must be >= 1");
        if (model == Model::full_hitting) {
            hitting.validate();
            if (params.T > 0.0)
                throw config_error("RunConfig: activation is defined only for the continuous models");
        } else if (dt * params.gamma * params.a * params.a > 0.01) {
            throw config_error("RunConfig: stability guard dt*gamma*a^2 <= 0.01 violated");
        }
    }

    std::int64_t step_count() const {
        const double ratio = t_max / dt;
        return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(ratio - 1e-9)));
    }
};

struct Sample {
    double t;  // s
    double p;  // |c_R|^2 at t
};

struct PathRecord {
    std::vector<Sample> samples;                 // one per record step, t ascending
    std::optional<double> first_passage_time;    // s; set iff outcome != unresolved
    Outcome outcome = Outcome::unresolved;
};

struct Ensemble {
    RunConfig config;
    std::vector<PathRecord> paths;
};

namespace detail {

// Emits samples on the shared grid {0, stride, 2*stride, ..., n_steps} * dt.
class SampleRecorder {
public:
    SampleRecorder(std::vector<Sample>& out, double dt, std::int64_t stride, std::int64_t n_steps)
        : out_(out), dt_(dt), stride_(stride), n_steps_(n_steps) {
        out_.reserve(static_cast<std::size_t>(n_steps / stride) + 2);
    }

    bool is_record_step(std::int64_t k) const {
        return k % stride_ == 0 || k == n_steps_;
    }

    void record(std::int64_t k, double p) { out_.push_back({static_cast<double>(k) * dt_, p}); }

    // Fills every record step in (last recorded, k_limit] with a constant p.
    void fill_through(std::int64_t k_limit, double p) {
        while (next_ <= k_limit) {
            if (is_record_step(next_)) record(next_, p);
            ++next_;
        }
    }

    std::int64_t next_step() const { return next_; }

private:
    std::vector<Sample>& out_;
    double dt_;
    std::int64_t stride_;
    std::int64_t n_steps_;
    std::int64_t next_ = 0;
};

// First-passage bookkeeping: paths are frozen at the exact eigenstate (0 or 1)
// once they leave (epsilon, 1-epsilon); the eigenstate is a fixed point of all
// four dynamics, so freezing matches continued integration.
struct PassageMonitor {
    double epsilon;
    Outcome outcome = Outcome::unresolved;
    double first_passage_time = 0.0;

    // Returns the frozen value if p has passed, otherwise p unchanged.
    double observe(double p, double t) {
        if (outcome != Outcome::unresolved) return p;
        if (p >= 1.0 - epsilon) {
            outcome = Outcome::converged_R;
            first_passage_time = t;
            return 1.0;
        }
        if (p <= epsilon) {
            outcome = Outcome::converged_L;
            first_passage_time = t;
            return 0.0;
        }
        return p;
    }

    bool frozen() const { return outcome != Outcome::unresolved; }
};

inline PathRecord run_reduced_path(const RunConfig& cfg, PathRng& rng) {
    const std::int64_t n_steps = cfg.step_count();
    PathRecord rec;
    SampleRecorder recorder(rec.samples, cfg.dt, cfg.record_stride, n_steps);
    PassageMonitor monitor{cfg.epsilon};
    const double sqrt_dt = std::sqrt(cfg.dt);

    TwoLevelState s{monitor.observe(cfg.p0, 0.0), 0.0};
    recorder.fill_through(0, s.p);

    for (std::int64_t k = 0; k < n_steps && !monitor.frozen(); ++k) {
        if (cfg.model == Model::one_detector) {
            s = one_detector_step(s, cfg.params, cfg.dt, rng.gaussian() * sqrt_dt);
        } else {
            const double dBR = rng.gaussian() * sqrt_dt;
            const double dBL = rng.gaussian() * sqrt_dt;
            s = two_detector_step(s, cfg.params, cfg.dt, dBR, dBL);
        }
        s.p = monitor.observe(s.p, s.t);
        if (recorder.is_record_step(k + 1)) recorder.fill_through(k + 1, s.p);
    }
    recorder.fill_through(n_steps, monitor.frozen() ? (monitor.outcome == Outcome::converged_R ? 1.0 : 0.0)
                                                    : s.p);

    rec.outcome = monitor.outcome;
    if (monitor.frozen()) rec.first_passage_time = monitor.first_passage_time;
    return rec;
}

inline PathRecord run_full_continuous_path(const RunConfig& cfg, PathRng& rng) {
    const std::int64_t n_steps = cfg.step_count();
    PathRecord rec;
    SampleRecorder recorder(rec.samples, cfg.dt, cfg.record_stride, n_steps);
    PassageMonitor monitor{cfg.epsilon};
    const double sqrt_dt = std::sqrt(cfg.dt);
    const ObservableSet obs = ObservableSet::pointer(cfg.params.a);
    const ActivationProfile activation{cfg.params.T};

    StateVector state = StateVector::two_level(monitor.observe(cfg.p0, 0.0));
    recorder.fill_through(0, state.probability(1));

    for (std::int64_t k = 0; k < n_steps && !monitor.frozen(); ++k) {
        // Activation scales the pointer separation by beta(t); with fixed
        // eigenvalues (0, a) that is exactly gamma -> gamma * beta^2.
        const double beta = activation_beta(static_cast<double>(k) * cfg.dt, activation);
        const double noise = rng.gaussian() * sqrt_dt;
        double p = state.probability(1);
        if (beta > 0.0) {
            const ContinuousConfig ccfg{cfg.params.gamma * beta * beta, cfg.dt};
            state = continuous_step(state, obs, ccfg, {&noise, 1});
            p = state.probability(1);
        }
        p = monitor.observe(p, static_cast<double>(k + 1) * cfg.dt);
        if (monitor.frozen()) state = StateVector::two_level(p);
        if (recorder.is_record_step(k + 1)) recorder.fill_through(k + 1, p);
    }
    recorder.fill_through(n_steps, state.probability(1));

    rec.outcome = monitor.outcome;
    if (monitor.frozen()) rec.first_passage_time = monitor.first_passage_time;
    return rec;
}

inline PathRecord run_full_hitting_path(const RunConfig& cfg, PathRng& rng) {
    const std::int64_t n_steps = cfg.step_count();
    PathRecord rec;
    SampleRecorder recorder(rec.samples, cfg.dt, cfg.record_stride, n_steps);
    PassageMonitor monitor{cfg.epsilon};
    const ObservableSet obs = ObservableSet::pointer(cfg.params.a);

    double p = monitor.observe(cfg.p0, 0.0);
    StateVector state = StateVector::two_level(p);
    recorder.fill_through(0, p);

    double t_hit = hitting_waiting_time(cfg.hitting.lambda, rng);
    while (!monitor.frozen() && t_hit <= cfg.t_max) {
        // Record every grid point the process passed while constant.
        const auto k_before = static_cast<std::int64_t>(std::floor(t_hit / cfg.dt - 1e-12));
        recorder.fill_through(std::min(k_before, n_steps), p);

        for (int attempt = 0; ; ++attempt) {
            const std::vector<double> center =
                sample_hitting_center(state, obs, cfg.hitting.alpha, rng);
            try {
                state = apply_sharpening(state, obs, center, cfg.hitting.alpha).state;
                break;
            } catch (const degenerate_hit_error&) {
                if (attempt >= 128) throw;  // not reachable for centers drawn from the hit law
            }
        }
        p = monitor.observe(state.probability(1), t_hit);
        if (monitor.frozen()) state = StateVector::two_level(p);
        t_hit += hitting_waiting_time(cfg.hitting.lambda, rng);
    }
    recorder.fill_through(n_steps, p);

    rec.outcome = monitor.outcome;
    if (monitor.frozen()) rec.first_passage_time = monitor.first_passage_time;
    return rec;
}

} // namespace detail

// Simulates one path: iterates the configured model from p0 at t = 0 until
// first passage or t_max, sampling on the shared record grid. Pure function of
// (cfg, path_index); the per-path stream comes from derive_path_rng.
inline PathRecord run_path(const RunConfig& cfg, std::uint64_t path_index) {
    cfg.validate();
    PathRng rng = derive_path_rng(cfg.master_seed, path_index);
    switch (cfg.model) {
        case Model::full_continuous:
            return detail::run_full_continuous_path(cfg, rng);
        case Model::full_hitting:
            return detail::run_full_hitting_path(cfg, rng);
        default:
            return detail::run_reduced_path(cfg, rng);
    }
}

// Runs all paths, optionally across threads. Each path owns its RNG and its
// output slot, so the result is identical for any thread count or schedule.
inline Ensemble run_ensemble(const RunConfig& cfg, unsigned n_threads = 0) {
    cfg.validate();
    if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(
        std::min<std::int64_t>(n_threads, cfg.n_paths));

    Ensemble ensemble{cfg, std::vector<PathRecord>(static_cast<std::size_t>(cfg.n_paths))};
    if (n_threads <= 1) {
        for (std::int64_t i = 0; i < cfg.n_paths; ++i)
            ensemble.paths[static_cast<std::size_t>(i)] = run_path(cfg, static_cast<std::uint64_t>(i));
        return ensemble;
    }

    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::int64_t i = next.fetch_add(1);
            if (i >= cfg.n_paths) return;
            try {
                ensemble.paths[static_cast<std::size_t>(i)] =
                    run_path(cfg, static_cast<std::uint64_t>(i));
            } catch (...) {
                std::scoped_lock lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return ensemble;
}

} // namespace collapse
