#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "collapse/stats.hpp"
#include "support.hpp"

using collapse::Conditioning;
using collapse::Ensemble;
using collapse::Model;
using collapse::Outcome;

namespace {

Ensemble gamma2_ensemble(double p0, std::int64_t n, std::uint64_t seed, unsigned threads = 2) {
    const auto cfg = testsupport::base_run(Model::one_detector, testsupport::gamma2_params(), p0, n, seed);
    return collapse::run_ensemble(cfg, threads);
}

} // namespace

TEST_CASE("born summary from a fully converged p0 = 1 ensemble") {
    const auto e = gamma2_ensemble(1.0, 16, 3);
    const auto s = collapse::born_fraction(e);
    REQUIRE(s.born_fraction_R == 1.0);
    REQUIRE(s.born_stderr == 0.0);
    REQUIRE(s.unresolved_count == 0);
    REQUIRE(s.median_fpt_R == 0.0);
    REQUIRE(std::isnan(s.median_fpt_L));
    REQUIRE(s.mean_p_drift == 0.0);
}

TEST_CASE("born fractions for the paper-style starting conditions, N = 1000") {
    for (const auto& [p0, seed] : {std::pair{0.8, 101u}, std::pair{0.05, 202u}}) {
        const auto e = gamma2_ensemble(p0, 1000, seed);
        const auto s = collapse::born_fraction(e);
        const double band = 3.0 * std::sqrt(p0 * (1.0 - p0) / 1000.0);
        INFO("p0 = " << p0 << " fraction = " << s.born_fraction_R);
        REQUIRE(std::abs(s.born_fraction_R - p0) < band);
        REQUIRE(std::abs(s.mean_p_drift) < band);
        REQUIRE(s.born_stderr ==
                Catch::Approx(std::sqrt(s.born_fraction_R * (1.0 - s.born_fraction_R) /
                                        static_cast<double>(1000 - s.unresolved_count))));
    }
}

TEST_CASE("born_fraction on an unresolved-only ensemble is an error") {
    auto cfg = testsupport::base_run(Model::one_detector, testsupport::gamma2_params(), 0.5, 4, 7);
    cfg.t_max = cfg.dt * 4.0;  // far too short for any passage
    cfg.record_stride = 1;
    const auto e = collapse::run_ensemble(cfg, 1);
    REQUIRE_THROWS_AS(collapse::born_fraction(e), collapse::empty_statistics_error);
}

TEST_CASE("histogram counts every resolved path exactly once") {
    const auto e = gamma2_ensemble(0.5, 400, 11);
    const auto h = collapse::first_passage_histogram(e, 64);
    const auto s = collapse::born_fraction(e);
    const auto total = std::accumulate(h.counts_R.begin(), h.counts_R.end(), std::int64_t{0}) +
                       std::accumulate(h.counts_L.begin(), h.counts_L.end(), std::int64_t{0});
    REQUIRE(total == 400 - s.unresolved_count);
    REQUIRE(h.bin_edges.size() == 65);
    REQUIRE(h.bin_edges.front() == 0.0);
    REQUIRE(h.bin_edges.back() == Catch::Approx(e.config.t_max));
}

TEST_CASE("an immediately frozen ensemble lands in the first L bin") {
    const auto e = gamma2_ensemble(0.0, 32, 13);
    const auto h = collapse::first_passage_histogram(e, 10);
    REQUIRE(h.counts_L.front() == 32);
    REQUIRE(std::accumulate(h.counts_R.begin(), h.counts_R.end(), std::int64_t{0}) == 0);
}

TEST_CASE("persistence starts at one inside the thresholds and zero outside") {
    const auto inside = gamma2_ensemble(0.5, 64, 17);
    const auto curve = collapse::persistence_curve(inside, Conditioning::all_paths);
    REQUIRE(curve.fraction.front() == 1.0);

    const auto outside = gamma2_ensemble(1.0, 64, 17);
    REQUIRE(collapse::persistence_curve(outside, Conditioning::all_paths).fraction.front() == 0.0);
}

TEST_CASE("persistence is nonincreasing under freezing, for both conditionings") {
    const auto e = gamma2_ensemble(0.5, 256, 19);
    for (const auto conditioning : {Conditioning::all_paths, Conditioning::converged_R_only}) {
        const auto curve = collapse::persistence_curve(e, conditioning);
        for (std::size_t j = 1; j < curve.fraction.size(); ++j)
            REQUIRE(curve.fraction[j] <= curve.fraction[j - 1]);
        REQUIRE(curve.times.size() == curve.fraction.size());
    }
}

TEST_CASE("conditioned persistence uses the converged-to-R subset as denominator") {
    const auto e = gamma2_ensemble(0.5, 128, 23);
    std::int64_t n_R = 0;
    for (const auto& p : e.paths) n_R += p.outcome == Outcome::converged_R ? 1 : 0;
    REQUIRE(n_R > 0);
    const auto curve = collapse::persistence_curve(e, Conditioning::converged_R_only);
    // At t = 0 every conditioned path is still in superposition.
    REQUIRE(curve.fraction.front() == 1.0);
    // Fractions are multiples of 1/n_R.
    for (const double f : curve.fraction) {
        const double scaled = f * static_cast<double>(n_R);
        REQUIRE(std::abs(scaled - std::round(scaled)) < 1e-9);
    }
}

TEST_CASE("KS distance of an ensemble with itself is zero") {
    const auto e = gamma2_ensemble(0.5, 64, 29);
    const double t_star = e.config.t_max / 2.0;
    REQUIRE(collapse::equivalence_test(e, e, t_star) == 0.0);
}

TEST_CASE("same process, two seeds: KS distance below the 1% critical value") {
    // Dimensionless-scale two-level runs keep this cheap: gamma = 1, a = 1.
    collapse::RunConfig cfg;
    cfg.model = Model::one_detector;
    cfg.params = collapse::DetectorParams{1.0, 1.0, 0.0};
    cfg.p0 = 0.5;
    cfg.n_paths = 10'000;
    cfg.dt = 2.5e-3;
    cfg.t_max = 3.0;
    cfg.epsilon = 1e-4;
    cfg.record_stride = 60;
    cfg.master_seed = 31;
    const auto a = collapse::run_ensemble(cfg, 2);
    cfg.master_seed = 37;
    const auto b = collapse::run_ensemble(cfg, 2);
    const double d = collapse::equivalence_test(a, b, 1.5);
    REQUIRE(d < 1.63 * std::sqrt(2.0 / 10'000.0));
}

TEST_CASE("two detectors behave like one detector at doubled gamma (KS, 1e4 paths)") {
    collapse::RunConfig cfg;
    cfg.model = Model::two_detector;
    cfg.params = collapse::DetectorParams{1.0, 1.0, 0.0};
    cfg.p0 = 0.5;
    cfg.n_paths = 10'000;
    cfg.dt = 2.5e-3;
    cfg.t_max = 2.0;
    cfg.epsilon = 1e-4;
    cfg.record_stride = 40;
    cfg.master_seed = 41;
    const auto two_det = collapse::run_ensemble(cfg, 2);

    cfg.model = Model::one_detector;
    cfg.params.gamma = 2.0;
    cfg.master_seed = 43;
    const auto one_det_2g = collapse::run_ensemble(cfg, 2);

    const double d = collapse::equivalence_test(two_det, one_det_2g, 1.0);
    REQUIRE(d < 1.63 * std::sqrt(2.0 / 10'000.0));
}

TEST_CASE("values_at rejects times outside the recorded range") {
    const auto e = gamma2_ensemble(0.5, 8, 47);
    REQUIRE_THROWS_AS(collapse::values_at(e, -1.0), collapse::contract_error);
    REQUIRE_THROWS_AS(collapse::values_at(e, e.config.t_max * 1.5), collapse::contract_error);
    REQUIRE(collapse::values_at(e, e.config.t_max).size() == 8);
}

TEST_CASE("median helper: odd, even and empty inputs") {
    REQUIRE(collapse::detail::median_of({3.0, 1.0, 2.0}) == 2.0);
    REQUIRE(collapse::detail::median_of({4.0, 1.0, 2.0, 3.0}) == 2.5);
    REQUIRE(std::isnan(collapse::detail::median_of({})));
}
