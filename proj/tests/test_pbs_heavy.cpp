#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "patchyrx/analytic_cir.hpp"
#include "patchyrx/capacitance.hpp"
#include "patchyrx/pbs.hpp"

using namespace patchyrx;

namespace {

double capture_fraction(const HittingStats& stats) {
    std::uint64_t total = 0;
    for (std::uint64_t c : stats.hit_counts) total += c;
    return static_cast<double>(total) /
           (static_cast<double>(stats.realizations) *
            static_cast<double>(stats.N_sigma));
}

}  // namespace

TEST_CASE("halving the time step leaves the capture fraction statistically unchanged") {
    SimConfig cfg;
    cfg.t_end = 0.5;
    cfg.realizations = 100;
    cfg.params.N_sigma = 200;
    cfg.bin_width = 0.01;
    cfg.layout = fibonacci_layout(5, 0.1, 10.0);

    cfg.dt = 2e-5;
    cfg.seed = 21;
    const double coarse = capture_fraction(simulate(cfg));

    cfg.dt = 1e-5;
    cfg.seed = 22;
    const double fine = capture_fraction(simulate(cfg));

    // two independent runs differ by sampling noise only if the time-step
    // bias is already below it; 9 binomial standard errors leaves room for
    // both runs' noise
    const double n = 100.0 * 200.0;
    const double mean = 0.5 * (coarse + fine);
    REQUIRE(mean > 0.0);
    const double se = std::sqrt(mean * (1.0 - mean) / n);
    CHECK(std::fabs(coarse - fine) <= 9.0 * se);
}

TEST_CASE("binned hitting counts track the analytic rate curve") {
    const PatchLayout layout = fibonacci_layout(11, 0.05, 10.0);
    SimConfig cfg;
    cfg.dt = 1e-5;
    cfg.t_end = 1.0;
    cfg.realizations = 100;
    cfg.seed = 1;
    cfg.bin_width = 0.01;
    cfg.params.N_sigma = 1000;
    cfg.layout = layout;
    const HittingStats stats = simulate(cfg);

    const ChannelParams& p = cfg.params;
    const double w_e = effective_channel(layout, p.D_sigma).w_e;
    const double released =
        static_cast<double>(cfg.realizations) * static_cast<double>(p.N_sigma);

    // per-bin expected counts from the closed-form cumulative fraction;
    // counts are (approximately Poisson) sums over independent molecules
    std::size_t within_band = 0;
    const std::size_t n_bins = stats.hit_counts.size();
    REQUIRE(n_bins == 100);
    double H_lo = 0.0;
    for (std::size_t i = 0; i < n_bins; ++i) {
        const double H_hi =
            cumulative_fraction_uniform(stats.bin_edges[i + 1], w_e, p);
        const double expected = released * (H_hi - H_lo);
        const double band = 3.0 * std::sqrt(std::max(expected, 1.0));
        if (std::fabs(static_cast<double>(stats.hit_counts[i]) - expected) <= band) {
            ++within_band;
        }
        H_lo = H_hi;
    }
    CHECK(within_band >= 95);

    for (double t : {0.25, 0.5, 1.0}) {
        const double H_emp = empirical_cumulative(stats, t);
        const double H_ref = cumulative_fraction_uniform(t, w_e, p);
        CHECK(std::fabs(H_emp - H_ref) <= 0.1 * H_ref);
    }
}
