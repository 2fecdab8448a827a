#ifndef PATCHYRX_PBS_HPP
#define PATCHYRX_PBS_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "patchyrx/geometry.hpp"

namespace patchyrx {

/// What happens when a step segment reaches the receiver surface:
/// patchy mode absorbs only inside patches, full_absorb absorbs every hit,
/// reflect_all absorbs nothing.
enum class BoundaryMode { patchy, full_absorb, reflect_all };

struct SimConfig {
    double dt = 1e-5;        // s (desk-scale default)
    double t_end = 1.0;      // s
    int realizations = 200;  // desk-scale default
    std::uint64_t seed = 1;
    double bin_width = 1e-2;  // s
    ChannelParams params;
    std::optional<PatchLayout> layout;  // required in patchy mode
    BoundaryMode mode = BoundaryMode::patchy;
    /// Resolve molecules still alive at the horizon by the exact eventual
    /// first-passage probability r_R / |x|; valid only for full_absorb with
    /// k_d = 0, where that identity holds.
    bool resolve_survivors_at_horizon = false;
    /// 0 selects PATCHYRX_THREADS or, failing that, the hardware thread
    /// count. Results are bit-identical for every worker count.
    int workers = 0;

    void validate() const;
};

/// Binned absorption counts over one simulation.
/// Count identity: sum(hit_counts) + degraded_count + survivors
/// = realizations * N_sigma exactly; tail_absorbed (horizon resolution) is a
/// subset of survivors and is reported separately.
struct HittingStats {
    std::vector<double> bin_edges;          // n_bins + 1 entries, seconds
    std::vector<std::uint64_t> hit_counts;  // n_bins entries
    std::uint64_t degraded_count = 0;
    std::uint64_t survivors = 0;
    std::uint64_t tail_absorbed = 0;
    int realizations = 0;
    std::int64_t N_sigma = 0;
};

/// Brownian-dynamics estimate of the hitting statistics. Per realization:
/// a fresh transmitter location uniform on the r_0 sphere, N_sigma molecules
/// released there, and per step (1) degradation with probability
/// 1 - exp(-k_d dt) before the move, (2) an isotropic Gaussian displacement
/// with per-axis standard deviation sqrt(2 D dt), (3) on entering the
/// receiver sphere, absorption at the first segment crossing if the boundary
/// mode says so, otherwise return to the step-start position. Hits are
/// recorded at the step midpoint time. Each realization draws from its own
/// (seed, realization-index) stream, so any worker count reproduces the same
/// statistics bit for bit.
HittingStats simulate(const SimConfig& config);

/// First crossing of the segment from step_start to step_end with the sphere
/// of radius r_R centered at the origin, as a unit direction; empty when the
/// segment never reaches the sphere. step_start must satisfy
/// |step_start| >= r_R.
std::optional<Vec3> absorbed_location_check(const Vec3& step_start, const Vec3& step_end,
                                            double r_R);

/// Per-bin rates (t_mid, hit_counts / (realizations * bin_width)), directly
/// comparable to N_sigma * h_p(t_mid).
std::vector<std::pair<double, double>> empirical_hitting_rate(const HittingStats& stats);

/// Fraction of released molecules absorbed in bins fully contained in [0, t].
double empirical_cumulative(const HittingStats& stats, double t);

}  // namespace patchyrx

#endif
