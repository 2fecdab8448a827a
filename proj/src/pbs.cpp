#include "patchyrx/pbs.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>

#include "patchyrx/rng.hpp"

namespace patchyrx {

namespace {

struct RealizationTally {
    std::vector<std::uint64_t> hits;
    std::uint64_t degraded = 0;
    std::uint64_t survivors = 0;
    std::uint64_t tail_absorbed = 0;
};

int resolve_worker_count(int requested, int realizations) {
    int workers = requested;
    if (workers <= 0) {
        if (const char* env = std::getenv("PATCHYRX_THREADS")) {
            workers = std::atoi(env);
        }
    }
    if (workers <= 0) {
        workers = static_cast<int>(std::thread::hardware_concurrency());
    }
    if (workers < 1) workers = 1;
    if (workers > realizations) workers = realizations;
    return workers;
}

void run_realization(const SimConfig& config, std::uint64_t n_steps, std::size_t n_bins,
                     int realization, RealizationTally& out) {
    const ChannelParams& p = config.params;
    Rng rng = Rng::for_stream(config.seed, static_cast<std::uint64_t>(realization));
    const double sigma = std::sqrt(2.0 * p.D_sigma * config.dt);
    const double rR2 = p.r_R * p.r_R;
    const double kd_dt = p.k_d * config.dt;
    const Vec3 tx = uniform_tx_location(p.r_0, rng);
    const PatchLayout* layout = config.layout ? &*config.layout : nullptr;

    for (std::int64_t m = 0; m < p.N_sigma; ++m) {
        Vec3 pos = tx;
        // Pre-move degradation with per-step probability 1 - exp(-k_d dt) is
        // a geometric trial; one exponential draw fixes the death step of the
        // whole walk up front with the same distribution.
        std::uint64_t death_step = n_steps + 1;
        if (kd_dt > 0.0) {
            const double lifetime = -std::log(rng.next_double_pos()) / kd_dt;
            if (lifetime < static_cast<double>(n_steps)) {
                death_step = 1 + static_cast<std::uint64_t>(lifetime);
            }
        }

        bool alive = true;
        for (std::uint64_t k = 1; k <= n_steps; ++k) {
            if (k == death_step) {
                ++out.degraded;
                alive = false;
                break;
            }
            const Vec3 prev = pos;
            pos.x += sigma * rng.next_normal();
            pos.y += sigma * rng.next_normal();
            pos.z += sigma * rng.next_normal();
            if (pos.norm2() >= rR2) {
                continue;
            }
            const std::optional<Vec3> entry = absorbed_location_check(prev, pos, p.r_R);
            bool absorbed = false;
            if (entry) {
                switch (config.mode) {
                    case BoundaryMode::full_absorb:
                        absorbed = true;
                        break;
                    case BoundaryMode::reflect_all:
                        break;
                    case BoundaryMode::patchy:
                        for (const Patch& patch : layout->patches) {
                            if (point_in_patch(*entry, patch)) {
                                absorbed = true;
                                break;
                            }
                        }
                        break;
                }
            }
            if (absorbed) {
                const double t_hit = (static_cast<double>(k) - 0.5) * config.dt;
                std::size_t bin = static_cast<std::size_t>(t_hit / config.bin_width);
                if (bin >= n_bins) bin = n_bins - 1;
                ++out.hits[bin];
                alive = false;
                break;
            }
            pos = prev;
        }

        if (alive) {
            ++out.survivors;
            if (config.resolve_survivors_at_horizon) {
                // Eventual-absorption probability for a pure-absorber sphere
                // is exactly r_R / |pos|.
                if (rng.next_double() * pos.norm() < p.r_R) {
                    ++out.tail_absorbed;
                }
            }
        }
    }
}

}  // namespace

void SimConfig::validate() const {
    params.validate();
    if (!(dt > 0.0)) {
        throw std::invalid_argument("SimConfig: dt must be positive");
    }
    if (!(t_end >= dt)) {
        throw std::invalid_argument("SimConfig: t_end must be at least dt");
    }
    if (!(bin_width >= dt)) {
        throw std::invalid_argument("SimConfig: bin_width must be at least dt");
    }
    if (realizations < 1) {
        throw std::invalid_argument("SimConfig: realizations must be at least 1");
    }
    if (workers < 0) {
        throw std::invalid_argument("SimConfig: workers must be non-negative");
    }
    if (mode == BoundaryMode::patchy && !layout) {
        throw std::invalid_argument("SimConfig: patchy mode requires a patch layout");
    }
    if (layout && std::fabs(layout->r_R - params.r_R) > 1e-9 * params.r_R) {
        throw std::invalid_argument("SimConfig: layout r_R does not match channel r_R");
    }
    if (resolve_survivors_at_horizon &&
        (mode != BoundaryMode::full_absorb || params.k_d != 0.0)) {
        throw std::invalid_argument(
            "SimConfig: survivor resolution requires full_absorb mode with k_d = 0");
    }
}

HittingStats simulate(const SimConfig& config) {
    config.validate();

    const std::uint64_t n_steps =
        static_cast<std::uint64_t>(std::floor(config.t_end / config.dt + 1e-9));
    const double horizon = static_cast<double>(n_steps) * config.dt;
    const std::size_t n_bins =
        static_cast<std::size_t>(std::ceil(horizon / config.bin_width - 1e-9));

    HittingStats stats;
    stats.realizations = config.realizations;
    stats.N_sigma = config.params.N_sigma;
    stats.bin_edges.resize(n_bins + 1);
    for (std::size_t i = 0; i <= n_bins; ++i) {
        stats.bin_edges[i] = static_cast<double>(i) * config.bin_width;
    }
    stats.hit_counts.assign(n_bins, 0);

    const int workers = resolve_worker_count(config.workers, config.realizations);
    std::vector<RealizationTally> tallies(static_cast<std::size_t>(workers));
    for (RealizationTally& tally : tallies) {
        tally.hits.assign(n_bins, 0);
    }

    std::atomic<int> next_realization{0};
    auto work = [&](RealizationTally& out) {
        for (int r = next_realization.fetch_add(1); r < config.realizations;
             r = next_realization.fetch_add(1)) {
            run_realization(config, n_steps, n_bins, r, out);
        }
    };

    if (workers == 1) {
        work(tallies[0]);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (RealizationTally& tally : tallies) {
            pool.emplace_back(work, std::ref(tally));
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }

    for (const RealizationTally& tally : tallies) {
        for (std::size_t i = 0; i < n_bins; ++i) {
            stats.hit_counts[i] += tally.hits[i];
        }
        stats.degraded_count += tally.degraded;
        stats.survivors += tally.survivors;
        stats.tail_absorbed += tally.tail_absorbed;
    }
    return stats;
}

std::optional<Vec3> absorbed_location_check(const Vec3& step_start, const Vec3& step_end,
                                            double r_R) {
    if (!(r_R > 0.0)) {
        throw std::invalid_argument("absorbed_location_check: r_R must be positive");
    }
    const double rR2 = r_R * r_R;
    const double start2 = step_start.norm2();
    if (start2 < rR2 * (1.0 - 1e-12)) {
        throw std::invalid_argument(
            "absorbed_location_check: segment must start on or outside the sphere");
    }

    const Vec3 d = step_end - step_start;
    const double a = d.norm2();
    if (a == 0.0) {
        return std::nullopt;
    }
    const double b = 2.0 * step_start.dot(d);
    const double c = start2 - rR2;
    const double disc = b * b - 4.0 * a * c;
    if (disc <= 0.0) {
        return std::nullopt;
    }
    // q/a and c/q are the two roots; c/q keeps the root near zero accurate
    // when the start point sits close to the surface.
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    const double root_a = q / a;
    const double root_b = (q != 0.0) ? c / q : root_a;

    double lambda = std::numeric_limits<double>::infinity();
    if (root_a >= 0.0 && root_a <= 1.0) {
        lambda = root_a;
    }
    if (root_b >= 0.0 && root_b <= 1.0 && root_b < lambda) {
        lambda = root_b;
    }
    if (!(lambda <= 1.0)) {
        return std::nullopt;
    }
    return (step_start + d * lambda).normalized();
}

std::vector<std::pair<double, double>> empirical_hitting_rate(const HittingStats& stats) {
    std::vector<std::pair<double, double>> rates;
    rates.reserve(stats.hit_counts.size());
    for (std::size_t i = 0; i < stats.hit_counts.size(); ++i) {
        const double width = stats.bin_edges[i + 1] - stats.bin_edges[i];
        const double t_mid = 0.5 * (stats.bin_edges[i] + stats.bin_edges[i + 1]);
        const double rate =
            static_cast<double>(stats.hit_counts[i]) /
            (static_cast<double>(stats.realizations) * width);
        rates.emplace_back(t_mid, rate);
    }
    return rates;
}

double empirical_cumulative(const HittingStats& stats, double t) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < stats.hit_counts.size(); ++i) {
        if (stats.bin_edges[i + 1] > t + 1e-12) {
            break;
        }
        total += stats.hit_counts[i];
    }
    return static_cast<double>(total) / (static_cast<double>(stats.realizations) *
                                         static_cast<double>(stats.N_sigma));
}

}  // namespace patchyrx
