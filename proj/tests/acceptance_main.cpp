// Release gate for the patchy-receiver channel library. Each check prints
// one PASS/FAIL line with the measured quantity; the process exits nonzero
// if any check fails. Tolerances are pinned here, next to the checks.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "patchyrx/analytic_cir.hpp"
#include "patchyrx/capacitance.hpp"
#include "patchyrx/csv.hpp"
#include "patchyrx/experiments.hpp"
#include "patchyrx/geometry.hpp"
#include "patchyrx/pbs.hpp"

namespace {

using namespace patchyrx;

constexpr double kTolFactorization = 1e-12;   // relative
constexpr double kTolQuadrature = 1e-7;       // absolute
constexpr double kTolAsymptote = 1e-6;        // absolute
constexpr double kTolHomogenization = 1e-10;  // relative
constexpr double kTolRateVsFirstPassage = 1e-3;
constexpr double kTolEventualCapture = 0.02;
constexpr double kTolOverlay = 0.10;          // relative, simulation vs analytic
constexpr double kTolSinglePatchForms = 0.005;

struct CheckResult {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        xs[static_cast<std::size_t>(i)] =
            lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    }
    return xs;
}

// Plain recursive adaptive Simpson; independent of the library's quadrature.
double simpson_step(const std::function<double(double)>& f, double a, double b,
                    double fa, double fm, double fb, double whole, double eps,
                    int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * eps) {
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, 1e-10, 48);
}

CheckResult check_degradation_factorization() {
    ChannelParams p;
    double max_rel = 0.0;
    for (double k_d : {0.3, 0.8, 5.0}) {
        ChannelParams with = p;
        with.k_d = k_d;
        ChannelParams without = p;
        without.k_d = 0.0;
        for (double t : log_grid(0.01, 50.0, 10)) {
            for (double w : log_grid(1e-2, 1e8, 10)) {
                const double lhs = hitting_rate_uniform(t, w, with);
                const double rhs =
                    hitting_rate_uniform(t, w, without) * std::exp(-k_d * t);
                max_rel = std::max(max_rel, std::fabs(lhs - rhs) / rhs);
            }
        }
    }
    return {max_rel <= kTolFactorization,
            "degradation factors out of the hitting rate on a 10x10x3 grid "
            "(max rel dev " + num(max_rel) + ", tol " + num(kTolFactorization) + ")"};
}

CheckResult check_quadrature_consistency() {
    double max_abs = 0.0;
    for (double k_d : {0.0, 0.3, 0.8, 5.0}) {
        ChannelParams p;
        p.k_d = k_d;
        for (double w : {0.1, 1.0, 10.0, 100.0, 1e4}) {
            auto rate = [&](double t) {
                return t <= 0.0 ? 0.0 : hitting_rate_uniform(t, w, p);
            };
            double integral = 0.0;
            double t_lo = 0.0;
            for (double t : {0.5, 2.0, 10.0}) {
                integral += integrate(rate, t_lo, t);
                t_lo = t;
                const double H = cumulative_fraction_uniform(t, w, p);
                max_abs = std::max(max_abs, std::fabs(H - integral));
            }
        }
    }
    return {max_abs <= kTolQuadrature,
            "cumulative fraction equals the integrated rate for 20 (w, k_d) "
            "combos up to t = 10 s (max abs dev " + num(max_abs) + ", tol " +
                num(kTolQuadrature) + ")"};
}

CheckResult check_asymptotic_consistency() {
    const ChannelParams p;
    // reaction rate where gamma^2 D - k_d crosses zero at these constants
    const double w_root = 0.029943538068510056;
    double max_abs = 0.0;
    for (double w : {1e-3, 1e-2, w_root, 0.03, 0.1, 1.0, 10.0, 1e3, 1e6, 1e9}) {
        const double H = cumulative_fraction_uniform(100.0, w, p);
        const double H_inf = asymptotic_fraction_uniform(w, p);
        max_abs = std::max(max_abs, std::fabs(H - H_inf));
    }
    return {max_abs <= kTolAsymptote,
            "H at t = 100 s reaches the asymptote across the rate grid "
            "including the zeta sign change (max abs dev " + num(max_abs) +
                ", tol " + num(kTolAsymptote) + ")"};
}

CheckResult check_homogenization_identity() {
    ChannelParams p;
    p.k_d = 0.0;
    double max_rel = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const int N_p = 3 + 2 * static_cast<int>(seed % 7);
        const double A = 0.02 + 0.006 * static_cast<double>(seed);
        const PatchLayout layout = random_layout(N_p, A, p.r_R, seed);
        const MultiPatchCir cir = multi_patch_cir(1.0, layout, p);
        const double expected = cir.G_p / p.r_0;
        max_rel = std::max(max_rel, std::fabs(cir.H_p_inf - expected) / expected);
    }
    return {max_rel <= kTolHomogenization,
            "without degradation the eventual capture fraction is G_p / r_0 "
            "for 20 random layouts (max rel dev " + num(max_rel) + ", tol " +
                num(kTolHomogenization) + ")"};
}

CheckResult check_fully_absorbing_limits() {
    ChannelParams p;
    p.k_d = 0.0;

    // hitting rate at w = 1e8 vs the first-passage time density to a
    // perfectly absorbing sphere
    auto first_passage = [&](double t) {
        const double gap = p.r_0 - p.r_R;
        return p.r_R / p.r_0 * gap /
               std::sqrt(4.0 * M_PI * p.D_sigma * t * t * t) *
               std::exp(-gap * gap / (4.0 * p.D_sigma * t));
    };
    // guard values for the local density, pinned independently
    if (std::fabs(first_passage(0.05) - 0.02607041313578998) > 1e-12 ||
        std::fabs(first_passage(0.5) - 0.23851441117830204) > 1e-12 ||
        std::fabs(first_passage(2.0) - 0.047812178265978463) > 1e-12) {
        return {false, "local first-passage density failed its pinned values"};
    }
    double max_rel = 0.0;
    for (double t : log_grid(0.05, 2.0, 20)) {
        const double h = hitting_rate_uniform(t, 1e8, p);
        const double fp = first_passage(t);
        max_rel = std::max(max_rel, std::fabs(h - fp) / fp);
    }
    if (max_rel > kTolRateVsFirstPassage) {
        return {false, "w = 1e8 rate misses the first-passage density (max rel dev " +
                           num(max_rel) + ", tol " + num(kTolRateVsFirstPassage) + ")"};
    }

    // every molecule is eventually captured with probability r_R / r_0 = 0.5;
    // survivors at the 20 s horizon are resolved by that exact identity
    SimConfig cfg;
    cfg.mode = BoundaryMode::full_absorb;
    cfg.params = p;
    cfg.dt = 1e-4;
    cfg.t_end = 20.0;
    cfg.realizations = 20;
    cfg.params.N_sigma = 1000;
    cfg.bin_width = 0.1;
    cfg.seed = 2;
    cfg.resolve_survivors_at_horizon = true;
    const HittingStats stats = simulate(cfg);
    std::uint64_t hits = stats.tail_absorbed;
    for (std::uint64_t c : stats.hit_counts) hits += c;
    const double H_total =
        static_cast<double>(hits) /
        (static_cast<double>(cfg.realizations) *
         static_cast<double>(cfg.params.N_sigma));
    const bool pass = std::fabs(H_total - 0.5) <= kTolEventualCapture;
    return {pass, "w = 1e8 rate matches the first-passage density (max rel dev " +
                      num(max_rel) + ") and the fully absorbing simulation captures " +
                      num(H_total) + " of the molecules (want 0.5 +- " +
                      num(kTolEventualCapture) + ")"};
}

CheckResult check_patch_count_sweep() {
    ExperimentOptions opt;
    opt.out_dir = std::filesystem::path("acceptance_out") / "patch_count_sweep";
    const Fig2Result result = run_fig2({1, 3, 5, 7, 9, 11}, 0.05, opt);
    double max_rel = 0.0;
    for (double dev : result.pbs_checkpoint_rel_dev) max_rel = std::max(max_rel, dev);
    return {max_rel <= kTolOverlay,
            "weighted capture at 2 s increases over N_p = 1..11 and the "
            "N_p = 11 simulation overlay stays within 10% at t = 0.25, 0.5, 1 s "
            "(max rel dev " + num(max_rel) + ")"};
}

CheckResult check_placement_comparison() {
    ExperimentOptions opt;
    opt.out_dir = std::filesystem::path("acceptance_out") / "placement_comparison";
    const Fig3Result result = run_fig3(0.1, 13, opt);
    return {result.pbs_rel_dev_four_patch <= kTolOverlay,
            "capture at 0.5 s orders even > random x5 > region (" +
                num(result.H_even) + " > ... > " + num(result.H_region) +
                ") and the four-patch overlay stays within 10% at t = 1, 1.5, 2 s "
                "(max rel dev " + num(result.pbs_rel_dev_four_patch) + ")"};
}

CheckResult check_effective_rate_trends() {
    ExperimentOptions opt;
    opt.out_dir = std::filesystem::path("acceptance_out") / "effective_rate_trends";
    const Fig4Result result =
        run_fig4({1, 3, 5, 7, 9, 11}, {5.0, 10.0}, {79.4, 158.8}, 0.05, opt);
    return {result.rows.size() == 24,
            "w_e rises with patch count and diffusivity and falls with receiver "
            "radius across " + std::to_string(result.rows.size()) + " grid points"};
}

CheckResult check_single_patch_forms() {
    double max_rel = 0.0;
    const double r_R = 10.0;
    for (int i = 1; i <= 10; ++i) {
        const double a = 0.01 * i * r_R;
        const PatchLayout layout =
            explicit_layout({{M_PI / 2.0, 0.0, a}}, r_R);
        const double dedicated = capacitance_single(a, r_R);
        const double shared = capacitance_identical(layout);
        max_rel = std::max(max_rel, std::fabs(dedicated - shared) / dedicated);
    }
    return {max_rel <= kTolSinglePatchForms,
            "the two single-patch capacitance expansions agree for kappa <= 0.1 "
            "(max rel dev " + num(max_rel) + ", tol " + num(kTolSinglePatchForms) + ")"};
}

CheckResult check_conservation_and_determinism() {
    SimConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_end = 0.2;
    cfg.realizations = 40;
    cfg.params.N_sigma = 250;
    cfg.bin_width = 0.01;
    cfg.seed = 9;
    cfg.layout = fibonacci_layout(5, 0.1, 10.0);

    cfg.workers = 1;
    const HittingStats serial = simulate(cfg);
    cfg.workers = 4;
    const HittingStats threaded = simulate(cfg);
    const HittingStats threaded_again = simulate(cfg);

    const std::uint64_t released =
        static_cast<std::uint64_t>(cfg.realizations) *
        static_cast<std::uint64_t>(cfg.params.N_sigma);
    for (const HittingStats* stats : {&serial, &threaded}) {
        std::uint64_t total = stats->degraded_count + stats->survivors;
        for (std::uint64_t c : stats->hit_counts) total += c;
        if (total != released) {
            return {false, "count identity violated: " + std::to_string(total) +
                               " accounted of " + std::to_string(released)};
        }
    }
    const std::string csv_serial = csv_to_string(simulation_table(serial));
    const std::string csv_threaded = csv_to_string(simulation_table(threaded));
    const std::string csv_repeat = csv_to_string(simulation_table(threaded_again));
    const bool identical = csv_serial == csv_threaded && csv_threaded == csv_repeat;
    return {identical,
            "all " + std::to_string(released) +
                " molecules accounted for and 1-worker/4-worker CSVs are "
                "byte-identical"};
}

}  // namespace

int main() {
    struct Check {
        const char* name;
        CheckResult (*run)();
    };
    const Check checks[] = {
        {"degradation factorization", check_degradation_factorization},
        {"quadrature consistency", check_quadrature_consistency},
        {"asymptotic consistency", check_asymptotic_consistency},
        {"homogenization identity", check_homogenization_identity},
        {"fully absorbing limits", check_fully_absorbing_limits},
        {"patch-count sweep", check_patch_count_sweep},
        {"placement comparison", check_placement_comparison},
        {"effective-rate trends", check_effective_rate_trends},
        {"single-patch expansions", check_single_patch_forms},
        {"conservation and determinism", check_conservation_and_determinism},
    };

    int passed = 0;
    int index = 0;
    for (const Check& check : checks) {
        ++index;
        CheckResult result;
        const auto start = std::chrono::steady_clock::now();
        try {
            result = check.run();
        } catch (const std::exception& e) {
            result = {false, std::string(check.name) + " raised: " + e.what()};
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        std::printf("[%2d] %s  %s [%.1f s]\n", index, result.pass ? "PASS" : "FAIL",
                    result.detail.c_str(), seconds);
        std::fflush(stdout);
        if (result.pass) ++passed;
    }
    std::printf("%d/10 checks passed\n", passed);
    return passed == 10 ? 0 : 1;
}
