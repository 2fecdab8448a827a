#ifndef PATCHYRX_EXPERIMENTS_HPP
#define PATCHYRX_EXPERIMENTS_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "patchyrx/analytic_cir.hpp"
#include "patchyrx/csv.hpp"
#include "patchyrx/geometry.hpp"
#include "patchyrx/pbs.hpp"

namespace patchyrx {

/// Evaluation times for analytic sweeps; log spacing needs start > 0.
struct TimeGrid {
    double start = 0.01;
    double end = 2.0;
    int steps = 120;
    bool log_scale = true;

    std::vector<double> points() const;
};

/// How to build a layout from scratch. Only the fields of the named
/// generator are read: fibonacci uses (N_p, A, r_R); random additionally
/// seed; region additionally cap_center_theta and cap_angular_radius;
/// explicit uses (patches, r_R).
struct LayoutRecipe {
    std::string generator = "fibonacci";
    int N_p = 1;
    double A = 0.05;
    double r_R = 10.0;
    std::uint64_t seed = 1;
    double cap_center_theta = 0.0;
    double cap_angular_radius = 0.0;
    std::vector<std::array<double, 3>> patches;  // (theta, phi, a)
};

PatchLayout build_layout(const LayoutRecipe& recipe);

/// Simulation settings carried by a preset; params and layout come from the
/// preset itself.
struct SimOverrides {
    double dt = 1e-5;
    double t_end = 1.0;
    int realizations = 200;
    double bin_width = 0.02;
};

/// Self-contained description of one experiment run: with a seed it pins the
/// layout, the analytic sweep and the optional simulation, so the run is
/// reproducible from the JSON alone.
struct ExperimentPreset {
    std::string name;
    LayoutRecipe layout;
    ChannelParams params;
    TimeGrid time_grid;
    std::optional<SimOverrides> sim;
    std::string csv_name;
    std::string svg_name;  // empty = no plot

    void validate() const;
};

std::string preset_to_json(const ExperimentPreset& preset);
ExperimentPreset preset_from_json(const std::string& text);

/// Closed-form sweep of one layout over a time grid.
struct AnalyticSweep {
    std::vector<double> t;
    std::vector<double> h_p;
    std::vector<double> H_p;
    double G_p = 0.0;
    double w_e = 0.0;
    double H_p_inf = 0.0;
};

AnalyticSweep analytic_sweep(const PatchLayout& layout, const ChannelParams& params,
                             const std::vector<double>& ts);

/// CSV `t,h_p,Nsigma_h_p,H_p,Nsigma_H_p` with a trailing
/// `# G_p=... w_e=... H_p_inf=...` comment.
CsvTable analytic_sweep_table(const AnalyticSweep& sweep, std::int64_t N_sigma);

/// CSV `t_mid,empirical_rate,empirical_cumulative` with a trailing
/// `# degraded=... survivors=...` comment. empirical_cumulative on each row
/// includes that row's bin.
CsvTable simulation_table(const HittingStats& stats);

/// One-row CSV `G_p,w_e,I_p`.
CsvTable capacitance_table(const PatchLayout& layout, const ChannelParams& params);

struct ExperimentOptions {
    std::filesystem::path out_dir;
    std::uint64_t seed = 1;
    bool paper_scale = false;  // dt = 1e-6 s and 1000 realizations
    int workers = 0;
    bool with_pbs = true;
};

/// Cumulative-fraction curves for Fibonacci layouts over a list of patch
/// counts at fixed total coverage, with a particle-simulation overlay for the
/// largest patch count. Throws when the curves are not strictly ordered in
/// N_p at t = 2 s, or when the overlay misses the analytic cumulative
/// fraction by more than 10% at the checkpoint times.
struct Fig2Result {
    std::vector<int> N_p_list;
    std::vector<double> weighted_H_at_2s;          // N_sigma * H_p(2 s)
    std::vector<double> pbs_checkpoint_times;      // empty without PBS
    std::vector<double> pbs_checkpoint_rel_dev;
    std::filesystem::path rate_csv;
    std::filesystem::path cumulative_csv;
    std::filesystem::path pbs_csv;
    std::filesystem::path svg;
};

Fig2Result run_fig2(const std::vector<int>& N_p_list, double A, const ExperimentOptions& opt);

/// Layout-placement comparison at fixed coverage and patch count: Fibonacci
/// (even), random (several seeds), region-confined, plus a heterogeneous
/// four-patch layout. Throws unless even > random > region on H_p(0.5 s) for
/// every random seed, or when the four-patch simulation misses its analytic
/// curve by more than 10%.
struct Fig3Result {
    double H_even = 0.0;  // analytic H_p at 0.5 s
    std::vector<double> H_random;
    double H_region = 0.0;
    double H_four_patch = 0.0;
    double region_cap_radius = 0.0;  // smallest feasible cap radius found
    double pbs_rel_dev_four_patch = 0.0;  // max over the checkpoints at 1, 1.5, 2 s
    std::filesystem::path rate_csv;
    std::filesystem::path cumulative_csv;
    std::filesystem::path pbs_csv;
    std::filesystem::path svg;
};

Fig3Result run_fig3(double A, int N_p, const ExperimentOptions& opt);

/// Effective-rate table over (N_p, r_R, D) grids at fixed coverage. Throws
/// unless w_e is strictly increasing in N_p, strictly larger for the smaller
/// r_R, and strictly increasing in D.
struct Fig4Result {
    struct Row {
        int N_p = 0;
        double r_R = 0.0;
        double D = 0.0;
        double G_p = 0.0;
        double w_e = 0.0;
    };
    std::vector<Row> rows;
    std::filesystem::path table_csv;
    std::filesystem::path curves_csv;
    std::filesystem::path svg;
};

Fig4Result run_fig4(const std::vector<int>& N_p_list, const std::vector<double>& r_R_list,
                    const std::vector<double>& D_list, double A, const ExperimentOptions& opt);

struct SvgStyle {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    int width = 720;
    int height = 480;
};

/// Line plot of a numeric CSV: first column is x, every other column is one
/// polyline labeled by its header. Output bytes are a pure function of the
/// input file and style.
void render_svg(const std::filesystem::path& csv_path, const SvgStyle& style,
                const std::filesystem::path& svg_path);

}  // namespace patchyrx

#endif
