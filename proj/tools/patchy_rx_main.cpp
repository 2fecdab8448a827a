#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "patchyrx/analytic_cir.hpp"
#include "patchyrx/capacitance.hpp"
#include "patchyrx/csv.hpp"
#include "patchyrx/experiments.hpp"
#include "patchyrx/geometry.hpp"
#include "patchyrx/pbs.hpp"

namespace {

using patchyrx::ChannelParams;
using patchyrx::CsvTable;
using patchyrx::PatchLayout;

std::string read_file(const std::string& path) {
    std::ifstream stream(path, std::ios::binary);
    if (!stream) {
        throw std::runtime_error("cannot open " + path);
    }
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    return buffer.str();
}

PatchLayout load_layout(const std::string& config_path) {
    return patchyrx::layout_from_json(read_file(config_path));
}

void warn_if_stretched(const PatchLayout& layout) {
    const std::string warning = patchyrx::expansion_warning(layout);
    if (!warning.empty()) {
        std::cerr << "warning: " << warning << "\n";
    }
}

/// params flags shared by the analytic and simulate subcommands; r_R defaults
/// to the layout's radius and must agree with it when given explicitly.
struct ParamFlags {
    std::optional<double> D;
    std::optional<double> k_d;
    std::optional<double> r_0;
    std::optional<double> r_R;
    std::optional<std::int64_t> N_sigma;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--D", D, "diffusion coefficient, um^2/s");
        cmd.add_option("--kd", k_d, "degradation rate, 1/s");
        cmd.add_option("--r0", r_0, "transmitter distance, um");
        cmd.add_option("--rR", r_R, "receiver radius, um (must match the layout)");
        cmd.add_option("--Nsigma", N_sigma, "released molecules per realization");
    }

    ChannelParams resolve(const PatchLayout& layout) const {
        ChannelParams params;
        params.r_R = layout.r_R;
        if (D) params.D_sigma = *D;
        if (k_d) params.k_d = *k_d;
        if (r_0) params.r_0 = *r_0;
        if (N_sigma) params.N_sigma = *N_sigma;
        if (r_R && std::fabs(*r_R - layout.r_R) > 1e-9 * layout.r_R) {
            throw std::invalid_argument("--rR does not match the layout's receiver radius");
        }
        params.validate();
        return params;
    }
};

std::filesystem::path prepare_out_dir(const std::string& out) {
    std::filesystem::path dir = out;
    std::filesystem::create_directories(dir);
    return dir;
}

void emit_csv(const CsvTable& table, const std::filesystem::path& dir,
              const std::string& name) {
    const std::filesystem::path path = dir / name;
    patchyrx::write_csv(path, table);
    std::cout << "wrote " << path.string() << "\n";
}

nlohmann::json load_overrides(const std::string& config_path) {
    if (config_path.empty()) {
        return nlohmann::json::object();
    }
    return nlohmann::json::parse(read_file(config_path));
}

int run_capacitance(const std::string& config_path, const std::string& out) {
    const PatchLayout layout = load_layout(config_path);
    warn_if_stretched(layout);
    ChannelParams params;
    params.r_R = layout.r_R;
    const CsvTable table = patchyrx::capacitance_table(layout, params);
    std::cout << "G_p=" << patchyrx::format_double(table.rows[0][0])
              << " w_e=" << patchyrx::format_double(table.rows[0][1])
              << " I_p=" << patchyrx::format_double(table.rows[0][2]) << "\n";
    emit_csv(table, prepare_out_dir(out), "capacitance.csv");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Channel response of a spherical receiver covered by absorbing patches"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out = "out";
    std::uint64_t seed = 1;
    bool paper_scale = false;

    auto add_common = [&](CLI::App* cmd, bool config_required) {
        CLI::Option* opt = cmd->add_option("--config", config_path, "input JSON file");
        if (config_required) {
            opt->required();
        }
        cmd->add_option("--out", out, "output directory");
        cmd->add_option("--seed", seed, "random seed");
        cmd->add_flag("--paper-scale", paper_scale,
                      "simulate with dt=1e-6 s and 1000 realizations");
    };

    CLI::App* cap = app.add_subcommand("capacitance", "capacitance and effective rate");
    add_common(cap, true);

    CLI::App* analytic = app.add_subcommand("analytic", "closed-form response sweep");
    add_common(analytic, true);
    ParamFlags analytic_params;
    analytic_params.add_to(*analytic);
    double t_start = 0.01;
    double t_end_grid = 2.0;
    int t_steps = 120;
    std::string t_scale = "log";
    analytic->add_option("--t-start", t_start, "first time point, s");
    analytic->add_option("--t-end", t_end_grid, "last time point, s");
    analytic->add_option("--t-steps", t_steps, "number of time points");
    analytic->add_option("--t-scale", t_scale, "log or linear spacing")
        ->check(CLI::IsMember({"log", "linear"}));

    CLI::App* simulate_cmd = app.add_subcommand("simulate", "particle-based simulation");
    add_common(simulate_cmd, true);
    ParamFlags sim_params;
    sim_params.add_to(*simulate_cmd);
    double dt = 1e-5;
    double sim_t_end = 1.0;
    int realizations = 200;
    double bin_width = 0.01;
    simulate_cmd->add_option("--dt", dt, "time step, s");
    simulate_cmd->add_option("--t-end", sim_t_end, "horizon, s");
    simulate_cmd->add_option("--realizations", realizations, "independent realizations");
    simulate_cmd->add_option("--bin-width", bin_width, "histogram bin width, s");

    CLI::App* fig2 = app.add_subcommand(
        "fig2", "even layouts over a range of patch counts, with simulation overlay");
    add_common(fig2, false);

    CLI::App* fig3 = app.add_subcommand(
        "fig3", "placement comparison: even vs random vs region-confined vs heterogeneous");
    add_common(fig3, false);

    CLI::App* fig4 = app.add_subcommand("fig4", "effective-rate sensitivity table");
    add_common(fig4, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cap->parsed()) {
            return run_capacitance(config_path, out);
        }

        if (analytic->parsed()) {
            const PatchLayout layout = load_layout(config_path);
            warn_if_stretched(layout);
            const ChannelParams params = analytic_params.resolve(layout);
            patchyrx::TimeGrid grid{t_start, t_end_grid, t_steps, t_scale == "log"};
            const patchyrx::AnalyticSweep sweep =
                patchyrx::analytic_sweep(layout, params, grid.points());
            std::cout << "G_p=" << patchyrx::format_double(sweep.G_p)
                      << " w_e=" << patchyrx::format_double(sweep.w_e)
                      << " H_p_inf=" << patchyrx::format_double(sweep.H_p_inf) << "\n";
            emit_csv(patchyrx::analytic_sweep_table(sweep, params.N_sigma),
                     prepare_out_dir(out), "analytic.csv");
            return 0;
        }

        if (simulate_cmd->parsed()) {
            const PatchLayout layout = load_layout(config_path);
            warn_if_stretched(layout);
            patchyrx::SimConfig config;
            config.params = sim_params.resolve(layout);
            config.layout = layout;
            config.dt = paper_scale ? 1e-6 : dt;
            config.t_end = sim_t_end;
            config.realizations = paper_scale ? 1000 : realizations;
            config.seed = seed;
            config.bin_width = bin_width;
            const patchyrx::HittingStats stats = patchyrx::simulate(config);
            std::cout << "absorbed="
                      << (static_cast<std::uint64_t>(config.realizations) *
                              static_cast<std::uint64_t>(config.params.N_sigma) -
                          stats.degraded_count - stats.survivors)
                      << " degraded=" << stats.degraded_count
                      << " survivors=" << stats.survivors << "\n";
            emit_csv(patchyrx::simulation_table(stats), prepare_out_dir(out), "simulate.csv");
            return 0;
        }

        patchyrx::ExperimentOptions opt;
        opt.out_dir = prepare_out_dir(out);
        opt.seed = seed;
        opt.paper_scale = paper_scale;
        const nlohmann::json overrides = load_overrides(config_path);

        if (fig2->parsed()) {
            const std::vector<int> N_p_list =
                overrides.value("N_p_list", std::vector<int>{1, 3, 5, 7, 9, 11});
            const double A = overrides.value("A", 0.05);
            const patchyrx::Fig2Result result = patchyrx::run_fig2(N_p_list, A, opt);
            for (std::size_t i = 0; i < result.N_p_list.size(); ++i) {
                std::cout << "N_p=" << result.N_p_list[i] << " Nsigma_H(2s)="
                          << patchyrx::format_double(result.weighted_H_at_2s[i]) << "\n";
            }
            for (std::size_t i = 0; i < result.pbs_checkpoint_times.size(); ++i) {
                std::cout << "overlay t=" << result.pbs_checkpoint_times[i] << "s rel_dev="
                          << patchyrx::format_double(result.pbs_checkpoint_rel_dev[i]) << "\n";
            }
            return 0;
        }

        if (fig3->parsed()) {
            const double A = overrides.value("A", 0.1);
            const int N_p = overrides.value("N_p", 13);
            const patchyrx::Fig3Result result = patchyrx::run_fig3(A, N_p, opt);
            std::cout << "H_even(0.5s)=" << patchyrx::format_double(result.H_even) << "\n";
            for (double h : result.H_random) {
                std::cout << "H_random(0.5s)=" << patchyrx::format_double(h) << "\n";
            }
            std::cout << "H_region(0.5s)=" << patchyrx::format_double(result.H_region)
                      << " (cap radius " << patchyrx::format_double(result.region_cap_radius)
                      << " rad)\n";
            std::cout << "H_hetero4(0.5s)=" << patchyrx::format_double(result.H_four_patch)
                      << " sim rel_dev="
                      << patchyrx::format_double(result.pbs_rel_dev_four_patch) << "\n";
            return 0;
        }

        if (fig4->parsed()) {
            const std::vector<int> N_p_list =
                overrides.value("N_p_list", std::vector<int>{1, 3, 5, 7, 9, 11});
            const std::vector<double> r_R_list =
                overrides.value("r_R_list", std::vector<double>{5.0, 10.0});
            const std::vector<double> D_list =
                overrides.value("D_list", std::vector<double>{79.4, 158.8});
            const double A = overrides.value("A", 0.05);
            const patchyrx::Fig4Result result =
                patchyrx::run_fig4(N_p_list, r_R_list, D_list, A, opt);
            std::cout << "wrote " << result.table_csv.string() << " ("
                      << result.rows.size() << " rows)\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
