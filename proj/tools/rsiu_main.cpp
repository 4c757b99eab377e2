// Command-line front end. Subcommands mirror the experiment harness:
//   fixed-confidence  one procedure cell (PCS + expected stages)
//   fixed-budget      OCBAIU cells over a list of budgets
//   grid              data-fraction grid with the OCBAIU overlay column
//   table1            expected-stage grid over batch sizes x procedures
//   regions           continuation-region plot data for one tracked pair
// A config file (key = value, '#' comments) seeds the options; flags override.
// Exit codes: 0 success, 2 configuration error, 3 numerical error.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rsiu/config.hpp"
#include "rsiu/errors.hpp"
#include "rsiu/harness.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
};

void add_common(CLI::App* cmd, rsiu::ExperimentConfig& cfg, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "config file (key = value, # comments)");
    cmd->add_option("--testbed", cfg.testbed, "testbed name (inv-single, inv-multi, toy-linear)");
    cmd->add_option("--reps", cfg.reps, "independent replications");
    cmd->add_option("--seed", cfg.seed, "master seed");
    cmd->add_option("--workers", cfg.workers, "worker threads (0 = hardware)");
    cmd->add_option("--out", cfg.out, "output CSV path (default stdout)");
}

void add_fc(CLI::App* cmd, rsiu::ExperimentConfig& cfg) {
    cmd->add_option("--procedure", cfg.procedure, "seiu | pairwise | heuristic | noiu");
    cmd->add_option("--alpha", cfg.alpha, "target failure probability");
    cmd->add_option("--eta", cfg.eta, "moving-average discard fraction");
    cmd->add_option("--n0", cfg.n0, "warm-up stages");
    cmd->add_option("--batch", cfg.batch, "data samples and replications per stage");
    cmd->add_option("--stage-cap", cfg.stage_cap, "stage cap (non-termination flagged)");
    cmd->add_option("--pilot", cfg.pilot, "raw pilot samples for the plug-in constants");
}

void add_fb(CLI::App* cmd, rsiu::ExperimentConfig& cfg) {
    cmd->add_option("--T", cfg.t_list, "total budget(s)")->delimiter(';');
    cmd->add_option("--cd", cfg.cd, "data cost per block")->delimiter(';');
    cmd->add_option("--cs", cfg.cs, "simulation cost");
    cmd->add_option("--rho0", cfg.rho0, "pilot data fraction (N0 = rho0 T)");
    cmd->add_option("--pi0", cfg.pi0, "initial simulation fraction (M0 = pi0 T)");
    cmd->add_option("--m0", cfg.m0, "explicit per-design initial replications");
    cmd->add_option("--delta", cfg.delta, "OCBA increment");
    cmd->add_flag("--oracle", cfg.oracle, "true-parameter variant");
}

// flags override the file: parse flags into a scratch config first, then
// re-apply the command line on top of the file contents
rsiu::ExperimentConfig merge_config(const CLI::App& cmd, const CommonFlags& flags,
                                    const rsiu::ExperimentConfig& from_flags) {
    if (flags.config_path.empty()) return from_flags;
    rsiu::ExperimentConfig cfg = rsiu::parse_config_file(flags.config_path);
    rsiu::ExperimentConfig merged = cfg;
    // any option the user passed on the command line wins
    auto take = [&](const std::string& name) { return cmd.count(name) > 0; };
    if (take("--testbed")) merged.testbed = from_flags.testbed;
    if (take("--procedure")) merged.procedure = from_flags.procedure;
    if (take("--alpha")) merged.alpha = from_flags.alpha;
    if (take("--eta")) merged.eta = from_flags.eta;
    if (take("--n0")) merged.n0 = from_flags.n0;
    if (take("--batch")) merged.batch = from_flags.batch;
    if (take("--stage-cap")) merged.stage_cap = from_flags.stage_cap;
    if (take("--pilot")) merged.pilot = from_flags.pilot;
    if (take("--T")) merged.t_list = from_flags.t_list;
    if (take("--cd")) merged.cd = from_flags.cd;
    if (take("--cs")) merged.cs = from_flags.cs;
    if (take("--rho0")) merged.rho0 = from_flags.rho0;
    if (take("--pi0")) merged.pi0 = from_flags.pi0;
    if (take("--m0")) merged.m0 = from_flags.m0;
    if (take("--delta")) merged.delta = from_flags.delta;
    if (take("--oracle")) merged.oracle = from_flags.oracle;
    if (take("--fractions")) merged.fractions = from_flags.fractions;
    if (take("--reps")) merged.reps = from_flags.reps;
    if (take("--seed")) merged.seed = from_flags.seed;
    if (take("--workers")) merged.workers = from_flags.workers;
    if (take("--out")) merged.out = from_flags.out;
    if (take("--track-pair")) {
        merged.track_i = from_flags.track_i;
        merged.track_j = from_flags.track_j;
    }
    if (take("--stages")) merged.region_stages = from_flags.region_stages;
    return merged;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ranking and selection under input uncertainty"};
    app.require_subcommand(1);

    rsiu::ExperimentConfig cfg;
    CommonFlags flags;

    auto* fc = app.add_subcommand("fixed-confidence", "sequential-elimination procedures");
    add_common(fc, cfg, flags);
    add_fc(fc, cfg);

    auto* fb = app.add_subcommand("fixed-budget", "OCBAIU over a budget list");
    add_common(fb, cfg, flags);
    add_fb(fb, cfg);

    auto* grid = app.add_subcommand("grid", "data-fraction grid with OCBAIU overlay");
    add_common(grid, cfg, flags);
    add_fb(grid, cfg);
    grid->add_option("--fractions", cfg.fractions, "data money fractions")->delimiter(';');

    auto* table1 = app.add_subcommand("table1", "expected stages over batches x procedures");
    add_common(table1, cfg, flags);
    add_fc(table1, cfg);

    auto* regions = app.add_subcommand("regions", "continuation-region plot data");
    add_common(regions, cfg, flags);
    add_fc(regions, cfg);
    std::vector<int> pair{4, 5};
    regions->add_option("--track-pair", pair, "1-based design pair")->expected(2);
    regions->add_option("--stages", cfg.region_stages, "stages to log");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        cfg.track_i = pair[0];
        cfg.track_j = pair[1];
        const rsiu::ExperimentConfig run_cfg = merge_config(
            *app.get_subcommands().front(), flags, cfg);

        rsiu::CsvTable out;
        if (fc->parsed()) {
            out = rsiu::estimate_pcs(run_cfg);
        } else if (fb->parsed()) {
            rsiu::ExperimentConfig c = run_cfg;
            c.procedure = "ocbaiu";
            std::vector<rsiu::FbCellSummary> cells;
            for (double t : c.t_list) cells.push_back(rsiu::run_ocbaiu_cell(c, t));
            out = rsiu::fb_summary_table(cells, c);
        } else if (grid->parsed()) {
            auto points = rsiu::grid_fraction(run_cfg, run_cfg.t_list.at(0));
            for (const auto& p : points)
                if (!p.feasible)
                    std::cerr << "warning: fraction " << p.fraction
                              << " infeasible for this budget, skipped\n";
            out = rsiu::grid_table(points, run_cfg, run_cfg.t_list.at(0));
        } else if (table1->parsed()) {
            out = rsiu::table_expected_stages(run_cfg, {100, 1000, 10000},
                                              {"seiu", "pairwise", "heuristic"});
        } else if (regions->parsed()) {
            out = rsiu::emit_region_plot_data(rsiu::region_trajectories(run_cfg));
        }
        rsiu::write_output(out, run_cfg.out);
        return 0;
    } catch (const rsiu::DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
