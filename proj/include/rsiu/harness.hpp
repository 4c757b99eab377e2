#pragma once
// Replication engine and the canned experiments: PCS estimation, the
// expected-stage table, the data-fraction grid, and continuation-region
// plot data. Replications run in parallel with per-replication stream
// addressing; output is byte-identical for a given config and seed
// regardless of worker count.

#include <functional>
#include <memory>
#include <string>

#include "rsiu/allocation.hpp"
#include "rsiu/config.hpp"
#include "rsiu/csv.hpp"
#include "rsiu/elimination.hpp"
#include "rsiu/model.hpp"

namespace rsiu {

// Registered testbeds: `inv-single`, `inv-multi`, plus the Gaussian toys used
// in tests. Throws DomainError for unknown names.
std::unique_ptr<Testbed> make_testbed(const std::string& name);

// --- fixed confidence ---

struct FcTrial {
    int winner = 0;
    int stages = 0;
    bool hit_cap = false;
    long long data_samples = 0;
    long long sim_replications = 0;
};

struct FcCellSummary {
    std::string testbed, procedure;
    int batch = 0, reps = 0, stage_cap = 0;
    double pcs = 0.0, pcs_se = 0.0;
    double mean_stages = 0.0, se_stages = 0.0;
    bool geq_cap = false;     // some replication hit the stage cap
    double cap_frac = 0.0;
    double mean_data = 0.0, mean_sims = 0.0;
    std::vector<FcTrial> trials;
};

// One full replication: pilot -> plug-in constants -> elimination run.
FcTrial run_fc_replication(const Testbed& tb, const ExperimentConfig& cfg, int rep);

FcCellSummary run_fc_cell(const ExperimentConfig& cfg);

// Summary CSV for one or more cells.
CsvTable fc_summary_table(const std::vector<FcCellSummary>& cells, std::uint64_t seed);

// Expected-stage table over batch sizes x procedures (Table-1 style): cells
// hitting the cap report geq_cap so "≥ cap" semantics survive into the CSV.
CsvTable table_expected_stages(const ExperimentConfig& base, const std::vector<int>& batches,
                               const std::vector<std::string>& procedures);

// --- fixed budget ---

struct FbTrial {
    int winner = 0;
    bool correct = false;
    AllocationPlan plan;
    long long data_samples = 0;
    long long sim_replications = 0;
};

struct FbCellSummary {
    std::string testbed;
    double total_budget = 0.0;
    bool oracle = false;
    int reps = 0;
    double pcs = 0.0, pcs_se = 0.0;
    double mean_money_frac = 0.0;
    VecD mean_rho;         // mean N_q/T per block
    VecD mean_data_share;  // mean N_q / sum N per block
    std::vector<FbTrial> trials;
};

FbCellSummary run_ocbaiu_cell(const ExperimentConfig& cfg, double total_budget);

// Per-replication allocation rows (the AllocationPlan CSV).
CsvTable fb_trial_table(const FbCellSummary& cell, const ExperimentConfig& cfg);
CsvTable fb_summary_table(const std::vector<FbCellSummary>& cells, const ExperimentConfig& cfg);

// PCS for a fixed data budget (N per block) followed by sequential OCBA;
// shared by every grid point and the OCBAIU overlay so the comparison is
// apples to apples (and CRN across columns: same rep index, same streams).
struct FractionPoint {
    double fraction = 0.0;  // data money share c_D N / T
    bool is_ocbaiu = false;
    bool feasible = true;
    int reps = 0;
    double pcs = 0.0, pcs_se = 0.0;
};

std::vector<FractionPoint> grid_fraction(const ExperimentConfig& cfg, double total_budget);
CsvTable grid_table(const std::vector<FractionPoint>& points, const ExperimentConfig& cfg,
                    double total_budget);

// --- region plots ---

// Runs one replication per listed variant with elimination disabled and logs
// delta_hat plus every bound family for the tracked pair.
CsvTable emit_region_plot_data(const std::vector<TrajRow>& rows);
std::vector<TrajRow> region_trajectories(const ExperimentConfig& cfg);

// Dispatch on cfg.procedure: fixed-confidence cells or OCBAIU cells.
CsvTable estimate_pcs(const ExperimentConfig& cfg);

void write_output(const CsvTable& table, const std::string& path);

} // namespace rsiu
