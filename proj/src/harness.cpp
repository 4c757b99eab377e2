#include "rsiu/harness.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>

#include "rsiu/errors.hpp"
#include "rsiu/inventory.hpp"
#include "rsiu/oracle.hpp"
#include "rsiu/parallel.hpp"
#include "rsiu/plugin.hpp"
#include "rsiu/toy.hpp"

namespace rsiu {

std::unique_ptr<Testbed> make_testbed(const std::string& name) {
    if (name == "inv-single") return make_inventory_single();
    if (name == "inv-multi") return make_inventory_multi();
    if (name == "toy-linear") return make_toy_linear();
    throw DomainError("unknown testbed: " + name);
}

namespace {

PlugInSpec plug_in_spec(const Testbed& tb, const ExperimentConfig& cfg) {
    PlugInSpec spec;
    spec.alpha = cfg.alpha;
    spec.eta = cfg.eta;
    spec.n0 = cfg.n0;
    spec.k_per_block.assign(tb.blocks().size(), cfg.batch);
    spec.batch_r = cfg.batch;
    return spec;
}

} // namespace

FcTrial run_fc_replication(const Testbed& tb, const ExperimentConfig& cfg, int rep) {
    PilotSample pilot = run_pilot(tb, cfg.pilot, cfg.seed, std::uint64_t(rep));
    BoundParams bp = plug_in_params(pilot, tb, plug_in_spec(tb, cfg));

    std::vector<int> k_per_block(tb.blocks().size(), cfg.batch);
    TestbedDataSource data(tb, k_per_block, cfg.seed, std::uint64_t(rep));

    FcOptions opt;
    opt.variant = fc_variant_from_string(cfg.procedure);
    opt.stage_cap = cfg.stage_cap;
    opt.batch_r = cfg.batch;

    SelectionResult r = run_fixed_confidence(tb, data, bp, opt, cfg.seed, std::uint64_t(rep));
    FcTrial t;
    t.winner = r.winner;
    t.stages = r.stages;
    t.hit_cap = r.hit_cap;
    t.data_samples = r.data_samples + pilot.raw_data_count;
    t.sim_replications = r.sim_replications + pilot.raw_sim_count;
    return t;
}

FcCellSummary run_fc_cell(const ExperimentConfig& cfg) {
    auto tb = make_testbed(cfg.testbed);
    auto trials = parallel_map<FcTrial>(cfg.reps, cfg.workers, [&](int rep) {
        return run_fc_replication(*tb, cfg, rep);
    });

    FcCellSummary s;
    s.testbed = cfg.testbed;
    s.procedure = cfg.procedure;
    s.batch = cfg.batch;
    s.reps = cfg.reps;
    s.stage_cap = cfg.stage_cap;
    RunningStat stages;
    int correct = 0, capped = 0;
    double data_sum = 0.0, sim_sum = 0.0;
    for (const auto& t : trials) {
        stages.add(double(t.stages));
        correct += t.winner == tb->best_design() ? 1 : 0;
        capped += t.hit_cap ? 1 : 0;
        data_sum += double(t.data_samples);
        sim_sum += double(t.sim_replications);
    }
    s.pcs = double(correct) / cfg.reps;
    s.pcs_se = binomial_se(s.pcs, cfg.reps);
    s.mean_stages = stages.mean();
    s.se_stages = stages.stddev() / std::sqrt(double(cfg.reps));
    s.geq_cap = capped > 0;
    s.cap_frac = double(capped) / cfg.reps;
    s.mean_data = data_sum / cfg.reps;
    s.mean_sims = sim_sum / cfg.reps;
    s.trials = std::move(trials);
    return s;
}

CsvTable fc_summary_table(const std::vector<FcCellSummary>& cells, std::uint64_t seed) {
    CsvTable t;
    t.header = {"testbed", "procedure", "batch",      "reps",      "stage_cap", "pcs",
                "pcs_se",  "mean_stages", "se_stages", "geq_cap",   "cap_frac",  "mean_data",
                "mean_sims", "seed"};
    for (const auto& c : cells) {
        t.rows.push_back({c.testbed, c.procedure, std::to_string(c.batch), std::to_string(c.reps),
                          std::to_string(c.stage_cap), fmt_double(c.pcs), fmt_double(c.pcs_se),
                          fmt_double(c.mean_stages), fmt_double(c.se_stages),
                          c.geq_cap ? "1" : "0", fmt_double(c.cap_frac), fmt_double(c.mean_data),
                          fmt_double(c.mean_sims), std::to_string(seed)});
    }
    return t;
}

CsvTable table_expected_stages(const ExperimentConfig& base, const std::vector<int>& batches,
                               const std::vector<std::string>& procedures) {
    std::vector<FcCellSummary> cells;
    for (int b : batches) {
        for (const auto& p : procedures) {
            ExperimentConfig cfg = base;
            cfg.batch = b;
            cfg.procedure = p;
            cells.push_back(run_fc_cell(cfg));
        }
    }
    return fc_summary_table(cells, base.seed);
}

// --- fixed budget ---

namespace {

OcbaiuOptions ocbaiu_options(const Testbed& tb, const ExperimentConfig& cfg, double total) {
    OcbaiuOptions o;
    o.total_budget = total;
    o.c_sim = cfg.cs;
    o.c_data = cfg.cd;
    if (o.c_data.size() == 1 && tb.blocks().size() > 1)
        o.c_data.assign(tb.blocks().size(), cfg.cd[0]);
    o.rho0 = cfg.rho0;
    o.n0_data = cfg.n0_data(total);
    o.pi0 = cfg.pi0;
    o.m0 = cfg.m0;
    o.m0_frac = cfg.m0_frac;
    o.delta = cfg.delta;
    o.oracle_stats = cfg.oracle;
    return o;
}

} // namespace

FbCellSummary run_ocbaiu_cell(const ExperimentConfig& cfg, double total_budget) {
    auto tb = make_testbed(cfg.testbed);
    OcbaiuOptions opts = ocbaiu_options(*tb, cfg, total_budget);
    StageAStats oracle;
    if (cfg.oracle) oracle = oracle_stage_a_stats(*tb, oracle_stats(*tb));

    auto trials = parallel_map<FbTrial>(cfg.reps, cfg.workers, [&](int rep) {
        OcbaiuResult r = run_ocbaiu(*tb, opts, cfg.seed, std::uint64_t(rep),
                                    cfg.oracle ? &oracle : nullptr);
        FbTrial t;
        t.winner = r.winner;
        t.correct = r.winner == tb->best_design();
        t.plan = r.plan;
        t.data_samples = r.data_samples;
        t.sim_replications = r.sim_replications;
        return t;
    });

    FbCellSummary s;
    s.testbed = cfg.testbed;
    s.total_budget = total_budget;
    s.oracle = cfg.oracle;
    s.reps = cfg.reps;
    const std::size_t q_count = tb->blocks().size();
    s.mean_rho.assign(q_count, 0.0);
    s.mean_data_share.assign(q_count, 0.0);
    int correct = 0;
    for (const auto& t : trials) {
        correct += t.correct ? 1 : 0;
        s.mean_money_frac += t.plan.data_money_frac;
        for (std::size_t q = 0; q < q_count; ++q) {
            s.mean_rho[q] += t.plan.rho[q];
            s.mean_data_share[q] += t.plan.data_share[q];
        }
    }
    s.pcs = double(correct) / cfg.reps;
    s.pcs_se = binomial_se(s.pcs, cfg.reps);
    s.mean_money_frac /= cfg.reps;
    for (std::size_t q = 0; q < q_count; ++q) {
        s.mean_rho[q] /= cfg.reps;
        s.mean_data_share[q] /= cfg.reps;
    }
    s.trials = std::move(trials);
    return s;
}

CsvTable fb_trial_table(const FbCellSummary& cell, const ExperimentConfig& cfg) {
    CsvTable t;
    t.header = {"testbed", "mode",  "T",         "cs",    "cd",         "rep",
                "winner",  "correct", "n_q",     "rho_q", "data_share", "money_frac",
                "m_total", "m_max", "data_samples", "sim_replications"};
    for (std::size_t rep = 0; rep < cell.trials.size(); ++rep) {
        const auto& tr = cell.trials[rep];
        long long m_total = 0, m_max = 0;
        for (long long v : tr.plan.m) {
            m_total += v;
            m_max = std::max(m_max, v);
        }
        t.rows.push_back({cell.testbed, cell.oracle ? "true" : "estimated",
                          fmt_double(cell.total_budget), fmt_double(cfg.cs), fmt_vec(cfg.cd),
                          std::to_string(rep), std::to_string(tr.winner), tr.correct ? "1" : "0",
                          fmt_vec(tr.plan.n_q), fmt_vec(tr.plan.rho), fmt_vec(tr.plan.data_share),
                          fmt_double(tr.plan.data_money_frac), std::to_string(m_total),
                          std::to_string(m_max), std::to_string(tr.data_samples),
                          std::to_string(tr.sim_replications)});
    }
    return t;
}

CsvTable fb_summary_table(const std::vector<FbCellSummary>& cells, const ExperimentConfig& cfg) {
    CsvTable t;
    t.header = {"testbed", "mode", "T",      "reps",       "pcs",
                "pcs_se",  "mean_money_frac", "mean_rho_q", "mean_data_share", "seed"};
    for (const auto& c : cells) {
        t.rows.push_back({c.testbed, c.oracle ? "true" : "estimated", fmt_double(c.total_budget),
                          std::to_string(c.reps), fmt_double(c.pcs), fmt_double(c.pcs_se),
                          fmt_double(c.mean_money_frac), fmt_vec(c.mean_rho),
                          fmt_vec(c.mean_data_share), std::to_string(cfg.seed)});
    }
    return t;
}

// --- fraction grid ---

namespace {

// Collect a fixed number of data samples per block, then spend the rest on
// sequential OCBA. Stream addressing matches run_ocbaiu so grid columns share
// their draws replication by replication.
int run_fraction_trial(const Testbed& tb, const ExperimentConfig& cfg, double total,
                       const std::vector<long long>& n_per_block, std::uint64_t rep) {
    const auto& blocks = tb.blocks();
    VecD theta;
    double data_spend = 0.0;
    for (std::size_t q = 0; q < blocks.size(); ++q) {
        RngStream rng(StreamKey{cfg.seed, StreamUse::Data, rep, q, 0});
        RunningCov acc(blocks[q].dim_theta);
        VecD sample(blocks[q].dim_data), g(blocks[q].dim_theta);
        std::size_t th_off = 0;
        for (std::size_t p = 0; p < q; ++p) th_off += blocks[p].dim_theta;
        auto theta_q = std::span<const double>(tb.theta_true()).subspan(th_off, blocks[q].dim_theta);
        for (long long j = 0; j < n_per_block[q]; ++j) {
            blocks[q].sample_data(theta_q, rng, sample);
            if (blocks[q].g_map)
                blocks[q].g_map(sample, g);
            else
                std::copy(sample.begin(), sample.end(), g.begin());
            acc.add(g);
        }
        theta.insert(theta.end(), acc.mean().begin(), acc.mean().end());
        const double cdq = cfg.cd[q < cfg.cd.size() ? q : 0];
        data_spend += cdq * double(n_per_block[q]);
    }
    const long long budget = static_cast<long long>(std::floor((total - data_spend) / cfg.cs));
    const int k = tb.num_designs();
    int m0 = cfg.m0;
    if (m0 < 0) m0 = std::max<int>(1, int(std::floor(cfg.m0_frac * double(budget) / k)));
    if (budget < static_cast<long long>(k) * std::max(m0, 1))
        throw InfeasibleBudget("fraction leaves too little simulation budget");
    OcbaResult r = run_ocba(tb, theta, budget, m0, cfg.delta, cfg.seed, rep, nullptr);
    return r.winner;
}

} // namespace

std::vector<FractionPoint> grid_fraction(const ExperimentConfig& cfg, double total_budget) {
    auto tb = make_testbed(cfg.testbed);
    if (tb->blocks().size() != 1)
        throw DomainError("grid_fraction: defined for single-block testbeds");
    const double cd0 = cfg.cd[0];

    std::vector<FractionPoint> points;
    std::vector<std::vector<long long>> data_counts;
    for (double f : cfg.fractions) {
        FractionPoint p;
        p.fraction = f;
        const long long n1 = static_cast<long long>(std::floor(f * total_budget / cd0));
        points.push_back(p);
        data_counts.push_back({n1});
    }
    // OCBAIU overlay: data size from the true-parameter budget split
    {
        StageAStats stats = oracle_stage_a_stats(*tb, oracle_stats(*tb));
        VecD n_floor{0.0};
        JointAllocation ja = solve_joint_allocation(stats, total_budget, cfg.cs, cfg.cd, n_floor);
        const long long n1 = std::max<long long>(1, llround(ja.n_real[0]));
        FractionPoint p;
        p.fraction = cd0 * double(n1) / total_budget;
        p.is_ocbaiu = true;
        points.push_back(p);
        data_counts.push_back({n1});
    }

    for (std::size_t i = 0; i < points.size(); ++i) {
        auto& p = points[i];
        if (p.fraction >= 1.0) {
            p.feasible = false;
            continue;
        }
        try {
            auto wins = parallel_map<int>(cfg.reps, cfg.workers, [&](int rep) {
                return run_fraction_trial(*tb, cfg, total_budget, data_counts[i],
                                          std::uint64_t(rep));
            });
            int correct = 0;
            for (int w : wins) correct += w == tb->best_design() ? 1 : 0;
            p.reps = cfg.reps;
            p.pcs = double(correct) / cfg.reps;
            p.pcs_se = binomial_se(p.pcs, cfg.reps);
        } catch (const InfeasibleBudget&) {
            p.feasible = false;
        }
    }
    return points;
}

CsvTable grid_table(const std::vector<FractionPoint>& points, const ExperimentConfig& cfg,
                    double total_budget) {
    CsvTable t;
    t.header = {"testbed", "T",   "cs",     "cd",   "fraction", "is_ocbaiu",
                "feasible", "reps", "pcs", "pcs_se", "seed"};
    for (const auto& p : points) {
        t.rows.push_back({cfg.testbed, fmt_double(total_budget), fmt_double(cfg.cs),
                          fmt_vec(cfg.cd), fmt_double(p.fraction), p.is_ocbaiu ? "1" : "0",
                          p.feasible ? "1" : "0", std::to_string(p.reps), fmt_double(p.pcs),
                          fmt_double(p.pcs_se), std::to_string(cfg.seed)});
    }
    return t;
}

// --- regions ---

std::vector<TrajRow> region_trajectories(const ExperimentConfig& cfg) {
    auto tb = make_testbed(cfg.testbed);
    ExperimentConfig c = cfg;
    c.procedure = "pairwise";
    PilotSample pilot = run_pilot(*tb, c.pilot, c.seed, 0);
    BoundParams bp = plug_in_params(pilot, *tb, plug_in_spec(*tb, c));

    std::vector<int> k_per_block(tb->blocks().size(), c.batch);
    TestbedDataSource data(*tb, k_per_block, c.seed, 0);

    FcOptions opt;
    opt.variant = FcVariant::Pairwise;
    opt.batch_r = c.batch;
    opt.record_trajectory = true;
    opt.track_i = c.track_i - 1;
    opt.track_j = c.track_j - 1;
    opt.no_eliminate = true;
    opt.fixed_stages = c.region_stages;

    SelectionResult r = run_fixed_confidence(*tb, data, bp, opt, c.seed, 0);
    return std::move(r.trajectory);
}

CsvTable emit_region_plot_data(const std::vector<TrajRow>& rows) {
    if (rows.empty()) throw ShapeError("emit_region_plot_data: empty trajectory log");
    CsvTable t;
    t.header = {"stage", "pair", "series", "value"};
    for (const auto& r : rows) {
        const std::string pair = std::to_string(r.i + 1) + "-" + std::to_string(r.j + 1);
        t.rows.push_back({std::to_string(r.stage), pair, r.series, fmt_double(r.value)});
        if (r.series.rfind("c_", 0) == 0)
            t.rows.push_back(
                {std::to_string(r.stage), pair, r.series + "_neg", fmt_double(-r.value)});
    }
    return t;
}

CsvTable estimate_pcs(const ExperimentConfig& cfg) {
    if (cfg.procedure == "ocbaiu") {
        std::vector<FbCellSummary> cells;
        for (double t : cfg.t_list) cells.push_back(run_ocbaiu_cell(cfg, t));
        return fb_summary_table(cells, cfg);
    }
    std::vector<FcCellSummary> cells{run_fc_cell(cfg)};
    return fc_summary_table(cells, cfg.seed);
}

void write_output(const CsvTable& table, const std::string& path) {
    if (path.empty()) {
        table.write(std::cout);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot open output file: " + path);
    table.write(f);
}

} // namespace rsiu
