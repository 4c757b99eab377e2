#pragma once
// Fixed-budget machinery: the likelihood-ratio gradient estimator, the
// pairwise sensitivity psi^2, the OCBA allocation rule
//
//   M_b = sigma_b sqrt( sum_{i != b} M_i^2 / sigma_i^2 ),
//   M_i / M_j = (sigma_i^2 / delta_bi^2) / (sigma_j^2 / delta_bj^2),
//
// the closed-form optimal data size
//
//   N_q = sqrt( (c_S / c_{D,q}) sum_{i != b} M_i^2 psi_bi^2(q) / sigma_i^2 ),
//
// their joint budget split, the sequential OCBA loop, and the two-stage
// OCBAIU procedure.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rsiu/model.hpp"
#include "rsiu/stats.hpp"

namespace rsiu {

// Sample mean of output * score per coordinate; outputs and score rows must
// come from draws under the same P_theta the scores were evaluated at.
VecD lr_gradient(std::span<const double> outputs, const MatD& scores);

// psi^2 = (grad_i - grad_j)' Sigma (grad_i - grad_j).
double psi_sq(std::span<const double> grad_i, std::span<const double> grad_j, const MatD& sigma);

// Real-valued OCBA targets scaled to sum to `budget`. delta holds the gaps
// delta_bi (delta[best] ignored); all gaps for i != best must be positive.
VecD ocba_targets(std::span<const double> sigma, std::span<const double> delta, int best,
                  double budget);

// Integer allocation: targets floored at 1, largest-remainder rounding
// restores the exact total.
std::vector<long long> ocba_rule(std::span<const double> sigma, std::span<const double> delta,
                                 int best, long long budget);

// Closed-form N_q (real-valued, pre-rounding) given a design allocation m.
// psi2 is K x Q with row i = psi_bi^2(q).
VecD optimal_data_size(std::span<const double> m, std::span<const double> sigma, const MatD& psi2,
                       int best, double c_sim, std::span<const double> c_data);

// Plug-in statistics feeding the budget split.
struct StageAStats {
    VecD h;        // per-design performance estimates
    VecD sigma;    // per-design output std (floored)
    MatD psi2;     // K x Q sensitivities vs the current best
    int best = 0;  // argmax h, ties to the lowest id
    VecD gaps;     // h[best] - h[i], floored positive for i != best
};

StageAStats make_stage_a_stats(const VecD& h, const VecD& sigma_raw, const MatD& grads,
                               const std::vector<MatD>& sigma_theta_blocks,
                               std::span<const int> block_dims);

// Joint fixed point of the data-size formula and the OCBA rule under the
// budget identity sum_q c_Dq max(N_q, n_floor_q) + c_S sum_i M_i = T.
// Given the OCBA shares the data formula is affine in the simulation budget,
// so the split solves exactly (bisection handles the flooring kinks).
struct JointAllocation {
    VecD n_real;        // pre-rounding N_q (already floored at n_floor)
    VecD m_real;        // pre-rounding M_i
    double sim_budget;  // sum m_real, in replications
    bool feasible;      // false when the floors alone exceed the budget
};

JointAllocation solve_joint_allocation(const StageAStats& s, double total_budget, double c_sim,
                                       std::span<const double> c_data,
                                       std::span<const double> n_floor);

// Sequential OCBA under a frozen parameter. `initial_outputs` (optional,
// K x P) are reused as each design's first P outputs without consuming
// budget; every design is then topped up to m0 before the delta-increment
// loop spends the remaining `budget_new` replications.
struct OcbaResult {
    int winner = 0;  // 1-based design id
    std::vector<long long> m_alloc;
    long long new_replications = 0;
    VecD h_hat;
    VecD sigma_hat;
};

OcbaResult run_ocba(const Testbed& tb, std::span<const double> theta, long long budget_new,
                    int m0, int delta, std::uint64_t seed, std::uint64_t replication,
                    const MatD* initial_outputs = nullptr);

// Realized budget split of one OCBAIU run.
struct AllocationPlan {
    std::vector<long long> n_q;  // data samples per block (final)
    std::vector<long long> m;    // replications per design (final, incl. reused pilot)
    VecD rho;                    // N_q / T
    VecD data_share;             // N_q / sum_p N_p
    double data_money_frac = 0.0;  // sum_q c_Dq N_q / T
    double total_budget = 0.0;
    VecD c_data;
    double c_sim = 1.0;
    bool capped = false;  // data request exceeded the affordable maximum
};

struct OcbaiuOptions {
    double total_budget = 4000.0;  // T
    double c_sim = 1.0;
    VecD c_data = {2.0};
    double rho0 = 0.0;        // N0 = floor(rho0 T) when > 0
    long long n0_data = 20;   // explicit N0 when rho0 == 0
    double pi0 = 0.0;         // M0 = floor(pi0 T) when > 0
    int m0 = -1;              // explicit M0 per design; -1 defers to pi0/m0_frac
    double m0_frac = 0.2;     // fallback: M0 = m0_frac * sim budget / K
    int delta = 20;
    bool oracle_stats = false;  // true-parameter variant (no pilot)
};

struct OcbaiuResult {
    int winner = 0;  // 1-based
    AllocationPlan plan;
    long long data_samples = 0;      // raw data consumed
    long long sim_replications = 0;  // raw replications consumed (incl. pilot)
    VecD h_hat;
    VecD theta_hat;
};

// `oracle` supplies Stage-A statistics in the true-parameter variant; it must
// be non-null when opts.oracle_stats is set.
OcbaiuResult run_ocbaiu(const Testbed& tb, const OcbaiuOptions& opts, std::uint64_t seed,
                        std::uint64_t replication, const StageAStats* oracle = nullptr);

} // namespace rsiu
