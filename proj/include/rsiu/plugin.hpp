#pragma once
// Plug-in estimation of the bound constants from a pilot: raw data samples
// per block and raw CRN replications per design under the pilot parameter
// estimate. Following the implementation guidance, sigma_bar and L_bar are
// plain estimates of sigma(theta_c) and ||grad H(theta_c)||, not suprema;
// BoundParams.plug_in records this.

#include <cstdint>
#include <vector>

#include "rsiu/bounds.hpp"
#include "rsiu/model.hpp"

namespace rsiu {

struct PilotSample {
    int samples = 0;       // P: raw samples per block == raw CRN reps per design
    VecD theta_pilot;      // per-block mean of the G-mapped data
    std::vector<MatD> raw_data_g;  // per block: P x d_q mapped samples
    MatD outputs;          // K x P raw outputs under theta_pilot (CRN)
    MatD scores;           // P x d score rows at theta_pilot
    long long raw_data_count = 0;
    long long raw_sim_count = 0;
};

PilotSample run_pilot(const Testbed& tb, int pilot_samples, std::uint64_t seed,
                      std::uint64_t replication);

struct PlugInSpec {
    double alpha = 0.05;
    double eta = 0.2;
    int n0 = 1;
    std::vector<int> k_per_block;  // data batch size per stage
    int batch_r = 1;               // replications aggregated per stage output
};

// Raw-scale statistics -> batched-scale BoundParams (sigma/sqrt(R),
// nu_j/sqrt(k_q), Sigma_G/k_q), plus u*, kappa, beta and the heuristic
// limiting stds. Shared by the pilot path and the oracle path.
BoundParams build_bound_params(const PlugInSpec& spec, int num_designs, int dim_theta,
                               std::span<const int> block_dims, const VecD& sigma_raw,
                               const MatD& pair_sigma_raw, const MatD& grads,
                               const MatD& sigma_g_raw, const VecD& nu_raw);

BoundParams plug_in_params(const PilotSample& pilot, const Testbed& tb, const PlugInSpec& spec);

} // namespace rsiu
