#pragma once
// The fixed-confidence stage loop. Each stage collects one batched data
// sample, refreshes theta_hat, simulates every surviving design once under
// it (one batched output; CRN for the pairwise variants), updates the
// moving averages and applies the variant's elimination rule:
//
//   SE-IU:    drop i when H_hat_i + c_i < max_{j in S, j != i} (H_hat_j - c_j)
//   Pairwise: drop j (i) when delta_hat_ij >  c_ij ( < -c_ij )
//   Heuristic: same rule with the Gaussian-tail bound and sigma~_{ij,inf}
//   NoIuBaseline: same rule with the SU-only bound, sigma estimated online
//       from the observed output differences as if they were i.i.d.; this
//       baseline deliberately ignores input uncertainty and its nominal
//       guarantee is invalid under it.

#include <cstdint>
#include <string>
#include <vector>

#include "rsiu/bounds.hpp"
#include "rsiu/model.hpp"

namespace rsiu {

enum class FcVariant { SeIu, Pairwise, Heuristic, NoIuBaseline };

const char* to_string(FcVariant v);
FcVariant fc_variant_from_string(const std::string& s);

struct FcOptions {
    FcVariant variant = FcVariant::Pairwise;
    int stage_cap = 10000;
    int batch_r = 1;  // raw replications averaged into one output per stage

    bool record_trajectory = false;
    int track_i = -1, track_j = -1;  // 0-based pair logged each stage
    bool no_eliminate = false;       // region mode: run exactly fixed_stages
    int fixed_stages = 0;
};

// Long-format trajectory row for the region plots.
struct TrajRow {
    int stage;
    int i, j;  // 0-based designs; j = -1 for per-design series
    std::string series;
    double value;
};

struct SelectionResult {
    int winner = 0;  // 1-based design id
    int stages = 0;  // tau
    bool hit_cap = false;
    long long data_samples = 0;      // raw samples consumed by the run
    long long sim_replications = 0;  // raw replications consumed by the run
    std::vector<TrajRow> trajectory;
};

// Data stream ended before termination; carries what was known at that point.
struct StreamExhausted : std::runtime_error {
    explicit StreamExhausted(SelectionResult r)
        : std::runtime_error("data stream exhausted before termination"), partial(std::move(r)) {}
    SelectionResult partial;
};

SelectionResult run_fixed_confidence(const Testbed& tb, DataSource& data, const BoundParams& bp,
                                     const FcOptions& opt, std::uint64_t seed,
                                     std::uint64_t replication);

} // namespace rsiu
