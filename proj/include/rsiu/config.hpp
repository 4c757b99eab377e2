#pragma once
// Experiment configuration: one flat struct covering both procedure families,
// serialized as `key = value` lines with `#` comments. Command-line flags
// override file values; the round trip through the file format is lossless.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rsiu/stats.hpp"

namespace rsiu {

struct ExperimentConfig {
    std::string testbed = "inv-single";
    std::string procedure = "heuristic";  // seiu|pairwise|heuristic|noiu|ocbaiu

    // fixed confidence
    double alpha = 0.05;
    double eta = 0.2;
    int n0 = 1;
    int batch = 1000;  // k_q = R per stage
    int stage_cap = 10000;
    int pilot = 2000;  // raw pilot samples per block / per design

    // fixed budget
    VecD t_list = {4000.0};
    VecD cd = {2.0};
    double cs = 1.0;
    double rho0 = 0.0;     // N0 = floor(rho0 T) when > 0, else the linear schedule
    double n0_base = 20.0;  // N0(T) = n0_base + n0_slope * (T - n0_ref)
    double n0_slope = 0.002;
    double n0_ref = 2000.0;
    double pi0 = 0.0;    // M0 = floor(pi0 T) when > 0
    int m0 = -1;         // explicit per-design M0, overrides pi0
    double m0_frac = 0.2;  // fallback: share of the simulation budget
    int delta = 20;
    bool oracle = false;  // true-parameter variant
    VecD fractions = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

    // replication engine
    int reps = 200;
    std::uint64_t seed = 1;
    int workers = 0;  // 0 = hardware concurrency
    std::string out;  // output path; empty = stdout

    // region plots
    int track_i = 4;  // 1-based design ids of the tracked pair
    int track_j = 5;
    int region_stages = 200;

    long long n0_data(double total_budget) const {
        if (rho0 > 0.0) return static_cast<long long>(rho0 * total_budget);
        return static_cast<long long>(n0_base + n0_slope * (total_budget - n0_ref) + 0.5);
    }

    void write(std::ostream& os) const;
    std::string to_string() const;
};

// Parses `key = value` lines; '#' starts a comment; unknown keys are errors.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_string(const std::string& text);

} // namespace rsiu
