#include "rsiu/elimination.hpp"

#include <algorithm>
#include <cmath>

#include "rsiu/errors.hpp"
#include "rsiu/estimation.hpp"

namespace rsiu {

const char* to_string(FcVariant v) {
    switch (v) {
        case FcVariant::SeIu: return "seiu";
        case FcVariant::Pairwise: return "pairwise";
        case FcVariant::Heuristic: return "heuristic";
        case FcVariant::NoIuBaseline: return "noiu";
    }
    return "?";
}

FcVariant fc_variant_from_string(const std::string& s) {
    if (s == "seiu") return FcVariant::SeIu;
    if (s == "pairwise") return FcVariant::Pairwise;
    if (s == "heuristic") return FcVariant::Heuristic;
    if (s == "noiu") return FcVariant::NoIuBaseline;
    throw DomainError("unknown procedure variant: " + s);
}

namespace {

// Online i.i.d.-style dispersion of the batched output differences, used only
// by the ignoring-IU baseline.
class PairStats {
public:
    explicit PairStats(int k) : k_(k), stats_(std::size_t(k) * k) {}
    void add(int i, int j, double diff) {
        stats_[std::size_t(i) * k_ + j].add(diff);
        stats_[std::size_t(j) * k_ + i].add(-diff);
    }
    const RunningStat& at(int i, int j) const { return stats_[std::size_t(i) * k_ + j]; }

private:
    int k_;
    std::vector<RunningStat> stats_;
};

} // namespace

SelectionResult run_fixed_confidence(const Testbed& tb, DataSource& data, const BoundParams& bp,
                                     const FcOptions& opt, std::uint64_t seed,
                                     std::uint64_t replication) {
    const int k = tb.num_designs();
    const int d = tb.dim_theta();
    const bool crn = opt.variant != FcVariant::SeIu;
    const int cap = opt.no_eliminate ? opt.fixed_stages : opt.stage_cap;
    if (!opt.no_eliminate && cap < bp.n0 + 1)
        throw DomainError("run_fixed_confidence: stage cap must exceed n0");

    // stage index from which the variant may eliminate
    int elim_start = bp.n0 + 1;
    if (opt.variant == FcVariant::Heuristic) elim_start = 1;
    if (opt.variant == FcVariant::NoIuBaseline) elim_start = 2;  // needs a dispersion estimate

    SelectionResult res;
    std::vector<bool> alive(k, true);
    int alive_count = k;
    ThetaTracker tracker(d);
    std::vector<OutputWindow> windows(k, OutputWindow(bp.eta));
    PairStats noiu_stats(opt.variant == FcVariant::NoIuBaseline ? k : 1);

    VecD d_n, h_hat(k, 0.0), means(k);
    std::vector<double> xi;
    std::vector<int> alive_idx(k);

    const bool track = opt.record_trajectory && opt.track_i >= 0 && opt.track_j >= 0;

    auto pair_bound = [&](int i, int j, int n) -> double {
        switch (opt.variant) {
            case FcVariant::Pairwise:
                return bound_pairwise(bp, i, j, n);
            case FcVariant::Heuristic:
                return bound_heuristic(bp.pair_sigma_tilde(i, j), k, bp.alpha, n);
            case FcVariant::NoIuBaseline: {
                const double sd = std::max(noiu_stats.at(i, j).stddev(), 1e-12);
                return bound_heuristic(sd / std::sqrt(1.0 - bp.eta), k, bp.alpha, n);
            }
            default:
                return 0.0;
        }
    };

    for (int n = 1; n <= cap; ++n) {
        if (!data.next(d_n)) {
            res.stages = n - 1;
            res.hit_cap = false;
            res.data_samples = data.raw_samples_consumed();
            int w = 0;
            for (int i = 1; i < k; ++i)
                if (alive[i] && (!alive[w] || h_hat[i] > h_hat[w])) w = i;
            res.winner = w + 1;
            throw StreamExhausted(res);
        }
        tracker.update(d_n);

        // one batched output per surviving design under theta_hat_n
        alive_idx.clear();
        for (int i = 0; i < k; ++i)
            if (alive[i]) alive_idx.push_back(i);
        if (crn) {
            RngStream rng(StreamKey{seed, StreamUse::Sim, replication, kCrnUnit, std::uint64_t(n)});
            sample_inputs(tb, tracker.theta(), opt.batch_r, rng, xi);
            tb.accumulate_means(alive_idx, xi.data(), opt.batch_r,
                                {means.data(), alive_idx.size()});
        } else {
            for (std::size_t a = 0; a < alive_idx.size(); ++a) {
                const int i = alive_idx[a];
                RngStream rng(
                    StreamKey{seed, StreamUse::Sim, replication, std::uint64_t(i), std::uint64_t(n)});
                sample_inputs(tb, tracker.theta(), opt.batch_r, rng, xi);
                int one = i;
                tb.accumulate_means({&one, 1}, xi.data(), opt.batch_r, {means.data() + a, 1});
            }
        }
        res.sim_replications += static_cast<long long>(alive_idx.size()) * opt.batch_r;
        for (std::size_t a = 0; a < alive_idx.size(); ++a) {
            windows[alive_idx[a]].push(means[a]);
            h_hat[alive_idx[a]] = windows[alive_idx[a]].moving_average(n);
        }
        if (opt.variant == FcVariant::NoIuBaseline) {
            for (std::size_t a = 0; a < alive_idx.size(); ++a)
                for (std::size_t b = a + 1; b < alive_idx.size(); ++b)
                    noiu_stats.add(alive_idx[a], alive_idx[b], means[a] - means[b]);
        }

        if (track && alive[opt.track_i] && alive[opt.track_j]) {
            const int i = opt.track_i, j = opt.track_j;
            res.trajectory.push_back({n, i, j, "delta_hat", h_hat[i] - h_hat[j]});
            res.trajectory.push_back(
                {n, i, j, "c_heuristic", bound_heuristic(bp.pair_sigma_tilde(i, j), k, bp.alpha, n)});
            if (n > bp.n0) {
                res.trajectory.push_back({n, i, j, "c_pairwise", bound_pairwise(bp, i, j, n)});
                res.trajectory.push_back({n, i, j, "c_noiu", bound_pairwise_t(bp, i, j, n)});
                res.trajectory.push_back(
                    {n, i, j, "c_seiu_sum", bound_seiu(bp, i, n) + bound_seiu(bp, j, n)});
            }
        }

        if (!opt.no_eliminate && n >= elim_start && alive_count > 1) {
            if (opt.variant == FcVariant::SeIu) {
                // snapshot rule; the design with the largest lower bound survives
                VecD lower(k), upper(k);
                for (int i : alive_idx) {
                    const double c = bound_seiu(bp, i, n);
                    lower[i] = h_hat[i] - c;
                    upper[i] = h_hat[i] + c;
                }
                int arg1 = -1, arg2 = -1;  // best and second-best lower bounds
                for (int i : alive_idx) {
                    if (arg1 < 0 || lower[i] > lower[arg1]) {
                        arg2 = arg1;
                        arg1 = i;
                    } else if (arg2 < 0 || lower[i] > lower[arg2]) {
                        arg2 = i;
                    }
                }
                for (int i : alive_idx) {
                    const double rival = i == arg1 ? (arg2 >= 0 ? lower[arg2] : lower[arg1])
                                                   : lower[arg1];
                    if (upper[i] < rival) {
                        alive[i] = false;
                        --alive_count;
                    }
                }
            } else {
                for (std::size_t a = 0; a < alive_idx.size(); ++a) {
                    const int i = alive_idx[a];
                    if (!alive[i]) continue;
                    for (std::size_t b = a + 1; b < alive_idx.size(); ++b) {
                        const int j = alive_idx[b];
                        if (!alive[i]) break;
                        if (!alive[j]) continue;
                        const double c = pair_bound(i, j, n);
                        const double dd = h_hat[i] - h_hat[j];
                        if (dd > c) {
                            alive[j] = false;
                            --alive_count;
                        } else if (dd < -c) {
                            alive[i] = false;
                            --alive_count;
                        }
                    }
                }
            }
        }

        res.stages = n;
        if (!opt.no_eliminate && alive_count == 1) break;
    }

    res.hit_cap = !opt.no_eliminate && alive_count > 1;
    int w = -1;
    for (int i = 0; i < k; ++i)
        if (alive[i] && (w < 0 || h_hat[i] > h_hat[w])) w = i;  // ties keep the lowest id
    res.winner = w + 1;
    res.data_samples = data.raw_samples_consumed();
    return res;
}

} // namespace rsiu
