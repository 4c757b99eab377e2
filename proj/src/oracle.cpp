#include "rsiu/oracle.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace rsiu {

namespace {
constexpr std::uint64_t kOracleSeed = 0x0C0FFEE5EEDull;
constexpr int kChunk = 4096;
} // namespace

const TrueStats& oracle_stats(const Testbed& tb, long long replications) {
    static std::mutex mu;
    static std::map<std::string, TrueStats> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(tb.name());
    if (it != cache.end()) return it->second;

    const int k = tb.num_designs();
    const int d = tb.dim_theta();
    const int m = tb.dim_xi();

    TrueStats ts;
    ts.replications = replications;
    std::vector<RunningStat> per_design(k);
    std::vector<RunningStat> per_pair(std::size_t(k) * k);
    MatD grad_sum(k, d);

    std::vector<double> xi, outputs(k);
    VecD score(d);
    long long done = 0;
    std::uint64_t chunk_id = 0;
    while (done < replications) {
        const int r_count = static_cast<int>(std::min<long long>(kChunk, replications - done));
        RngStream rng(StreamKey{kOracleSeed, StreamUse::Oracle, 0, kCrnUnit, chunk_id++});
        sample_inputs(tb, tb.theta_true(), r_count, rng, xi);
        for (int r = 0; r < r_count; ++r) {
            std::span<const double> row{xi.data() + std::size_t(r) * m, std::size_t(m)};
            for (int i = 0; i < k; ++i) {
                outputs[i] = tb.evaluate(i, row);
                per_design[i].add(outputs[i]);
            }
            score_all_blocks(tb, row, tb.theta_true(), score);
            for (int i = 0; i < k; ++i)
                for (int c = 0; c < d; ++c) grad_sum(i, c) += outputs[i] * score[c];
            for (int i = 0; i < k; ++i)
                for (int j = i + 1; j < k; ++j)
                    per_pair[std::size_t(i) * k + j].add(outputs[i] - outputs[j]);
        }
        done += r_count;
    }

    ts.h.resize(k);
    ts.sigma.resize(k);
    ts.pair_sigma = MatD(k, k);
    ts.grads = MatD(k, d);
    for (int i = 0; i < k; ++i) {
        ts.h[i] = per_design[i].mean();
        ts.sigma[i] = per_design[i].stddev();
        for (int c = 0; c < d; ++c) ts.grads(i, c) = grad_sum(i, c) / double(replications);
        for (int j = i + 1; j < k; ++j)
            ts.pair_sigma(i, j) = ts.pair_sigma(j, i) = per_pair[std::size_t(i) * k + j].stddev();
    }
    ts.best_index = 0;
    for (int i = 1; i < k; ++i)
        if (ts.h[i] > ts.h[ts.best_index]) ts.best_index = i;

    auto [pos, inserted] = cache.emplace(tb.name(), std::move(ts));
    return pos->second;
}

StageAStats oracle_stage_a_stats(const Testbed& tb, const TrueStats& ts) {
    const auto& blocks = tb.blocks();
    std::vector<MatD> sig_blocks;
    std::vector<int> dims;
    std::size_t off = 0;
    for (const auto& b : blocks) {
        sig_blocks.push_back(
            b.sigma_theta(std::span<const double>(tb.theta_true()).subspan(off, b.dim_theta)));
        dims.push_back(b.dim_theta);
        off += b.dim_theta;
    }
    return make_stage_a_stats(ts.h, ts.sigma, ts.grads, sig_blocks, dims);
}

} // namespace rsiu
