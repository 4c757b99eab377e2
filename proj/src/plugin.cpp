#include "rsiu/plugin.hpp"

#include <algorithm>
#include <cmath>

#include "rsiu/allocation.hpp"
#include "rsiu/errors.hpp"
#include "rsiu/estimation.hpp"

namespace rsiu {

PilotSample run_pilot(const Testbed& tb, int pilot_samples, std::uint64_t seed,
                      std::uint64_t replication) {
    if (pilot_samples < 2) throw InsufficientPilot("run_pilot: need at least 2 pilot samples");
    const auto& blocks = tb.blocks();
    const int k = tb.num_designs();
    const int d = tb.dim_theta();
    const int p = pilot_samples;

    PilotSample out;
    out.samples = p;

    // raw data per block, mapped through G
    std::size_t th_off = 0;
    for (std::size_t q = 0; q < blocks.size(); ++q) {
        const auto& b = blocks[q];
        RngStream rng(StreamKey{seed, StreamUse::PilotData, replication, q, 0});
        MatD g(p, b.dim_theta);
        VecD sample(b.dim_data);
        auto theta_q = std::span<const double>(tb.theta_true()).subspan(th_off, b.dim_theta);
        for (int j = 0; j < p; ++j) {
            b.sample_data(theta_q, rng, sample);
            if (b.g_map)
                b.g_map(sample, g.row(j));
            else
                std::copy(sample.begin(), sample.end(), g.row(j).begin());
        }
        VecD mean(b.dim_theta, 0.0);
        for (int j = 0; j < p; ++j)
            for (int c = 0; c < b.dim_theta; ++c) mean[c] += g(j, c);
        for (double& v : mean) v /= p;
        out.theta_pilot.insert(out.theta_pilot.end(), mean.begin(), mean.end());
        out.raw_data_g.push_back(std::move(g));
        out.raw_data_count += p;
        th_off += b.dim_theta;
    }

    // CRN replications under theta_pilot, with scores for the gradients
    RngStream crn(StreamKey{seed, StreamUse::PilotSim, replication, kCrnUnit, 0});
    std::vector<double> xi;
    sample_inputs(tb, out.theta_pilot, p, crn, xi);
    const int m = tb.dim_xi();
    out.outputs = MatD(k, p);
    out.scores = MatD(p, d);
    for (int r = 0; r < p; ++r) {
        std::span<const double> row{xi.data() + std::size_t(r) * m, std::size_t(m)};
        for (int i = 0; i < k; ++i) out.outputs(i, r) = tb.evaluate(i, row);
        score_all_blocks(tb, row, out.theta_pilot, out.scores.row(r));
    }
    out.raw_sim_count = static_cast<long long>(k) * p;
    return out;
}

BoundParams build_bound_params(const PlugInSpec& spec, int num_designs, int dim_theta,
                               std::span<const int> block_dims, const VecD& sigma_raw,
                               const MatD& pair_sigma_raw, const MatD& grads,
                               const MatD& sigma_g_raw, const VecD& nu_raw) {
    if (int(spec.k_per_block.size()) != int(block_dims.size()))
        throw ShapeError("build_bound_params: one k_q per block required");
    BoundParams bp;
    bp.alpha = spec.alpha;
    bp.eta = spec.eta;
    bp.n0 = spec.n0;
    bp.num_designs = num_designs;
    bp.dim_theta = dim_theta;

    const double floor = 1e-12;
    const double rt_r = std::sqrt(double(spec.batch_r));

    bp.sigma_bar.resize(num_designs);
    bp.l_bar.resize(num_designs);
    for (int i = 0; i < num_designs; ++i) {
        if (sigma_raw[i] < floor) bp.degenerate_variance = true;
        bp.sigma_bar[i] = std::max(sigma_raw[i], floor) / rt_r;
        bp.l_bar[i] = norm2(grads.row(i));
    }

    bp.pair_sigma_bar = MatD(num_designs, num_designs);
    bp.pair_l_bar = MatD(num_designs, num_designs);
    bp.pair_sigma_tilde = MatD(num_designs, num_designs);

    // batched data covariance: per block Sigma_G / k_q
    MatD sigma_g_batch = sigma_g_raw;
    {
        int off = 0;
        for (std::size_t q = 0; q < block_dims.size(); ++q) {
            for (int a = 0; a < block_dims[q]; ++a)
                for (int b = 0; b < block_dims[q]; ++b)
                    sigma_g_batch(off + a, off + b) /= double(spec.k_per_block[q]);
            off += block_dims[q];
        }
    }

    bp.nu.resize(dim_theta);
    {
        int off = 0;
        for (std::size_t q = 0; q < block_dims.size(); ++q) {
            for (int a = 0; a < block_dims[q]; ++a) {
                const double raw = std::max(nu_raw[off + a], floor);
                bp.nu[off + a] = raw / std::sqrt(double(spec.k_per_block[q]));
            }
            off += block_dims[q];
        }
    }
    bp.nu_bar = *std::max_element(bp.nu.begin(), bp.nu.end());

    VecD grad_diff(dim_theta);
    for (int i = 0; i < num_designs; ++i) {
        for (int j = 0; j < num_designs; ++j) {
            if (i == j) continue;
            if (pair_sigma_raw(i, j) < floor && i < j) bp.degenerate_variance = true;
            const double s_ij = std::max(pair_sigma_raw(i, j), floor) / rt_r;
            bp.pair_sigma_bar(i, j) = s_ij;
            for (int c = 0; c < dim_theta; ++c) grad_diff[c] = grads(i, c) - grads(j, c);
            bp.pair_l_bar(i, j) = norm2(grad_diff);
            bp.pair_sigma_tilde(i, j) = std::sqrt(
                limiting_variance_pairwise(grad_diff, sigma_g_batch, s_ij * s_ij, spec.eta));
        }
    }

    bp.kappa_n0 = tail_kappa(spec.n0);
    bp.beta_n0 = tail_beta(spec.n0, spec.eta);
    bp.u_star = solve_u_star(spec.n0, spec.alpha, bp.nu, dim_theta);
    return bp;
}

BoundParams plug_in_params(const PilotSample& pilot, const Testbed& tb, const PlugInSpec& spec) {
    if (pilot.samples < 2) throw InsufficientPilot("plug_in_params: fewer than 2 pilot samples");
    const int k = tb.num_designs();
    const int d = tb.dim_theta();
    const auto& blocks = tb.blocks();
    std::vector<int> block_dims;
    for (const auto& b : blocks) block_dims.push_back(b.dim_theta);

    // raw per-design and per-pair output dispersion (CRN differences)
    VecD sigma_raw(k);
    MatD pair_sigma_raw(k, k);
    for (int i = 0; i < k; ++i) {
        RunningStat st;
        for (int r = 0; r < pilot.samples; ++r) st.add(pilot.outputs(i, r));
        sigma_raw[i] = st.stddev();
        for (int j = i + 1; j < k; ++j) {
            RunningStat sd;
            for (int r = 0; r < pilot.samples; ++r)
                sd.add(pilot.outputs(i, r) - pilot.outputs(j, r));
            pair_sigma_raw(i, j) = pair_sigma_raw(j, i) = sd.stddev();
        }
    }

    // likelihood-ratio gradient per design (CRN makes pair differences exact)
    MatD grads(k, d);
    for (int i = 0; i < k; ++i) {
        VecD gi = lr_gradient({pilot.outputs.row(i).data(), std::size_t(pilot.samples)},
                              pilot.scores);
        std::copy(gi.begin(), gi.end(), grads.row(i).begin());
    }

    // raw data covariance (block diagonal) and per-coordinate sub-Gaussian proxy
    MatD sigma_g_raw(d, d);
    VecD nu_raw(d);
    int off = 0;
    for (std::size_t q = 0; q < blocks.size(); ++q) {
        RunningCov cov(blocks[q].dim_theta);
        for (int r = 0; r < pilot.samples; ++r) cov.add(pilot.raw_data_g[q].row(r));
        MatD c = cov.covariance();
        for (int a = 0; a < blocks[q].dim_theta; ++a) {
            for (int b = 0; b < blocks[q].dim_theta; ++b) sigma_g_raw(off + a, off + b) = c(a, b);
            nu_raw[off + a] = std::sqrt(std::max(c(a, a), 0.0));
        }
        off += blocks[q].dim_theta;
    }

    BoundParams bp = build_bound_params(spec, k, d, block_dims, sigma_raw, pair_sigma_raw, grads,
                                        sigma_g_raw, nu_raw);
    bp.plug_in = true;
    return bp;
}

} // namespace rsiu
