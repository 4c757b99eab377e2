#include "rsiu/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rsiu/errors.hpp"

namespace rsiu {

namespace {
constexpr double kSigmaFloor = 1e-12;
constexpr double kGapFloorScale = 1e-8;
} // namespace

VecD lr_gradient(std::span<const double> outputs, const MatD& scores) {
    if (outputs.size() != scores.rows) throw ShapeError("lr_gradient: length mismatch");
    if (outputs.size() < 2) throw ShapeError("lr_gradient: need at least 2 samples");
    VecD g(scores.cols, 0.0);
    for (std::size_t r = 0; r < scores.rows; ++r)
        for (std::size_t c = 0; c < scores.cols; ++c) g[c] += outputs[r] * scores(r, c);
    for (double& v : g) v /= static_cast<double>(outputs.size());
    return g;
}

double psi_sq(std::span<const double> grad_i, std::span<const double> grad_j, const MatD& sigma) {
    if (grad_i.size() != grad_j.size()) throw ShapeError("psi_sq: gradient dimension mismatch");
    VecD diff(grad_i.size());
    for (std::size_t c = 0; c < diff.size(); ++c) diff[c] = grad_i[c] - grad_j[c];
    return quadratic_form(diff, sigma);
}

VecD ocba_targets(std::span<const double> sigma, std::span<const double> delta, int best,
                  double budget) {
    const int k = static_cast<int>(sigma.size());
    if (k < 2 || int(delta.size()) != k) throw ShapeError("ocba_targets: need K >= 2 designs");
    if (best < 0 || best >= k) throw ShapeError("ocba_targets: best index out of range");
    for (int i = 0; i < k; ++i) {
        if (!(sigma[i] > 0.0)) throw DomainError("ocba_targets: sigma must be positive");
        if (i != best && !(delta[i] > 0.0)) throw TieError("ocba_targets: zero gap to the best");
    }
    VecD x(k, 0.0);
    double sum_ratio_sq = 0.0;
    for (int i = 0; i < k; ++i) {
        if (i == best) continue;
        x[i] = sigma[i] * sigma[i] / (delta[i] * delta[i]);
        sum_ratio_sq += x[i] * x[i] / (sigma[i] * sigma[i]);
    }
    x[best] = sigma[best] * std::sqrt(sum_ratio_sq);
    const double total = std::accumulate(x.begin(), x.end(), 0.0);
    for (double& v : x) v *= budget / total;
    return x;
}

std::vector<long long> ocba_rule(std::span<const double> sigma, std::span<const double> delta,
                                 int best, long long budget) {
    const int k = static_cast<int>(sigma.size());
    if (budget < k) throw InfeasibleBudget("ocba_rule: budget below one replication per design");
    VecD t = ocba_targets(sigma, delta, best, static_cast<double>(budget));

    std::vector<long long> m(k);
    long long assigned = 0;
    for (int i = 0; i < k; ++i) {
        m[i] = std::max<long long>(1, static_cast<long long>(std::floor(t[i])));
        assigned += m[i];
    }
    // largest-remainder top-up / overshoot-trim to restore the exact total
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    while (assigned < budget) {
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            double ra = t[a] - double(m[a]), rb = t[b] - double(m[b]);
            return ra != rb ? ra > rb : a < b;
        });
        for (int idx : order) {
            if (assigned == budget) break;
            ++m[idx];
            ++assigned;
        }
    }
    while (assigned > budget) {
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            double ra = double(m[a]) - t[a], rb = double(m[b]) - t[b];
            return ra != rb ? ra > rb : a < b;
        });
        bool trimmed = false;
        for (int idx : order) {
            if (assigned == budget) break;
            if (m[idx] > 1) {
                --m[idx];
                --assigned;
                trimmed = true;
            }
        }
        if (!trimmed) throw InfeasibleBudget("ocba_rule: cannot honor floor of 1 per design");
    }
    return m;
}

VecD optimal_data_size(std::span<const double> m, std::span<const double> sigma, const MatD& psi2,
                       int best, double c_sim, std::span<const double> c_data) {
    const int k = static_cast<int>(sigma.size());
    const int q_count = static_cast<int>(psi2.cols);
    if (int(m.size()) != k || int(psi2.rows) != k || int(c_data.size()) != q_count)
        throw ShapeError("optimal_data_size: dimension mismatch");
    VecD n(q_count, 0.0);
    for (int q = 0; q < q_count; ++q) {
        double s = 0.0;
        for (int i = 0; i < k; ++i) {
            if (i == best) continue;
            s += m[i] * m[i] * psi2(i, q) / (sigma[i] * sigma[i]);
        }
        n[q] = std::sqrt(c_sim / c_data[q] * s);
    }
    return n;
}

StageAStats make_stage_a_stats(const VecD& h, const VecD& sigma_raw, const MatD& grads,
                               const std::vector<MatD>& sigma_theta_blocks,
                               std::span<const int> block_dims) {
    StageAStats s;
    s.h = h;
    const int k = static_cast<int>(h.size());
    s.sigma.resize(k);
    bool warned = false;
    for (int i = 0; i < k; ++i) {
        s.sigma[i] = std::max(sigma_raw[i], kSigmaFloor);
        warned = warned || sigma_raw[i] < kSigmaFloor;
    }
    (void)warned;
    s.best = 0;
    for (int i = 1; i < k; ++i)
        if (h[i] > h[s.best]) s.best = i;

    double h_scale = 0.0;
    for (int i = 0; i < k; ++i) h_scale = std::max(h_scale, std::abs(h[i]));
    const double gap_floor = kGapFloorScale * std::max(h_scale, 1.0);
    s.gaps.resize(k);
    for (int i = 0; i < k; ++i)
        s.gaps[i] = i == s.best ? 0.0 : std::max(h[s.best] - h[i], gap_floor);

    const int q_count = static_cast<int>(sigma_theta_blocks.size());
    s.psi2 = MatD(k, q_count);
    for (int i = 0; i < k; ++i) {
        if (i == s.best) continue;
        int off = 0;
        for (int q = 0; q < q_count; ++q) {
            const int dq = block_dims[q];
            s.psi2(i, q) = psi_sq(grads.row(s.best).subspan(off, dq), grads.row(i).subspan(off, dq),
                                  sigma_theta_blocks[q]);
            off += dq;
        }
    }
    return s;
}

JointAllocation solve_joint_allocation(const StageAStats& s, double total_budget, double c_sim,
                                       std::span<const double> c_data,
                                       std::span<const double> n_floor) {
    const int k = static_cast<int>(s.h.size());
    const int q_count = static_cast<int>(c_data.size());
    if (int(s.psi2.cols) != q_count || int(n_floor.size()) != q_count)
        throw ShapeError("solve_joint_allocation: block count mismatch");

    const VecD shares = ocba_targets(s.sigma, s.gaps, s.best, 1.0);

    auto n_of = [&](double b) {
        VecD m(k);
        for (int i = 0; i < k; ++i) m[i] = shares[i] * b;
        VecD n = optimal_data_size(m, s.sigma, s.psi2, s.best, c_sim, c_data);
        for (int q = 0; q < q_count; ++q) n[q] = std::max(n[q], n_floor[q]);
        return n;
    };
    auto data_spend = [&](const VecD& n) {
        double d = 0.0;
        for (int q = 0; q < q_count; ++q) d += c_data[q] * n[q];
        return d;
    };

    JointAllocation out;
    const double floor_spend = data_spend(n_of(0.0));
    if (floor_spend >= total_budget) {
        out.feasible = false;
        out.n_real = n_of(0.0);
        out.m_real.assign(k, 0.0);
        out.sim_budget = 0.0;
        return out;
    }
    // g(B) = c_S B + data_spend(N(B)) - T is strictly increasing; bisect.
    double lo = 0.0, hi = (total_budget - floor_spend) / c_sim;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (c_sim * mid + data_spend(n_of(mid)) > total_budget)
            hi = mid;
        else
            lo = mid;
    }
    const double b = 0.5 * (lo + hi);
    out.feasible = true;
    out.sim_budget = b;
    out.n_real = n_of(b);
    out.m_real.resize(k);
    for (int i = 0; i < k; ++i) out.m_real[i] = shares[i] * b;
    return out;
}

OcbaResult run_ocba(const Testbed& tb, std::span<const double> theta, long long budget_new,
                    int m0, int delta, std::uint64_t seed, std::uint64_t replication,
                    const MatD* initial_outputs) {
    const int k = tb.num_designs();
    if (delta < 1) throw DomainError("run_ocba: delta must be >= 1");
    if (budget_new < 0) throw InfeasibleBudget("run_ocba: negative budget");
    if (!initial_outputs && budget_new < static_cast<long long>(k) * std::max(m0, 1))
        throw InfeasibleBudget("run_ocba: budget below the initial allocation");

    std::vector<RunningStat> stats(k);
    std::vector<RngStream> streams;
    streams.reserve(k);
    for (int i = 0; i < k; ++i)
        streams.emplace_back(StreamKey{seed, StreamUse::Sim, replication, std::uint64_t(i), 0});

    std::vector<long long> m(k, 0);
    if (initial_outputs) {
        if (int(initial_outputs->rows) != k) throw ShapeError("run_ocba: initial outputs rows != K");
        for (int i = 0; i < k; ++i) {
            for (std::size_t r = 0; r < initial_outputs->cols; ++r)
                stats[i].add((*initial_outputs)(i, r));
            m[i] = static_cast<long long>(initial_outputs->cols);
        }
    }

    long long remaining = budget_new;
    std::vector<double> xi;
    auto simulate_one = [&](int i) {
        sample_inputs(tb, theta, 1, streams[i], xi);
        stats[i].add(tb.evaluate(i, xi));
        ++m[i];
        --remaining;
    };

    // top up to m0 per design
    for (int i = 0; i < k && remaining > 0; ++i)
        while (m[i] < m0 && remaining > 0) simulate_one(i);

    VecD h(k), sg(k), gaps(k);
    auto refresh = [&]() {
        for (int i = 0; i < k; ++i) {
            h[i] = stats[i].mean();
            sg[i] = std::max(stats[i].stddev(), kSigmaFloor);
        }
        int b = 0;
        for (int i = 1; i < k; ++i)
            if (h[i] > h[b]) b = i;
        double h_scale = 1.0;
        for (int i = 0; i < k; ++i) h_scale = std::max(h_scale, std::abs(h[i]));
        for (int i = 0; i < k; ++i)
            gaps[i] = i == b ? 0.0 : std::max(h[b] - h[i], kGapFloorScale * h_scale);
        return b;
    };

    while (remaining > 0) {
        const int b = refresh();
        const long long step = std::min<long long>(delta, remaining);
        const long long total_target =
            std::accumulate(m.begin(), m.end(), 0ll) + step;
        VecD targets = ocba_targets(sg, gaps, b, static_cast<double>(total_target));
        for (long long u = 0; u < step; ++u) {
            int pick = 0;
            double best_deficit = -1e300;
            for (int i = 0; i < k; ++i) {
                const double deficit = targets[i] - double(m[i]);
                if (deficit > best_deficit) {
                    best_deficit = deficit;
                    pick = i;
                }
            }
            simulate_one(pick);
        }
    }

    OcbaResult res;
    refresh();
    int w = 0;
    for (int i = 1; i < k; ++i)
        if (h[i] > h[w]) w = i;  // ties keep the lowest id
    res.winner = w + 1;
    res.m_alloc = m;
    res.new_replications = budget_new;
    res.h_hat = h;
    res.sigma_hat = sg;
    return res;
}

OcbaiuResult run_ocbaiu(const Testbed& tb, const OcbaiuOptions& opts, std::uint64_t seed,
                        std::uint64_t replication, const StageAStats* oracle) {
    const int k = tb.num_designs();
    const auto& blocks = tb.blocks();
    const int q_count = static_cast<int>(blocks.size());
    if (int(opts.c_data.size()) != q_count)
        throw ShapeError("run_ocbaiu: one data cost per block required");
    const double total = opts.total_budget;

    long long n0 = opts.rho0 > 0.0 ? static_cast<long long>(std::floor(opts.rho0 * total))
                                   : opts.n0_data;
    if (opts.oracle_stats) n0 = 0;
    if (!opts.oracle_stats && n0 < 2)
        throw InsufficientPilot("run_ocbaiu: need at least 2 pilot data samples");

    OcbaiuResult out;
    std::vector<int> block_dims(q_count);
    int d = 0;
    for (int q = 0; q < q_count; ++q) {
        block_dims[q] = blocks[q].dim_theta;
        d += blocks[q].dim_theta;
    }

    // --- Stage A: pilot data, pilot CRN replications, plug-in statistics ---
    std::vector<RunningCov> data_acc;  // per-block mean of G-mapped samples
    for (int q = 0; q < q_count; ++q) data_acc.emplace_back(blocks[q].dim_theta);
    auto collect_data = [&](int q, long long count, std::uint64_t stage_tag) {
        RngStream rng(StreamKey{seed, StreamUse::Data, replication, std::uint64_t(q), stage_tag});
        VecD sample(blocks[q].dim_data), g(blocks[q].dim_theta);
        std::size_t th_off = 0;
        for (int p = 0; p < q; ++p) th_off += blocks[p].dim_theta;
        auto theta_q = std::span<const double>(tb.theta_true()).subspan(th_off, blocks[q].dim_theta);
        for (long long j = 0; j < count; ++j) {
            blocks[q].sample_data(theta_q, rng, sample);
            if (blocks[q].g_map)
                blocks[q].g_map(sample, g);
            else
                std::copy(sample.begin(), sample.end(), g.begin());
            data_acc[q].add(g);
        }
        out.data_samples += count;
    };
    auto theta_hat = [&]() {
        VecD th;
        for (int q = 0; q < q_count; ++q)
            th.insert(th.end(), data_acc[q].mean().begin(), data_acc[q].mean().end());
        return th;
    };

    StageAStats stats;
    MatD pilot_outputs;
    VecD theta_pilot;
    if (opts.oracle_stats) {
        if (!oracle) throw DomainError("run_ocbaiu: oracle stats requested but not provided");
        stats = *oracle;
    } else {
        for (int q = 0; q < q_count; ++q) collect_data(q, n0, 0);
        theta_pilot = theta_hat();

        RngStream crn(StreamKey{seed, StreamUse::PilotSim, replication, kCrnUnit, 0});
        std::vector<double> xi;
        sample_inputs(tb, theta_pilot, static_cast<int>(n0), crn, xi);
        const int m_dim = tb.dim_xi();
        pilot_outputs = MatD(k, static_cast<std::size_t>(n0));
        MatD scores(static_cast<std::size_t>(n0), d);
        for (long long r = 0; r < n0; ++r) {
            std::span<const double> row{xi.data() + std::size_t(r) * m_dim, std::size_t(m_dim)};
            for (int i = 0; i < k; ++i) pilot_outputs(i, r) = tb.evaluate(i, row);
            score_all_blocks(tb, row, theta_pilot, scores.row(r));
        }
        out.sim_replications += static_cast<long long>(k) * n0;

        VecD h(k), sg(k);
        MatD grads(k, d);
        for (int i = 0; i < k; ++i) {
            RunningStat st;
            for (long long r = 0; r < n0; ++r) st.add(pilot_outputs(i, r));
            h[i] = st.mean();
            sg[i] = st.stddev();
            VecD gi = lr_gradient({pilot_outputs.row(i).data(), std::size_t(n0)}, scores);
            std::copy(gi.begin(), gi.end(), grads.row(i).begin());
        }
        std::vector<MatD> sig_blocks;
        std::size_t th_off = 0;
        for (int q = 0; q < q_count; ++q) {
            sig_blocks.push_back(blocks[q].sigma_theta(
                std::span<const double>(theta_pilot).subspan(th_off, blocks[q].dim_theta)));
            th_off += blocks[q].dim_theta;
        }
        stats = make_stage_a_stats(h, sg, grads, sig_blocks, block_dims);
    }

    // --- budget split: Eq.-style closed form coupled with the OCBA shares ---
    VecD n_floor(q_count, opts.oracle_stats ? 0.0 : double(n0));
    const double pilot_sim_cost = opts.oracle_stats ? 0.0 : opts.c_sim * double(k) * double(n0);
    JointAllocation ja =
        solve_joint_allocation(stats, total - 0.0, opts.c_sim, opts.c_data, n_floor);

    AllocationPlan& plan = out.plan;
    plan.total_budget = total;
    plan.c_data = opts.c_data;
    plan.c_sim = opts.c_sim;
    plan.n_q.resize(q_count);
    double data_spend = 0.0;
    for (int q = 0; q < q_count; ++q) {
        plan.n_q[q] = std::max<long long>(static_cast<long long>(std::llround(ja.n_real[q])),
                                          opts.oracle_stats ? 1 : n0);
        data_spend += opts.c_data[q] * double(plan.n_q[q]);
    }

    // cap the data request if rounding / the pilot simulation charge pushed
    // the plan past the budget
    double money_left = total - data_spend - pilot_sim_cost;
    if (money_left < 0.0) {
        plan.capped = true;
        for (int q = 0; q < q_count && money_left < 0.0; ++q) {
            const long long floor_q = opts.oracle_stats ? 1 : n0;
            while (plan.n_q[q] > floor_q && money_left < 0.0) {
                --plan.n_q[q];
                money_left += opts.c_data[q];
            }
        }
        data_spend = 0.0;
        for (int q = 0; q < q_count; ++q) data_spend += opts.c_data[q] * double(plan.n_q[q]);
    }

    // --- collect the remaining data and refresh theta ---
    for (int q = 0; q < q_count; ++q) {
        const long long extra = plan.n_q[q] - (opts.oracle_stats ? 0 : n0);
        if (extra > 0) collect_data(q, extra, 1);
    }
    out.theta_hat = theta_hat();

    double rho_sum = 0.0;
    plan.rho.resize(q_count);
    for (int q = 0; q < q_count; ++q) {
        plan.rho[q] = double(plan.n_q[q]) / total;
        rho_sum += double(plan.n_q[q]);
    }
    plan.data_share.resize(q_count);
    for (int q = 0; q < q_count; ++q) plan.data_share[q] = double(plan.n_q[q]) / rho_sum;
    plan.data_money_frac = data_spend / total;

    // --- Stage B: sequential OCBA under the frozen theta ---
    const long long budget_new = static_cast<long long>(std::floor(std::max(money_left, 0.0) / opts.c_sim));
    int m0 = opts.m0;
    if (m0 < 0) {
        if (opts.pi0 > 0.0)
            m0 = static_cast<int>(std::floor(opts.pi0 * total));
        else {
            const double sim_total = double(budget_new) + (opts.oracle_stats ? 0.0 : double(k) * double(n0));
            m0 = std::max<int>(1, static_cast<int>(std::floor(opts.m0_frac * sim_total / k)));
        }
    }
    OcbaResult ocba = run_ocba(tb, out.theta_hat, budget_new, m0, opts.delta, seed, replication,
                               opts.oracle_stats ? nullptr : &pilot_outputs);
    out.sim_replications += budget_new;
    out.winner = ocba.winner;
    out.h_hat = ocba.h_hat;
    plan.m = ocba.m_alloc;
    return out;
}

} // namespace rsiu
