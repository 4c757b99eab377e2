#include <doctest.h>

#include <cmath>
#include <numeric>

#include "rsiu/allocation.hpp"
#include "rsiu/errors.hpp"
#include "rsiu/inventory.hpp"
#include "rsiu/oracle.hpp"
#include "rsiu/toy.hpp"

using namespace rsiu;

namespace {

// mean output of one design under theta with r_count fresh replications
double mc_mean(const Testbed& tb, int design, VecD theta, int r_count, std::uint64_t tag) {
    RngStream rng(StreamKey{880, StreamUse::Misc, tag, 0, 0});
    VecD out = simulate(tb, design, theta, r_count, rng);
    return mean_of(out);
}

} // namespace

TEST_CASE("lr_gradient zero-mean score contraction") {
    auto tb = make_inventory_single();
    const auto& blk = tb->blocks()[0];
    VecD theta{1.0};
    double prev = 1e300;
    for (long long n : {100ll, 10000ll, 1000000ll}) {
        RngStream rng(StreamKey{14, StreamUse::Misc, std::uint64_t(n), 0, 0});
        MatD scores(n, 1);
        VecD outputs(n, 3.0);  // constant output
        VecD xi(12), sc(1);
        RunningStat score_stat;
        for (long long r = 0; r < n; ++r) {
            for (auto& v : xi) v = rng.exponential(1.0);
            blk.score(xi, theta, sc);
            scores(r, 0) = sc[0];
            score_stat.add(sc[0]);
        }
        const double est = lr_gradient(outputs, scores)[0];
        // 3 * mean score: shrinks like 1/sqrt(n)
        const double cap = 4.0 * 3.0 * score_stat.stddev() / std::sqrt(double(n));
        CHECK(std::abs(est) <= cap);
        CHECK(std::abs(est) <= prev + 1e-12);
        prev = std::abs(est);
    }
}

TEST_CASE("lr_gradient agrees with central finite differences on the testbed") {
    auto tb = make_inventory_single();
    const auto& blk = tb->blocks()[0];
    const long long n = 1000000;
    const double h = 0.01;

    // LR estimate at theta = 1 with its standard error
    RngStream rng(StreamKey{15, StreamUse::Misc, 0, 0, 0});
    VecD theta{1.0};
    std::vector<double> xi;
    sample_inputs(*tb, theta, int(n), rng, xi);
    RunningStat lr;
    VecD sc(1);
    for (long long r = 0; r < n; ++r) {
        std::span<const double> row{xi.data() + std::size_t(r) * 12, 12};
        blk.score(row, theta, sc);
        lr.add(tb->evaluate(4, row) * sc[0]);
    }
    // central finite difference of H(theta) by long-run simulation (CRN per side)
    const double h_plus = mc_mean(*tb, 4, {1.0 + h}, int(n), 1);
    const double h_minus = mc_mean(*tb, 4, {1.0 - h}, int(n), 2);
    const double fd = (h_plus - h_minus) / (2.0 * h);
    const double se_lr = lr.stddev() / std::sqrt(double(n));
    // each side's MC error ~ sigma/sqrt(n)
    const double se_fd = 2.5 / std::sqrt(double(n)) / h;
    CHECK(std::abs(lr.mean() - fd) < 3.0 * std::sqrt(se_lr * se_lr + se_fd * se_fd));
}

TEST_CASE("lr_gradient per quarterly block") {
    auto tb = make_inventory_multi();
    const long long n = 1000000;
    const double h = 0.01;
    RngStream rng(StreamKey{16, StreamUse::Misc, 0, 0, 0});
    std::vector<double> xi;
    VecD theta = tb->theta_true();
    sample_inputs(*tb, theta, int(n), rng, xi);
    MatD scores(n, 4);
    VecD outputs(n);
    for (long long r = 0; r < n; ++r) {
        std::span<const double> row{xi.data() + std::size_t(r) * 12, 12};
        outputs[r] = tb->evaluate(2, row);
        score_all_blocks(*tb, row, theta, scores.row(r));
    }
    VecD grad = lr_gradient(outputs, scores);
    for (int q = 0; q < 4; ++q) {
        VecD tp = theta, tm = theta;
        tp[q] += h;
        tm[q] -= h;
        const double fd = (mc_mean(*tb, 2, tp, int(n), 10 + q) -
                           mc_mean(*tb, 2, tm, int(n), 20 + q)) /
                          (2.0 * h);
        CHECK(std::abs(grad[q] - fd) < 3.0 * 2.0 * 2.5 / std::sqrt(double(n)) / h);
    }
}

TEST_CASE("lr_gradient shape errors") {
    MatD scores(3, 1);
    VecD outputs(2);
    CHECK_THROWS_AS(lr_gradient(outputs, scores), ShapeError);
    VecD one(1);
    MatD s1(1, 1);
    CHECK_THROWS_AS(lr_gradient(one, s1), ShapeError);
}

TEST_CASE("psi_sq quadratic form") {
    VecD a{1.0}, b{1.0};
    CHECK(psi_sq(a, b, MatD(1, 1, 5.0)) == doctest::Approx(0.0));

    VecD e1{1.0, 0.0}, z{0.0, 0.0};
    MatD eye(2, 2);
    eye(0, 0) = eye(1, 1) = 1.0;
    CHECK(psi_sq(e1, z, eye) == doctest::Approx(1.0));

    VecD g1{1.0, 2.0}, g2{0.0, 0.0};
    MatD d(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 9.0;
    CHECK(psi_sq(g1, g2, d) == doctest::Approx(40.0));
    CHECK_THROWS_AS(psi_sq(e1, VecD{1.0}, eye), ShapeError);
}

TEST_CASE("ocba rule identities") {
    SUBCASE("symmetric inferior designs get equal shares") {
        VecD sigma{1.0, 0.7, 0.7}, delta{0.0, 0.5, 0.5};
        auto m = ocba_rule(sigma, delta, 0, 999);
        CHECK(m[1] == m[2]);
        CHECK(std::accumulate(m.begin(), m.end(), 0ll) == 999);
    }
    SUBCASE("K=2 allocates proportionally to sigma") {
        VecD sigma{2.0, 1.0}, delta{0.0, 1.0};
        VecD t = ocba_targets(sigma, delta, 0, 300.0);
        CHECK(t[0] / t[1] == doctest::Approx(2.0));
    }
    SUBCASE("hand-solved three designs") {
        VecD sigma{1.0, 1.0, 1.0}, delta{0.0, 1.0, 2.0};
        // x2 = 1, x3 = 1/4 => M2/M3 = 4; M1 = sqrt(x2^2 + x3^2) = x3 sqrt(17)
        VecD t = ocba_targets(sigma, delta, 0, 1000.0);
        CHECK(t[1] / t[2] == doctest::Approx(4.0));
        CHECK(t[0] / t[2] == doctest::Approx(std::sqrt(17.0)));
        auto m = ocba_rule(sigma, delta, 0, 1000);
        CHECK(std::accumulate(m.begin(), m.end(), 0ll) == 1000);
        // integer identities within one unit per design
        CHECK(std::abs(double(m[1]) - 4.0 * double(m[2])) <= 4.0 + 1.0);
        CHECK(std::abs(double(m[0]) - std::sqrt(17.0) * double(m[2])) <= std::sqrt(17.0) + 1.0);
    }
    SUBCASE("errors") {
        VecD sigma{1.0, 1.0}, tie{0.0, 0.0};
        CHECK_THROWS_AS(ocba_rule(sigma, tie, 0, 100), TieError);
        VecD delta{0.0, 1.0};
        CHECK_THROWS_AS(ocba_rule(sigma, delta, 0, 1), InfeasibleBudget);
    }
}

TEST_CASE("optimal data size") {
    SUBCASE("insensitive pairs need no data") {
        VecD m{10.0, 10.0}, sigma{1.0, 1.0};
        MatD psi2(2, 1, 0.0);
        VecD cd{1.0};
        CHECK(optimal_data_size(m, sigma, psi2, 0, 1.0, cd)[0] == doctest::Approx(0.0));
    }
    SUBCASE("square-root scaling in the cost ratio") {
        VecD m{10.0, 10.0}, sigma{1.0, 1.0};
        MatD psi2(2, 1, 1.0);
        VecD cd{1.0};
        const double n1 = optimal_data_size(m, sigma, psi2, 0, 1.0, cd)[0];
        const double n4 = optimal_data_size(m, sigma, psi2, 0, 4.0, cd)[0];
        CHECK(n4 == doctest::Approx(2.0 * n1));
    }
    SUBCASE("unit cancellation") {
        VecD m{0.0, 10.0}, sigma{1.0, 1.0};
        MatD psi2(2, 1);
        psi2(1, 0) = 1.0;  // psi^2 = sigma^2
        VecD cd{1.0};
        CHECK(optimal_data_size(m, sigma, psi2, 0, 1.0, cd)[0] == doctest::Approx(10.0));
    }
}

TEST_CASE("cost-ratio monotonicity of the data size") {
    // cheaper data relative to simulation -> collect at least as much
    auto tb = make_inventory_single();
    StageAStats st = oracle_stage_a_stats(*tb, oracle_stats(*tb));
    double prev = -1.0;
    for (double cd : {10.0, 5.0, 2.0, 1.0, 0.5}) {
        VecD cdv{cd}, nf{0.0};
        JointAllocation ja = solve_joint_allocation(st, 4000.0, 1.0, cdv, nf);
        CHECK(ja.n_real[0] >= prev);
        prev = ja.n_real[0];
    }
}

TEST_CASE("joint allocation satisfies both identities") {
    auto tb = make_inventory_single();
    StageAStats st = oracle_stage_a_stats(*tb, oracle_stats(*tb));
    VecD cd{2.0}, nf{0.0};
    const double total = 4000.0;
    JointAllocation ja = solve_joint_allocation(st, total, 1.0, cd, nf);
    REQUIRE(ja.feasible);

    // data-size formula holds exactly given M
    VecD n_check = optimal_data_size(ja.m_real, st.sigma, st.psi2, st.best, 1.0, cd);
    CHECK(std::abs(n_check[0] - ja.n_real[0]) <= 1e-9 * std::max(1.0, ja.n_real[0]));

    // OCBA identities hold for M
    double sum_ratio_sq = 0.0;
    for (std::size_t i = 0; i < ja.m_real.size(); ++i) {
        if (int(i) == st.best) continue;
        sum_ratio_sq += std::pow(ja.m_real[i], 2) / std::pow(st.sigma[i], 2);
    }
    CHECK(std::abs(ja.m_real[st.best] - st.sigma[st.best] * std::sqrt(sum_ratio_sq)) <=
          1e-9 * ja.m_real[st.best]);

    // budget identity
    const double spend = 2.0 * ja.n_real[0] + ja.sim_budget;
    CHECK(std::abs(spend - total) <= 1e-9 * total);
}

TEST_CASE("sequential OCBA") {
    SUBCASE("identical constant designs tie to the lowest id") {
        LinearGaussianTestbed tb("tie", {1.0, 1.0}, {0.0, 0.0}, 0.0, 1.0, 0.0, 1.0);
        OcbaResult r = run_ocba(tb, tb.theta_true(), 100, 10, 5, 3, 0);
        CHECK(r.winner == 1);
    }
    SUBCASE("budget conservation") {
        auto tb = make_toy_linear();
        OcbaResult r = run_ocba(*tb, tb->theta_true(), 500, 20, 7, 4, 0);
        long long total = std::accumulate(r.m_alloc.begin(), r.m_alloc.end(), 0ll);
        CHECK(total == 500);
    }
    SUBCASE("beats equal allocation on the Gaussian toy") {
        // means (0, -0.5, -1), unit variances, B = 3000
        LinearGaussianTestbed tb("gauss3", {0.0, -0.5, -1.0}, {0.0, 0.0, 0.0}, 0.0, 1.0, 1.0, 1.0);
        const int reps = 500;
        int ocba_correct = 0, equal_correct = 0;
        for (int rep = 0; rep < reps; ++rep) {
            OcbaResult r = run_ocba(tb, tb.theta_true(), 3000, 100, 20, 91, std::uint64_t(rep));
            ocba_correct += r.winner == 1 ? 1 : 0;
            // equal allocation on the same instance
            double best = -1e300;
            int win = 0;
            for (int i = 0; i < 3; ++i) {
                RngStream rng(StreamKey{92, StreamUse::Sim, std::uint64_t(rep), std::uint64_t(i), 0});
                VecD out = simulate(tb, i, tb.theta_true(), 1000, rng);
                const double m = mean_of(out);
                if (m > best) {
                    best = m;
                    win = i + 1;
                }
            }
            equal_correct += win == 1 ? 1 : 0;
        }
        CHECK(ocba_correct >= equal_correct);
    }
}

TEST_CASE("ocbaiu on a shift family requests no extra data") {
    // equal slopes: grad delta = 0, so psi = 0 and stage A keeps N0
    LinearGaussianTestbed tb("shift", {0.0, -0.6, -1.0}, {1.0, 1.0, 1.0}, 0.0, 1.0, 0.5, 1.0);
    OcbaiuOptions opts;
    opts.total_budget = 2000.0;
    opts.c_data = {2.0};
    opts.n0_data = 25;
    opts.delta = 10;
    OcbaiuResult r = run_ocbaiu(tb, opts, 7, 0);
    CHECK(r.plan.n_q[0] == 25);
    CHECK_FALSE(r.plan.capped);
    // budget identity with integer-rounding slack
    const double spend = 2.0 * double(r.plan.n_q[0]) + 1.0 * double(r.sim_replications);
    CHECK(spend <= 2000.0);
    CHECK(spend > 2000.0 - std::max(2.0, 1.0) * 3.0 - opts.c_sim);
    CHECK(r.winner >= 1);
    CHECK(r.winner <= 3);
}

TEST_CASE("ocbaiu budget conservation on the inventory testbed") {
    auto tb = make_inventory_single();
    OcbaiuOptions opts;
    opts.total_budget = 3000.0;
    opts.c_data = {2.0};
    opts.n0_data = 22;
    OcbaiuResult r = run_ocbaiu(*tb, opts, 19, 3);
    const double spend = 2.0 * double(r.plan.n_q[0]) + double(r.sim_replications);
    CHECK(spend <= 3000.0);
    CHECK(spend > 3000.0 - 2.0 * 20.0);
    CHECK(r.plan.n_q[0] >= 22);
}
