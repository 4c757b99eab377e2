#include <doctest.h>

#include <cmath>

#include "rsiu/errors.hpp"
#include "rsiu/inventory.hpp"
#include "rsiu/stats.hpp"

using namespace rsiu;

TEST_CASE("cost trace with zero demand") {
    InventoryParams p;
    VecD zero(12, 0.0);
    // J_t = 1 every period, R_t = 0, c_t = 0.1
    CHECK(inventory_cost(1.0, zero, p) == doctest::Approx(1.2));
}

TEST_CASE("cost trace with constant demand 2, first periods pinned") {
    InventoryParams p;
    SUBCASE("one period") {
        p.horizon = 1;
        VecD d{2.0};
        // J1 = -1, c1 = 0.2*1
        CHECK(inventory_cost(1.0, d, p) == doctest::Approx(0.2));
    }
    SUBCASE("two periods") {
        p.horizon = 2;
        VecD d{2.0, 2.0};
        // R1 = min(0.5, 2) = 0.5; J2 = -1-2+0.5 = -2.5; c2 = 0.1*0.5 + 0.2*2.5
        CHECK(inventory_cost(1.0, d, p) == doctest::Approx(0.2 + 0.55));
    }
}

TEST_CASE("cost is continuous in the order-up-to level") {
    InventoryParams p;
    RngStream rng(StreamKey{21, StreamUse::Misc, 0, 0, 0});
    VecD d(12);
    for (auto& v : d) v = rng.exponential(1.0);
    double prev = inventory_cost(1.0, d, p);
    for (double s = 1.0005; s <= 20.0; s += 0.0005) {
        const double c = inventory_cost(s, d, p);
        CHECK(std::abs(c - prev) < 0.01);  // slope bounded by a few cost units
        prev = c;
    }
}

TEST_CASE("negative demand rejected") {
    InventoryParams p;
    VecD d(12, 0.0);
    d[3] = -0.1;
    CHECK_THROWS_AS(inventory_cost(2.0, d, p), DomainError);
}

TEST_CASE("demand sampler moments") {
    auto tb = make_inventory_single();
    RngStream rng(StreamKey{31, StreamUse::Sim, 0, kCrnUnit, 1});
    std::vector<double> xi;
    const int reps = 20000;
    sample_inputs(*tb, tb->theta_true(), reps, rng, xi);
    RunningStat all;
    for (double v : xi) all.add(v);
    CHECK(all.mean() == doctest::Approx(1.0).epsilon(3.0 / std::sqrt(12.0 * reps)));

    auto tbm = make_inventory_multi();
    RngStream rng2(StreamKey{31, StreamUse::Sim, 0, kCrnUnit, 2});
    sample_inputs(*tbm, tbm->theta_true(), reps, rng2, xi);
    RunningStat q2;  // months 4..6 of each path
    for (int r = 0; r < reps; ++r)
        for (int t = 3; t < 6; ++t) q2.add(xi[std::size_t(r) * 12 + t]);
    CHECK(q2.mean() == doctest::Approx(0.8).epsilon(0.02));

    // reproducibility of the whole path
    RngStream a(StreamKey{9, StreamUse::Sim, 4, kCrnUnit, 7});
    RngStream b(StreamKey{9, StreamUse::Sim, 4, kCrnUnit, 7});
    std::vector<double> x1, x2;
    sample_inputs(*tbm, tbm->theta_true(), 3, a, x1);
    sample_inputs(*tbm, tbm->theta_true(), 3, b, x2);
    CHECK(x1 == x2);
}

TEST_CASE("demand score") {
    auto tb = make_inventory_single();
    const auto& blk = tb->blocks()[0];
    VecD theta{1.0}, out(1);

    SUBCASE("mean-matching zeroes the score") {
        VecD xi(12, 1.0);
        blk.score(xi, theta, out);
        CHECK(out[0] == doctest::Approx(0.0));
    }
    SUBCASE("direct arithmetic") {
        VecD xi(12, 14.0 / 12.0);  // sum = 14
        blk.score(xi, theta, out);
        CHECK(out[0] == doctest::Approx(2.0));
    }
    SUBCASE("zero mean in expectation") {
        RngStream rng(StreamKey{5, StreamUse::Misc, 0, 0, 0});
        RunningStat s;
        VecD xi(12);
        for (int r = 0; r < 200000; ++r) {
            for (auto& v : xi) v = rng.exponential(1.0);
            blk.score(xi, theta, out);
            s.add(out[0]);
        }
        CHECK(std::abs(s.mean()) < 3.0 * s.stddev() / std::sqrt(200000.0));
    }
    SUBCASE("quarterly blocks") {
        auto tbm = make_inventory_multi();
        VecD th{0.8}, o(1);
        VecD xi_q{0.5, 1.0, 1.5};  // sum 3.0, 3*theta = 2.4
        tbm->blocks()[1].score(xi_q, th, o);
        CHECK(o[0] == doctest::Approx((3.0 - 2.4) / 0.64));
    }
}

TEST_CASE("parameter covariance") {
    auto tb = make_inventory_single();
    VecD th{1.0};
    CHECK(tb->blocks()[0].sigma_theta(th)(0, 0) == doctest::Approx(1.0));

    auto tbm = make_inventory_multi();
    const VecD want{1.0, 0.64, 0.25, 0.25};
    for (int q = 0; q < 4; ++q) {
        VecD tq{tbm->theta_true()[q]};
        CHECK(tbm->blocks()[q].sigma_theta(tq)(0, 0) == doctest::Approx(want[q]));
    }

    // empirical: variance of a 3-sample quarterly mean is theta^2/3
    RngStream rng(StreamKey{6, StreamUse::Misc, 0, 0, 0});
    RunningStat s;
    for (int r = 0; r < 100000; ++r) {
        double m = 0.0;
        for (int t = 0; t < 3; ++t) m += rng.exponential(0.8);
        s.add(m / 3.0);
    }
    CHECK(s.variance() == doctest::Approx(0.64 / 3.0).epsilon(0.05));
}

TEST_CASE("fused mean evaluation matches evaluate()") {
    auto tb = make_inventory_single();
    RngStream rng(StreamKey{13, StreamUse::Sim, 0, kCrnUnit, 3});
    std::vector<double> xi;
    sample_inputs(*tb, tb->theta_true(), 64, rng, xi);
    std::vector<int> designs{0, 4, 19};
    VecD fused(3);
    tb->accumulate_means(designs, xi.data(), 64, fused);
    for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int r = 0; r < 64; ++r)
            s += tb->evaluate(designs[j], {xi.data() + std::size_t(r) * 12, 12});
        CHECK(fused[j] == doctest::Approx(s / 64.0).epsilon(1e-12));
    }
}
