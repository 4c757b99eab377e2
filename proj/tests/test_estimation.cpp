#include <doctest.h>

#include <cmath>

#include "rsiu/errors.hpp"
#include "rsiu/estimation.hpp"
#include "rsiu/rng.hpp"

using namespace rsiu;

TEST_CASE("moving average discards the oldest floor(eta n) outputs") {
    OutputWindow w(0.2);
    for (int i = 1; i <= 10; ++i) w.push(double(i));
    // n_eta = 2, mean of 3..10
    CHECK(w.moving_average(10) == doctest::Approx(6.5));

    OutputWindow w0(0.0);
    for (int i = 1; i <= 10; ++i) w0.push(double(i));
    CHECK(w0.moving_average(10) == doctest::Approx(5.5));

    OutputWindow wc(0.37);
    for (int i = 0; i < 25; ++i) wc.push(5.0);
    CHECK(wc.moving_average(25) == doctest::Approx(5.0));

    CHECK_THROWS_AS(w.moving_average(0), DomainError);
    CHECK_THROWS_AS(w.moving_average(11), ShapeError);
}

TEST_CASE("discard_count honors decimal eta at exact multiples") {
    CHECK(discard_count(0.2, 10) == 2);
    CHECK(discard_count(0.3, 10) == 3);
    CHECK(discard_count(0.6, 5) == 3);
    CHECK(discard_count(0.2, 4) == 0);
    CHECK(discard_count(0.0, 100) == 0);
}

TEST_CASE("weight_w endpoints and midpoint") {
    CHECK(weight_w(0.0) == doctest::Approx(2.0));
    CHECK(weight_w(0.999999) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(weight_w(0.5) == doctest::Approx(4.0 + 4.0 * std::log(0.5)).epsilon(1e-12));
    CHECK_THROWS_AS(weight_w(1.0), DomainError);
    CHECK_THROWS_AS(weight_w(-0.1), DomainError);
}

TEST_CASE("limiting variance single") {
    MatD sg(1, 1, 1.0);
    VecD zero{0.0}, one{1.0};
    CHECK(limiting_variance_single(zero, sg, 4.0, 0.0) == doctest::Approx(4.0));
    CHECK(limiting_variance_single(one, sg, 0.0, 0.0) == doctest::Approx(2.0));
    const double expect = weight_w(0.5) + 2.0;
    CHECK(limiting_variance_single(one, sg, 1.0, 0.5) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(limiting_variance_single(one, sg, 1.0, 0.5) == doctest::Approx(3.22741).epsilon(1e-5));
    MatD sg2(2, 2, 0.0);
    CHECK_THROWS_AS(limiting_variance_single(one, sg2, 1.0, 0.0), ShapeError);
}

TEST_CASE("limiting variance pairwise") {
    MatD sg(1, 1, 1.0);
    VecD zero{0.0}, two{2.0};
    CHECK(limiting_variance_pairwise(zero, sg, 0.0, 0.3) == doctest::Approx(0.0));
    CHECK(limiting_variance_pairwise(two, sg, 0.0, 0.0) == doctest::Approx(8.0));
    // shift family: grad delta = 0, so the value ignores Sigma_G entirely
    MatD sg_big(1, 1, 1e6);
    const double v1 = limiting_variance_pairwise(zero, sg, 2.0, 0.2);
    const double v2 = limiting_variance_pairwise(zero, sg_big, 2.0, 0.2);
    CHECK(v1 == doctest::Approx(2.0 / 0.8));
    CHECK(v1 == doctest::Approx(v2));
}

TEST_CASE("eta_star cases") {
    SUBCASE("SU only: monotone objective, minimum at zero") {
        auto r = eta_star(0.0, 3.0);
        CHECK(r.eta == doctest::Approx(0.0));
        CHECK_FALSE(r.boundary_hit);
    }
    SUBCASE("IU only: boundary hit") {
        auto r = eta_star(1.0, 0.0);
        CHECK(r.eta > 0.999);
        CHECK(r.boundary_hit);
    }
    SUBCASE("interior minimizer matches a 1e-4 grid scan") {
        auto r = eta_star(1.0, 1.0);
        double best_eta = 0.0, best = 1e300;
        for (int i = 0; i <= 9999; ++i) {
            const double e = i * 1e-4;
            const double f = weight_w(e) + 1.0 / (1.0 - e);
            if (f < best) {
                best = f;
                best_eta = e;
            }
        }
        CHECK(std::abs(r.eta - best_eta) < 2e-4);
        CHECK(r.objective <= best + 1e-9);
        CHECK_FALSE(r.boundary_hit);
    }
    SUBCASE("degenerate input") { CHECK_THROWS_AS(eta_star(0.0, 0.0), UndefinedObjective); }
}

TEST_CASE("objective has a single local minimum on a 1e-3 grid") {
    for (auto [vi, vs] : {std::pair{1.0, 1.0}, {0.3, 2.0}, {5.0, 0.1}, {1e-3, 1e3}}) {
        int sign_changes = 0;
        double prev = weight_w(0.0) * vi + vs;
        bool increasing = false;
        for (int i = 1; i <= 998; ++i) {
            const double e = i * 1e-3;
            const double f = weight_w(e) * vi + vs / (1.0 - e);
            if (f > prev && !increasing) {
                increasing = true;
                ++sign_changes;
            } else if (f < prev && increasing) {
                increasing = false;
                ++sign_changes;
            }
            prev = f;
        }
        CHECK(sign_changes <= 1);  // decreasing then increasing, or monotone
    }
}

TEST_CASE("ThetaTracker running mean is exact") {
    ThetaTracker t(2);
    RngStream rng(StreamKey{4, StreamUse::Data, 0, 0, 0});
    VecD sum(2, 0.0);
    const int n = 137;
    for (int i = 0; i < n; ++i) {
        VecD d{rng.exponential(1.0), rng.normal(0.0, 3.0)};
        sum[0] += d[0];
        sum[1] += d[1];
        t.update(d);
    }
    CHECK(std::abs(t.theta()[0] - sum[0] / n) < 1e-12);
    CHECK(std::abs(t.theta()[1] - sum[1] / n) < 1e-12);
    CHECK(t.sigma_g_hat()(0, 1) == doctest::Approx(t.sigma_g_hat()(1, 0)));
}

TEST_CASE("harmonic-tail square identity") {
    // sum_{i=1..n} gamma_{n,i}^2 == 2n - gamma_{n,1} with gamma_{n,i} = sum_{j=i..n} 1/j
    for (int n = 1; n <= 200; ++n) {
        double gamma = 0.0;  // gamma_{n,i}, built from i = n down to 1
        double sum_sq = 0.0;
        for (int i = n; i >= 1; --i) {
            gamma += 1.0 / i;
            sum_sq += gamma * gamma;
        }
        CHECK(std::abs(sum_sq - (2.0 * n - gamma)) < 1e-9);
    }
}

TEST_CASE("moving average asymptotic variance on a linear model") {
    // D_j ~ N(theta, s^2); one output per stage drawn N(theta_hat_j, sigma^2);
    // H(theta) = theta. Var(sqrt(n)(H_hat - theta)) -> w_eta s^2 + sigma^2/(1-eta).
    const double s = 0.7, sigma = 1.0, theta_c = 1.0;
    const int n = 1500, reps = 4000;
    for (double eta : {0.0, 0.5}) {
        RunningStat var;
        for (int rep = 0; rep < reps; ++rep) {
            RngStream rng(StreamKey{1234, StreamUse::Misc, std::uint64_t(rep), 0,
                                    std::uint64_t(eta * 10)});
            double theta_hat = 0.0;
            OutputWindow w(eta);
            for (int j = 1; j <= n; ++j) {
                theta_hat += (rng.normal(theta_c, s) - theta_hat) / j;
                w.push(rng.normal(theta_hat, sigma));
            }
            var.add(std::sqrt(double(n)) * (w.moving_average(n) - theta_c));
        }
        const double want = weight_w(eta) * s * s + sigma * sigma / (1.0 - eta);
        CHECK(var.variance() == doctest::Approx(want).epsilon(0.10));
    }
}
