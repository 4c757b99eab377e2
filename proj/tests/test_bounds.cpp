#include <doctest.h>

#include <cmath>

#include "rsiu/bounds.hpp"
#include "rsiu/errors.hpp"
#include "rsiu/estimation.hpp"

using namespace rsiu;

namespace {
constexpr double kPi = 3.14159265358979323846;

double lhs_u(double u, int n0, double nu, int d) {
    const double x = u * u / (2.0 * d * nu * nu);
    return d * std::exp(-(n0 + 1) * x) / (1.0 - std::exp(-x));
}

BoundParams demo_params(int k, double alpha, double eta, int n0, int d = 1) {
    BoundParams p;
    p.alpha = alpha;
    p.eta = eta;
    p.n0 = n0;
    p.num_designs = k;
    p.dim_theta = d;
    p.nu.assign(d, 0.03);
    p.nu_bar = 0.03;
    p.kappa_n0 = tail_kappa(n0);
    p.beta_n0 = tail_beta(n0, eta);
    p.u_star = solve_u_star(n0, alpha, p.nu, d);
    p.sigma_bar.assign(k, 0.05);
    p.l_bar.assign(k, 3.0);
    p.pair_sigma_bar = MatD(k, k, 0.04);
    p.pair_l_bar = MatD(k, k, 2.5);
    p.pair_sigma_tilde = MatD(k, k, 0.1);
    return p;
}

} // namespace

TEST_CASE("u* satisfies its defining equation") {
    VecD nu{1.0};
    const double u = solve_u_star(10, 0.6, nu, 1);
    CHECK(std::abs(lhs_u(u, 10, 1.0, 1) - 0.1) < 1e-9);
    CHECK(u > 0.8);
    CHECK(u < 1.0);
    // bracket sanity from a direct evaluation
    CHECK(lhs_u(0.8, 10, 1.0, 1) == doctest::Approx(0.108).epsilon(0.01));
    CHECK(lhs_u(1.0, 10, 1.0, 1) == doctest::Approx(0.0104).epsilon(0.01));
}

TEST_CASE("u* decreases in n0") {
    VecD nu{0.5, 1.5};
    double prev = 1e300;
    for (int n0 : {1, 5, 20, 100}) {
        const double u = solve_u_star(n0, 0.05, nu, 2);
        CHECK(u < prev);
        prev = u;
    }
}

TEST_CASE("u* multi-coordinate residual") {
    VecD nu{0.2, 0.9, 2.0};
    const double u = solve_u_star(3, 0.05, nu, 3);
    double lhs = 0.0;
    for (double v : nu) {
        const double x = u * u / (2.0 * 3 * v * v);
        lhs += std::exp(-4.0 * x) / (1.0 - std::exp(-x));
    }
    CHECK(std::abs(lhs - 0.05 / 6.0) < 1e-9);
}

TEST_CASE("kappa tail") {
    CHECK(std::abs(tail_kappa(1) - (kPi * kPi / 6.0 - 1.0)) < 1e-12);
    for (int n0 : {100, 1000, 10000}) {
        const double v = tail_kappa(n0);
        CHECK(v > 1.0 / (n0 + 1.0));  // integral-test sandwich
        CHECK(v < 1.0 / n0);
    }
    CHECK(tail_kappa(7) > tail_kappa(8));
}

TEST_CASE("beta tail") {
    SUBCASE("degenerate eta matches kappa") {
        CHECK(std::abs(tail_beta(1, 1e-9) - tail_kappa(1)) < 1e-6);
    }
    SUBCASE("termwise domination") {
        for (double eta : {0.1, 0.2, 0.5, 0.8})
            for (int n0 : {1, 10, 50}) CHECK(tail_beta(n0, eta) >= tail_kappa(n0));
    }
    SUBCASE("brute-force partial sum sandwich") {
        const int n0 = 10;
        const double eta = 0.2;
        const long long terms = 10000000;
        double brute = 0.0;
        for (long long n = n0 + terms; n > n0; --n) {
            const long long ne = static_cast<long long>(std::floor(eta * double(n) + 1e-9));
            brute += 1.0 / (double(n - ne) * double(n - ne));
        }
        const double beta = tail_beta(n0, eta);
        const double tail_cap = 1.0 / ((1.0 - eta) * (1.0 - eta) * double(n0 + terms - 1));
        CHECK(beta >= brute);
        CHECK(beta - brute <= tail_cap);
    }
}

TEST_CASE("per-design bound components") {
    BoundParams p = demo_params(20, 0.05, 0.2, 1);

    SUBCASE("zero SU leaves the IU term") {
        p.sigma_bar.assign(20, 0.0);
        CHECK(bound_seiu(p, 0, 10) == doctest::Approx(bound_seiu_r(p, 0, 10)));
    }
    SUBCASE("zero IU leaves the SU term, decaying like sqrt(log n / n)") {
        p.l_bar.assign(20, 0.0);
        CHECK(bound_seiu(p, 0, 10) == doctest::Approx(bound_seiu_t(p, 0, 10)));
        const double c100 = bound_seiu(p, 0, 100);
        const double c10000 = bound_seiu(p, 0, 10000);
        const double expect_ratio = std::sqrt((std::log(std::sqrt(6 * 20 * p.kappa_n0 / 0.05) * 10000.0) / 8000.0) /
                                              (std::log(std::sqrt(6 * 20 * p.kappa_n0 / 0.05) * 100.0) / 80.0));
        CHECK(c10000 / c100 == doctest::Approx(expect_ratio).epsilon(1e-9));
    }
    SUBCASE("t scales linearly in sigma_bar") {
        const double t1 = bound_seiu_t(p, 2, 50);
        p.sigma_bar[2] *= 2.0;
        CHECK(bound_seiu_t(p, 2, 50) == doctest::Approx(2.0 * t1));
    }
    SUBCASE("warm-up violation") { CHECK_THROWS_AS(bound_seiu(p, 0, 1), DomainError); }
}

TEST_CASE("pairwise bound properties") {
    BoundParams p = demo_params(20, 0.05, 0.2, 1);
    SUBCASE("symmetry") {
        for (int n : {2, 5, 100}) CHECK(bound_pairwise(p, 3, 7, n) == bound_pairwise(p, 7, 3, n));
    }
    SUBCASE("vanishes as n grows") {
        CHECK(bound_pairwise(p, 0, 1, 2000000) < 1e-2);
        CHECK(bound_pairwise(p, 0, 1, 100) > bound_pairwise(p, 0, 1, 100000));
    }
    SUBCASE("matched constants vs per-design sum") {
        // sigma_ij = sigma_i + sigma_j, L_ij = L_i + L_j: the pairwise bound
        // exceeds the sum only through the larger union constants in the logs
        const int k = 20;
        BoundParams q = demo_params(k, 0.05, 0.2, 1);
        for (int i = 0; i < k; ++i) q.sigma_bar[i] = 0.03 + 0.001 * i;
        for (int i = 0; i < k; ++i) q.l_bar[i] = 1.0 + 0.1 * i;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                q.pair_sigma_bar(i, j) = q.sigma_bar[i] + q.sigma_bar[j];
                q.pair_l_bar(i, j) = q.l_bar[i] + q.l_bar[j];
            }
        const double bs = std::sqrt(6 * k * q.kappa_n0 / q.alpha);
        const double bp = std::sqrt(3.0 * k * (k - 1) * q.kappa_n0 / q.alpha);
        const double bs3 = std::cbrt(6.0 * k * q.beta_n0 / q.alpha);
        const double bp3 = std::cbrt(3.0 * k * (k - 1) * q.beta_n0 / q.alpha);
        for (int n = 2; n <= 1000; n += 7) {
            const int ne = discard_count(q.eta, n);
            const double sum = bound_seiu(q, 2, n) + bound_seiu(q, 9, n);
            const double pw = bound_pairwise(q, 2, 9, n);
            CHECK(pw >= sum);
            const double log_factor =
                std::max(std::sqrt(std::log(bp * n) / std::log(bs * n)),
                         std::sqrt(std::log(bp3 * (n - ne)) / std::log(bs3 * (n - ne))));
            CHECK(pw <= sum * log_factor * (1 + 1e-12));
        }
    }
}

TEST_CASE("heuristic bound") {
    SUBCASE("defining identity: substituting c~ gives 2/(C^2 n^2)") {
        const int k = 20;
        const double alpha = 0.05, sig = 0.37;
        const double c2 = heuristic_constant(k, alpha);
        for (int n : {1, 2, 17, 400}) {
            const double c = bound_heuristic(sig, k, alpha, n);
            const double tailp = 2.0 * std::exp(-n * c * c / (2.0 * sig * sig));
            CHECK(tailp == doctest::Approx(2.0 / (c2 * c2 * double(n) * double(n))).epsilon(1e-12));
        }
    }
    SUBCASE("PFS series sums to alpha") {
        const int k = 20;
        const double alpha = 0.05;
        const double c2 = heuristic_constant(k, alpha);
        // sum over pairs and stages of 2/(C^2 n^2): partial sum + analytic tail
        double partial = 0.0;
        const long long terms = 1000000;
        for (long long n = terms; n >= 1; --n) partial += 1.0 / (double(n) * double(n));
        const double pairs = k * (k - 1) / 2.0;
        const double lo = pairs * 2.0 / (c2 * c2) * partial;
        const double hi = pairs * 2.0 / (c2 * c2) * (partial + 1.0 / double(terms));
        CHECK(lo <= alpha);
        CHECK(hi >= alpha - 1e-6);
        CHECK(std::abs(pairs * 2.0 / (c2 * c2) * (kPi * kPi / 6.0) - alpha) < 1e-12);
    }
    SUBCASE("linear scaling in sigma~") {
        CHECK(bound_heuristic(2.0, 5, 0.1, 7) ==
              doctest::Approx(2.0 * bound_heuristic(1.0, 5, 0.1, 7)));
    }
    SUBCASE("K=2 direct evaluation") {
        const double c2 = std::sqrt(2.0 * kPi * kPi / (6.0 * 0.05));
        CHECK(c2 == doctest::Approx(8.1116).epsilon(1e-4));
        CHECK(bound_heuristic(1.0, 2, 0.05, 1) ==
              doctest::Approx(2.0 * std::sqrt(std::log(c2))).epsilon(1e-12));
    }
}

TEST_CASE("bounds eventually shrink monotonically to zero") {
    BoundParams p = demo_params(10, 0.05, 0.2, 1);
    double prev = 1e300;
    for (long long n = 50; n <= 100000000; n *= 2) {
        const double c = bound_pairwise(p, 0, 1, int(n)) + bound_seiu(p, 0, int(n)) +
                         bound_heuristic(0.2, 10, 0.05, int(n));
        CHECK(c < prev);
        prev = c;
    }
    CHECK(prev < 1e-3);
}
