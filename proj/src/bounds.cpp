#include "rsiu/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "rsiu/errors.hpp"
#include "rsiu/estimation.hpp"

namespace rsiu {

namespace {
constexpr double kPi = 3.14159265358979323846;

double lhs_eq_u(double u, int n0, std::span<const double> nu, int d) {
    double s = 0.0;
    for (double v : nu) {
        const double x = u * u / (2.0 * d * v * v);
        // denominator 1 - exp(-x) via expm1 for small x
        const double denom = -std::expm1(-x);
        s += std::exp(-(n0 + 1) * x) / denom;
    }
    return s;
}
} // namespace

double solve_u_star(int n0, double alpha, std::span<const double> nu, int d) {
    if (n0 < 1) throw DomainError("solve_u_star: n0 must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("solve_u_star: alpha must be in (0,1)");
    if (nu.empty() || int(nu.size()) != d) throw ShapeError("solve_u_star: need d nu values");
    for (double v : nu)
        if (!(v > 0.0)) throw DomainError("solve_u_star: nu_j must be positive");

    const double target = alpha / 6.0;
    // bracket the root: LHS decreases from +inf to 0
    double lo = 1e-8, hi = 1.0;
    int guard = 0;
    while (lhs_eq_u(hi, n0, nu, d) > target) {
        hi *= 2.0;
        if (++guard > 200) throw NumericalError("solve_u_star: failed to bracket above");
    }
    guard = 0;
    while (lhs_eq_u(lo, n0, nu, d) < target) {
        lo *= 0.5;
        if (++guard > 200) throw NumericalError("solve_u_star: failed to bracket below");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (lhs_eq_u(mid, n0, nu, d) > target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15 * hi) break;
    }
    const double u = 0.5 * (lo + hi);
    if (std::abs(lhs_eq_u(u, n0, nu, d) - target) > 1e-10)
        throw NumericalError("solve_u_star: residual above 1e-10");
    return u;
}

double tail_kappa(int n0) {
    if (n0 < 1) throw DomainError("tail_kappa: n0 must be >= 1");
    double partial = 0.0;
    // summing ascending keeps the error below 1e-15 for any practical n0
    for (int n = n0; n >= 1; --n) partial += 1.0 / (double(n) * double(n));
    return kPi * kPi / 6.0 - partial;
}

// Exact resummation over the retained count k = n - floor(eta n). Each k >= 1
// is hit by the consecutive n in (upper(k-1), upper(k)] with
// upper(k) = floor(k/(1-eta)); the head is summed exactly (with the n > n0
// boundary) and the tail handled by Abel summation, bracketing the unknown
// fractional parts within (K+1)^-2.
double tail_beta(int n0, double eta) {
    if (n0 < 1) throw DomainError("tail_beta: n0 must be >= 1");
    if (!(eta >= 0.0 && eta < 1.0)) throw DomainError("tail_beta: eta must be in [0,1)");
    const double om = 1.0 - eta;

    auto retained = [&](long long n) -> long long {
        return n - static_cast<long long>(std::floor(eta * double(n) + 1e-9));
    };
    auto upper_n = [&](long long k) -> long long {
        if (k <= 0) return 0;
        long long v = static_cast<long long>(std::floor(double(k) / om));
        while (retained(v + 1) <= k) ++v;
        while (v >= 1 && retained(v) > k) --v;
        return v;
    };

    // midpoint error < 0.5 * (kcap+1)^-2 ~ 1.2e-11; grow kcap so the n0
    // boundary always falls inside the exactly-summed head
    long long kcap = 200000;
    kcap = std::max(kcap, retained(n0) + 1);

    double head = 0.0;
    long long prev_hi = upper_n(0);
    for (long long k = 1; k <= kcap; ++k) {
        const long long hi = upper_n(k);
        const long long lo = std::max<long long>(prev_hi, n0);
        if (hi > lo) head += double(hi - lo) / (double(k) * double(k));
        prev_hi = hi;
    }
    // tail: -C_K (K+1)^-2 + (1/om) (1/(K+1) + sum_{m>=K+2} m^-2) - E with
    // C_k = k/om - f_k, f_k in [0,1), E = sum_{k>K} f_k (k^-2-(k+1)^-2) in [0,(K+1)^-2)
    const double zeta_tail = tail_kappa(static_cast<int>(std::min<long long>(kcap + 1, 1 << 29)));
    const double main = (1.0 / om) * (1.0 / double(kcap + 1) + zeta_tail);
    const double frac_band = 1.0 / (double(kcap + 1) * double(kcap + 1));
    return head + main - double(prev_hi) * frac_band - 0.5 * frac_band;
}

namespace {
inline double log_floor0(double x) { return x > 1.0 ? std::log(x) : 0.0; }
} // namespace

double bound_seiu_t(const BoundParams& p, int design_index, int n) {
    if (n <= p.n0) throw DomainError("bound_seiu: n must exceed the warm-up n0");
    const int ne = discard_count(p.eta, n);
    const double arg = std::sqrt(6.0 * p.num_designs * p.kappa_n0 / p.alpha) * n;
    return 2.0 * p.sigma_bar[design_index] * std::sqrt(log_floor0(arg) / double(n - ne));
}

double bound_seiu_r(const BoundParams& p, int design_index, int n) {
    if (n <= p.n0) throw DomainError("bound_seiu: n must exceed the warm-up n0");
    const int ne = discard_count(p.eta, n);
    const double d = p.dim_theta;
    const double arg =
        std::cbrt(6.0 * d * p.num_designs * p.beta_n0 / p.alpha) * double(n - ne);
    return p.nu_bar * p.l_bar[design_index] *
           std::sqrt(6.0 * d * log_floor0(arg) / double(ne + 1));
}

double bound_seiu(const BoundParams& p, int design_index, int n) {
    return bound_seiu_t(p, design_index, n) + bound_seiu_r(p, design_index, n);
}

double bound_pairwise_t(const BoundParams& p, int i, int j, int n) {
    if (n <= p.n0) throw DomainError("bound_pairwise: n must exceed the warm-up n0");
    const int ne = discard_count(p.eta, n);
    const double kk = double(p.num_designs) * double(p.num_designs - 1);
    const double arg = std::sqrt(3.0 * kk * p.kappa_n0 / p.alpha) * n;
    return 2.0 * p.pair_sigma_bar(i, j) * std::sqrt(log_floor0(arg) / double(n - ne));
}

double bound_pairwise_r(const BoundParams& p, int i, int j, int n) {
    if (n <= p.n0) throw DomainError("bound_pairwise: n must exceed the warm-up n0");
    const int ne = discard_count(p.eta, n);
    const double d = p.dim_theta;
    const double kk = double(p.num_designs) * double(p.num_designs - 1);
    const double arg = std::cbrt(3.0 * d * kk * p.beta_n0 / p.alpha) * double(n - ne);
    return p.nu_bar * p.pair_l_bar(i, j) *
           std::sqrt(6.0 * d * log_floor0(arg) / double(ne + 1));
}

double bound_pairwise(const BoundParams& p, int i, int j, int n) {
    return bound_pairwise_t(p, i, j, n) + bound_pairwise_r(p, i, j, n);
}

double heuristic_constant(int num_designs, double alpha) {
    const double kk = double(num_designs) * double(num_designs - 1);
    return std::sqrt(kk * kPi * kPi / (6.0 * alpha));
}

double bound_heuristic(double sigma_tilde, int num_designs, double alpha, int n) {
    if (n < 1) throw DomainError("bound_heuristic: n must be >= 1");
    const double c = heuristic_constant(num_designs, alpha);
    return 2.0 * sigma_tilde * std::sqrt(log_floor0(c * n) / double(n));
}

} // namespace rsiu
