#pragma once
// Small dense helpers shared by the estimators: mean/variance accumulators,
// a symmetric-matrix-as-flat-vector type for covariances (d is tiny here),
// and the binomial machinery used by the replication harness.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "rsiu/errors.hpp"

namespace rsiu {

using VecD = std::vector<double>;

// Row-major dense matrix, only used for small d x d covariances and K x d tables.
struct MatD {
    std::size_t rows = 0, cols = 0;
    VecD a;

    MatD() = default;
    MatD(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}
    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
    std::span<double> row(std::size_t i) { return {a.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {a.data() + i * cols, cols}; }

    static MatD diag(std::span<const double> v) {
        MatD m(v.size(), v.size());
        for (std::size_t i = 0; i < v.size(); ++i) m(i, i) = v[i];
        return m;
    }
};

// v' A v for symmetric A.
inline double quadratic_form(std::span<const double> v, const MatD& A) {
    if (A.rows != v.size() || A.cols != v.size())
        throw ShapeError("quadratic_form: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) s += v[i] * A(i, j) * v[j];
    return s;
}

inline double dot(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ShapeError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

inline double mean_of(std::span<const double> x) {
    if (x.empty()) throw ShapeError("mean_of: empty");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

// Welford accumulator for scalar streams.
class RunningStat {
public:
    void add(double x) {
        ++n_;
        double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double stddev() const { return std::sqrt(variance()); }
    // population variance (divide by n), used by the MC variance checks
    double variance_pop() const { return n_ > 0 ? m2_ / static_cast<double>(n_) : 0.0; }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0, m2_ = 0.0;
};

// Welford accumulator for vector streams with full covariance.
class RunningCov {
public:
    explicit RunningCov(std::size_t dim) : dim_(dim), mean_(dim, 0.0), m2_(dim, dim) {}

    void add(std::span<const double> x) {
        if (x.size() != dim_) throw ShapeError("RunningCov::add: dimension mismatch");
        ++n_;
        VecD d(dim_);
        for (std::size_t i = 0; i < dim_; ++i) d[i] = x[i] - mean_[i];
        for (std::size_t i = 0; i < dim_; ++i) mean_[i] += d[i] / static_cast<double>(n_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) m2_(i, j) += d[i] * (x[j] - mean_[j]);
    }
    std::size_t count() const { return n_; }
    const VecD& mean() const { return mean_; }
    MatD covariance() const {
        MatD c = m2_;
        double denom = n_ > 1 ? static_cast<double>(n_ - 1) : 1.0;
        for (double& v : c.a) v /= denom;
        return c;
    }

private:
    std::size_t dim_;
    std::size_t n_ = 0;
    VecD mean_;
    MatD m2_;
};

inline double binomial_se(double p_hat, std::size_t n) {
    return n > 0 ? std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n)) : 0.0;
}

// P[Bin(n, p) <= k], summed on log scale for stability.
inline double binomial_cdf(std::size_t k, std::size_t n, double p) {
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return k >= n ? 1.0 : 0.0;
    double cdf = 0.0;
    for (std::size_t i = 0; i <= k && i <= n; ++i) {
        double lg = std::lgamma(double(n) + 1) - std::lgamma(double(i) + 1) -
                    std::lgamma(double(n - i) + 1) + double(i) * std::log(p) +
                    double(n - i) * std::log1p(-p);
        cdf += std::exp(lg);
    }
    return cdf > 1.0 ? 1.0 : cdf;
}

// One-sided test of H0: p >= p0 against p < p0; true when H0 survives at `level`,
// i.e. the observed count is not significantly below p0.
inline bool binomial_test_geq(std::size_t successes, std::size_t n, double p0, double level) {
    return binomial_cdf(successes, n, p0) > level;
}

} // namespace rsiu
