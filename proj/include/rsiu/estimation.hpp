#pragma once
// Online estimation: the running parameter estimate from batched data, the
// moving-average performance estimator that discards the oldest floor(eta*n)
// outputs, and the limiting-variance algebra behind it.

#include <cmath>
#include <cstddef>
#include <span>

#include "rsiu/errors.hpp"
#include "rsiu/stats.hpp"

namespace rsiu {

// floor(eta*n) with a guard so decimal eta stored slightly low (0.3, 0.6, ...)
// still hits the intended integer at exact multiples.
inline int discard_count(double eta, int n) {
    return static_cast<int>(std::floor(eta * static_cast<double>(n) + 1e-9));
}

// theta_hat_n = ((n-1)/n) theta_hat_{n-1} + (1/n) D_n, plus the sample
// covariance of the D_j (plug-in for Sigma_G).
class ThetaTracker {
public:
    explicit ThetaTracker(std::size_t dim) : cov_(dim), theta_(dim, 0.0) {}

    void update(std::span<const double> d_n) {
        if (d_n.size() != theta_.size()) throw ShapeError("ThetaTracker: dimension mismatch");
        ++n_;
        const double w = 1.0 / static_cast<double>(n_);
        for (std::size_t i = 0; i < theta_.size(); ++i)
            theta_[i] = (1.0 - w) * theta_[i] + w * d_n[i];
        cov_.add(d_n);
    }

    int stages() const { return n_; }
    const VecD& theta() const { return theta_; }
    MatD sigma_g_hat() const { return cov_.covariance(); }

private:
    int n_ = 0;
    RunningCov cov_;
    VecD theta_;
};

// Append-only per-design output history with prefix sums, so the moving
// average for any eta can be formed without re-simulation.
class OutputWindow {
public:
    explicit OutputWindow(double eta) : eta_(eta) {
        if (!(eta >= 0.0 && eta < 1.0)) throw DomainError("OutputWindow: eta must be in [0,1)");
        prefix_.push_back(0.0);
    }

    void push(double output) { prefix_.push_back(prefix_.back() + output); }

    int size() const { return static_cast<int>(prefix_.size()) - 1; }

    // (1/(n - n_eta)) * sum_{r=n_eta+1..n} h(xi_r)
    double moving_average(int n) const {
        if (n < 1) throw DomainError("moving_average: empty window");
        if (n > size()) throw ShapeError("moving_average: window holds fewer than n outputs");
        const int ne = discard_count(eta_, n);
        return (prefix_[n] - prefix_[ne]) / static_cast<double>(n - ne);
    }

    double moving_average() const { return moving_average(size()); }
    double eta() const { return eta_; }

private:
    double eta_;
    VecD prefix_;
};

// w_eta = 2/(1-eta) + 2 eta log(eta) / (1-eta)^2, continuous with w_0 = 2.
inline double weight_w(double eta) {
    if (!(eta >= 0.0 && eta < 1.0)) throw DomainError("weight_w: eta must be in [0,1)");
    if (eta == 0.0) return 2.0;
    const double om = 1.0 - eta;
    return 2.0 / om + 2.0 * eta * std::log(eta) / (om * om);
}

// Limiting variance of sqrt(n) (H_hat_{i,n} - H_i): IU term weighted by w_eta
// plus the simulation term inflated by 1/(1-eta).
inline double limiting_variance_single(std::span<const double> grad_h, const MatD& sigma_g,
                                       double sigma2, double eta) {
    if (!(eta >= 0.0 && eta < 1.0))
        throw DomainError("limiting_variance_single: eta must be in [0,1)");
    return weight_w(eta) * quadratic_form(grad_h, sigma_g) + sigma2 / (1.0 - eta);
}

// Same with the pairwise gradient and the CRN difference variance.
inline double limiting_variance_pairwise(std::span<const double> grad_delta, const MatD& sigma_g,
                                         double sigma2_ij, double eta) {
    return limiting_variance_single(grad_delta, sigma_g, sigma2_ij, eta);
}

struct EtaStarResult {
    double eta = 0.0;
    double objective = 0.0;
    bool boundary_hit = false;
};

// argmin over eta in [0, 1-1e-6] of w_eta * V_I + V_S / (1-eta), by
// golden-section to 1e-8.
inline EtaStarResult eta_star(double v_iu, double v_su) {
    if (v_iu < 0.0 || v_su < 0.0) throw DomainError("eta_star: variances must be nonnegative");
    if (v_iu == 0.0 && v_su == 0.0) throw UndefinedObjective("eta_star: both variance terms zero");
    const double hi_edge = 1.0 - 1e-6;
    auto f = [&](double e) { return weight_w(e) * v_iu + v_su / (1.0 - e); };

    double a = 0.0, b = hi_edge;
    const double gr = 0.6180339887498948482;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 1e-8) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    EtaStarResult r;
    r.eta = 0.5 * (a + b);
    // snap to the edges when the minimum sits there
    if (f(0.0) <= f(r.eta)) r.eta = 0.0;
    if (f(hi_edge) < f(r.eta)) r.eta = hi_edge;
    r.objective = f(r.eta);
    // the solver domain is [0, 1-1e-6]; only the open upper end is a boundary hit
    r.boundary_hit = r.eta >= hi_edge - 1e-8;
    return r;
}

} // namespace rsiu
