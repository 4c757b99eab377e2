#pragma once
// Confidence-bound constants and formulas for the sequential-elimination
// procedures. The per-design bound is c_{i,n} = t_{i,n} + r_{i,n}:
//
//   t_{i,n} = 2 sigma_bar_i sqrt( ln( sqrt(6 K kappa_n0 / alpha) n ) / (n - n_eta) )
//   r_{i,n} = nu_bar L_bar_i sqrt( 6 d ln( (6 d K beta_n0 / alpha)^{1/3} (n - n_eta) )
//                                  / (n_eta + 1) )
//
// with the K(K-1)/2-pair union constants replacing the K-design ones in the
// pairwise variant. The heuristic bound widens a Gaussian-tail band around
// the pairwise moving-average difference:
//
//   c~_{ij,n} = 2 sigma~_{ij,inf} sqrt( ln(C n) / n ),
//   C = sqrt( K (K-1) pi^2 / (6 alpha) ),
//
// the unique reading under which the PFS chain
//   sum_pairs sum_n 2 exp(-n c~^2 / (2 sigma~^2)) sums to exactly alpha.

#include <span>
#include <vector>

#include "rsiu/stats.hpp"

namespace rsiu {

// Unique root u > 0 of
//   sum_j exp(-(n0+1) u^2 / (2 d nu_j^2)) / (1 - exp(-u^2 / (2 d nu_j^2))) = alpha/6.
// The LHS is continuous, strictly decreasing with range (0, inf).
double solve_u_star(int n0, double alpha, std::span<const double> nu, int d);

// kappa_n0 = sum_{n > n0} n^-2 = pi^2/6 - sum_{n <= n0} n^-2, to 1e-12.
double tail_kappa(int n0);

// beta_n0 = sum_{n > n0} (n - floor(eta n))^-2, to 1e-10.
double tail_beta(int n0, double eta);

// Constants shared by every bound evaluation of one procedure run.
struct BoundParams {
    double alpha = 0.05;
    double eta = 0.2;
    int n0 = 1;
    int num_designs = 0;  // K
    int dim_theta = 0;    // d

    VecD nu;              // per-coordinate sub-Gaussian parameters (batched scale)
    double nu_bar = 0.0;  // max_j nu_j
    double u_star = 0.0;
    double kappa_n0 = 0.0;
    double beta_n0 = 0.0;

    VecD sigma_bar;  // per design, batched scale
    VecD l_bar;      // per design, ||grad H_i||
    MatD pair_sigma_bar;    // K x K, CRN difference scale
    MatD pair_l_bar;        // K x K, ||grad delta_ij||
    MatD pair_sigma_tilde;  // K x K, limiting std of the moving-average difference

    bool plug_in = false;  // estimates of sigma(theta_c), ||grad H||, not suprema
    bool degenerate_variance = false;  // some sigma was floored at 1e-12
};

// c_{i,n} = t_{i,n} + r_{i,n}; requires n > n0. 1-based i is not used here:
// design_index is 0-based.
double bound_seiu(const BoundParams& p, int design_index, int n);
double bound_seiu_t(const BoundParams& p, int design_index, int n);
double bound_seiu_r(const BoundParams& p, int design_index, int n);

// Pairwise bound with the K(K-1) union factors; symmetric in (i, j).
double bound_pairwise(const BoundParams& p, int i, int j, int n);
double bound_pairwise_t(const BoundParams& p, int i, int j, int n);
double bound_pairwise_r(const BoundParams& p, int i, int j, int n);

// Heuristic Gaussian-tail bound; sigma_tilde is the limiting std of the
// pairwise moving-average difference (batched scale).
double bound_heuristic(double sigma_tilde, int num_designs, double alpha, int n);

// The union-bound constant C in the heuristic bound.
double heuristic_constant(int num_designs, double alpha);

} // namespace rsiu
