#pragma once
// Small analytic testbeds for tests and calibration checks.

#include <memory>
#include <string>
#include <vector>

#include "rsiu/model.hpp"

namespace rsiu {

// K designs with h_i(xi) = a_i + b_i * xi + noise_sd * eps, xi ~ N(theta, xi_sd^2),
// one input block whose raw data are N(theta_c, data_sd^2). Then
// H_i(theta) = a_i + b_i theta, sigma_i^2 = b_i^2 xi_sd^2 + noise_sd^2 and the
// score of xi at theta is (xi - theta) / xi_sd^2. With b_i all equal this is a
// shift family (grad delta = 0).
//
// The extra Gaussian noise is folded into xi: the block draws (xi, eps) as a
// 2-vector so CRN shares both coordinates across designs.
class LinearGaussianTestbed final : public Testbed {
public:
    LinearGaussianTestbed(std::string name, VecD a, VecD b, double theta_c, double xi_sd,
                          double noise_sd, double data_sd);

    const std::string& name() const override { return name_; }
    int num_designs() const override { return static_cast<int>(a_.size()); }
    const std::vector<InputBlock>& blocks() const override { return blocks_; }
    const VecD& theta_true() const override { return theta_c_; }
    int best_design() const override { return best_; }

    double evaluate(int design_index, std::span<const double> xi) const override {
        return a_[design_index] + b_[design_index] * xi[0] + noise_sd_ * xi[1];
    }

private:
    std::string name_;
    VecD a_, b_;
    VecD theta_c_;
    double noise_sd_;
    int best_;
    std::vector<InputBlock> blocks_;
};

std::unique_ptr<Testbed> make_toy_linear();

} // namespace rsiu
