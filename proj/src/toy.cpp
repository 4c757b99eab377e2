#include "rsiu/toy.hpp"

#include "rsiu/errors.hpp"

namespace rsiu {

LinearGaussianTestbed::LinearGaussianTestbed(std::string name, VecD a, VecD b, double theta_c,
                                             double xi_sd, double noise_sd, double data_sd)
    : name_(std::move(name)), a_(std::move(a)), b_(std::move(b)), theta_c_{theta_c},
      noise_sd_(noise_sd) {
    if (a_.size() != b_.size() || a_.size() < 2)
        throw ShapeError("LinearGaussianTestbed: need K >= 2 matching coefficients");
    best_ = 1;
    for (std::size_t i = 1; i < a_.size(); ++i)
        if (a_[i] + b_[i] * theta_c > a_[best_ - 1] + b_[best_ - 1] * theta_c)
            best_ = static_cast<int>(i) + 1;

    InputBlock blk;
    blk.dim_theta = 1;
    blk.dim_xi = 2;  // (xi, eps)
    blk.dim_data = 1;
    blk.sample_xi = [xi_sd](std::span<const double> th, RngStream& rng, std::span<double> out) {
        out[0] = rng.normal(th[0], xi_sd);
        out[1] = rng.normal();
    };
    blk.score = [xi_sd](std::span<const double> xi, std::span<const double> th,
                        std::span<double> out) {
        out[0] = (xi[0] - th[0]) / (xi_sd * xi_sd);
    };
    blk.sigma_theta = [data_sd](std::span<const double>) {
        MatD m(1, 1);
        m(0, 0) = data_sd * data_sd;
        return m;
    };
    blk.sample_data = [data_sd](std::span<const double> th, RngStream& rng, std::span<double> out) {
        out[0] = rng.normal(th[0], data_sd);
    };
    blk.g_map = nullptr;
    blk.theta_valid = [](std::span<const double>) { return true; };
    blocks_.push_back(std::move(blk));
}

std::unique_ptr<Testbed> make_toy_linear() {
    // three well-separated designs; design 1 best
    return std::make_unique<LinearGaussianTestbed>("toy-linear", VecD{0.0, -0.5, -1.0},
                                                   VecD{1.0, 1.0, 1.0}, 0.0, 1.0, 0.5, 1.0);
}

} // namespace rsiu
