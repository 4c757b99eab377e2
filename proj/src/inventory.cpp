#include "rsiu/inventory.hpp"

#include <algorithm>
#include <cmath>

#include "rsiu/errors.hpp"

namespace rsiu {

double inventory_cost(double s, std::span<const double> demand, const InventoryParams& p) {
    if (int(demand.size()) != p.horizon) throw ShapeError("inventory_cost: demand length != horizon");
    double inv = s;       // I_t
    double prod = 0.0;    // R_{t-1}
    double total = 0.0;
    for (int t = 0; t < p.horizon; ++t) {
        const double d = demand[t];
        if (d < 0.0) throw DomainError("inventory_cost: negative demand");
        const double j = inv - d + prod;
        total += p.holding_cost * (prod + std::max(j, 0.0)) + p.backlog_cost * std::max(-j, 0.0);
        prod = std::min(p.max_production, std::max(s - j, 0.0));
        inv = j;
    }
    return total;
}

namespace {

InputBlock make_demand_block(int months) {
    InputBlock b;
    b.dim_theta = 1;
    b.dim_xi = months;  // the block's slice of a simulated demand path
    b.dim_data = 1;     // one raw observation = one month's demand
    b.sample_xi = [months](std::span<const double> th, RngStream& rng, std::span<double> out) {
        for (int t = 0; t < months; ++t) out[t] = rng.exponential(th[0]);
    };
    // joint exponential score: (sum_t D_t - months*theta) / theta^2
    b.score = [months](std::span<const double> xi, std::span<const double> th,
                       std::span<double> out) {
        double s = 0.0;
        for (int t = 0; t < months; ++t) s += xi[t];
        out[0] = (s - months * th[0]) / (th[0] * th[0]);
    };
    b.sigma_theta = [](std::span<const double> th) {
        MatD m(1, 1);
        m(0, 0) = th[0] * th[0];
        return m;
    };
    b.sample_data = [](std::span<const double> th, RngStream& rng, std::span<double> out) {
        out[0] = rng.exponential(th[0]);
    };
    b.g_map = nullptr;  // identity: the data mean estimates theta directly
    b.theta_valid = [](std::span<const double> th) { return th[0] > 0.0; };
    return b;
}

} // namespace

InventoryTestbed::InventoryTestbed(bool quarters, InventoryParams params)
    : quarters_(quarters), params_(params), name_(quarters ? "inv-multi" : "inv-single") {
    if (quarters_) {
        if (params_.horizon % 4 != 0)
            throw DomainError("InventoryTestbed: quarterly case needs horizon divisible by 4");
        theta_c_ = {1.0, 0.8, 0.5, 0.5};
        const int months = params_.horizon / 4;
        for (int q = 0; q < 4; ++q) blocks_.push_back(make_demand_block(months));
    } else {
        theta_c_ = {1.0};
        blocks_.push_back(make_demand_block(params_.horizon));
    }
}

double InventoryTestbed::evaluate(int design_index, std::span<const double> xi) const {
    return -inventory_cost(double(design_index + 1), xi, params_);
}

void InventoryTestbed::accumulate_means(std::span<const int> design_indices,
                                        const double* xi_rows, int r_count,
                                        std::span<double> out_means) const {
    const int m = params_.horizon;
    const double rstar = params_.max_production;
    const double ch = params_.holding_cost, cb = params_.backlog_cost;
    for (std::size_t k = 0; k < design_indices.size(); ++k) {
        const double s = double(design_indices[k] + 1);
        double acc = 0.0;
        for (int r = 0; r < r_count; ++r) {
            const double* d = xi_rows + std::size_t(r) * m;
            double inv = s, prod = 0.0, total = 0.0;
            for (int t = 0; t < m; ++t) {
                const double j = inv - d[t] + prod;
                total += ch * (prod + std::max(j, 0.0)) + cb * std::max(-j, 0.0);
                prod = std::min(rstar, std::max(s - j, 0.0));
                inv = j;
            }
            acc += total;
        }
        out_means[k] = -acc / r_count;
    }
}

std::unique_ptr<Testbed> make_inventory_single() {
    return std::make_unique<InventoryTestbed>(false);
}
std::unique_ptr<Testbed> make_inventory_multi() {
    return std::make_unique<InventoryTestbed>(true);
}

} // namespace rsiu
