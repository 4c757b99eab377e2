#pragma once
// Multi-stage production-inventory testbed. Designs are order-up-to levels
// s = 1..20; demands are exponential, either i.i.d. (single input source)
// or with quarterly means (four sources). The registered objective is the
// negated total cost so that all procedures maximize.

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rsiu/model.hpp"

namespace rsiu {

struct InventoryParams {
    double max_production = 0.5;  // R*
    double holding_cost = 0.1;    // c_H per unit
    double backlog_cost = 0.2;    // c_B per unit
    int horizon = 12;             // periods (months)
};

// Deterministic cost trace: I_1 = s, R_0 = 0; for t = 1..horizon
//   J_t = I_t - D_t + R_{t-1}          (post-demand inventory)
//   c_t = c_H (R_{t-1} + J_t^+) + c_B J_t^-
//   R_t = min(R*, (s - J_t)^+), I_{t+1} = J_t.
double inventory_cost(double s, std::span<const double> demand, const InventoryParams& p);

// Case (i): 12 i.i.d. exponential demands with scalar mean theta.
// Case (ii): quarterly means theta(1..4), three months each.
class InventoryTestbed final : public Testbed {
public:
    // quarters=false builds `inv-single` (Q=1), true builds `inv-multi` (Q=4).
    explicit InventoryTestbed(bool quarters, InventoryParams params = {});

    const std::string& name() const override { return name_; }
    int num_designs() const override { return 20; }
    const std::vector<InputBlock>& blocks() const override { return blocks_; }
    const VecD& theta_true() const override { return theta_c_; }
    int best_design() const override { return quarters_ ? 3 : 5; }

    double evaluate(int design_index, std::span<const double> xi) const override;
    void accumulate_means(std::span<const int> design_indices, const double* xi_rows, int r_count,
                          std::span<double> out_means) const override;

    const InventoryParams& params() const { return params_; }

private:
    bool quarters_;
    InventoryParams params_;
    std::string name_;
    VecD theta_c_;
    std::vector<InputBlock> blocks_;
};

std::unique_ptr<Testbed> make_inventory_single();
std::unique_ptr<Testbed> make_inventory_multi();

} // namespace rsiu
