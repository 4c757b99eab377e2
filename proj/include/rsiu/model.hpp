#pragma once
// Domain model: block-structured parametric input distributions, designs,
// batched data samples and the simulation entry points. All procedures
// maximize; testbeds that minimize a cost register the negated objective.

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rsiu/errors.hpp"
#include "rsiu/rng.hpp"
#include "rsiu/stats.hpp"

namespace rsiu {

// One independent input distribution P_theta(q).
//
// The simulation side draws xi(q) in R^{dim_xi} and carries the score
// d log f_theta(xi(q)) / d theta(q). The data side describes the raw
// real-world samples (dim_data each) and the moment map G_q whose sample
// mean estimates theta(q).
struct InputBlock {
    int dim_theta = 1;  // d_q
    int dim_xi = 1;     // m_q, the block's slice of a simulation input
    int dim_data = 1;   // dimension of one raw data sample

    // Simulation-side sampling: fills out[0..dim_xi).
    std::function<void(std::span<const double> theta_q, RngStream&, std::span<double> out)>
        sample_xi;
    // Score of the block's xi slice at theta(q): fills out[0..dim_theta).
    std::function<void(std::span<const double> xi_q, std::span<const double> theta_q,
                       std::span<double> out)>
        score;
    // Asymptotic covariance Sigma_theta(q) of the parameter estimator.
    std::function<MatD(std::span<const double> theta_q)> sigma_theta;

    // Data-side sampling from P_theta(q) (used by the testbed/oracle side only).
    std::function<void(std::span<const double> theta_q, RngStream&, std::span<double> out)>
        sample_data;
    // Moment map G_q with E[G_q(zeta)] = theta(q); defaults to identity.
    std::function<void(std::span<const double> data_sample, std::span<double> out)> g_map;

    // Component-wise validity of theta(q).
    std::function<bool(std::span<const double> theta_q)> theta_valid;
};

// A problem instance: K designs sharing one block-structured input model.
// evaluate() must be deterministic given xi; all randomness enters through xi.
class Testbed {
public:
    virtual ~Testbed() = default;

    virtual const std::string& name() const = 0;
    virtual int num_designs() const = 0;
    virtual const std::vector<InputBlock>& blocks() const = 0;

    // True parameter; known only to the oracle/harness side.
    virtual const VecD& theta_true() const = 0;
    // Design (1-based id) that is best under theta_true; adjudicated by the
    // calibration tests.
    virtual int best_design() const = 0;

    virtual double evaluate(int design_index, std::span<const double> xi) const = 0;

    // Mean output of each listed design over the R rows of xi_rows (R x m,
    // row-major). Overridable with a fused loop; the default just calls
    // evaluate().
    virtual void accumulate_means(std::span<const int> design_indices, const double* xi_rows,
                                  int r_count, std::span<double> out_means) const {
        const int m = dim_xi();
        for (std::size_t k = 0; k < design_indices.size(); ++k) {
            double s = 0.0;
            for (int r = 0; r < r_count; ++r)
                s += evaluate(design_indices[k], {xi_rows + std::size_t(r) * m, std::size_t(m)});
            out_means[k] = s / r_count;
        }
    }

    int dim_theta() const {
        int d = 0;
        for (const auto& b : blocks()) d += b.dim_theta;
        return d;
    }
    int dim_xi() const {
        int m = 0;
        for (const auto& b : blocks()) m += b.dim_xi;
        return m;
    }

    bool theta_valid(std::span<const double> theta) const {
        std::size_t off = 0;
        for (const auto& b : blocks()) {
            auto part = theta.subspan(off, b.dim_theta);
            if (b.theta_valid && !b.theta_valid(part)) return false;
            off += b.dim_theta;
        }
        return true;
    }
};

// Draws R full simulation inputs under theta into a flat R x m buffer.
inline void sample_inputs(const Testbed& tb, std::span<const double> theta, int r_count,
                          RngStream& rng, std::vector<double>& out) {
    if (!tb.theta_valid(theta)) throw DomainError("sample_inputs: theta outside parameter space");
    const int m = tb.dim_xi();
    out.resize(std::size_t(r_count) * m);
    for (int r = 0; r < r_count; ++r) {
        std::size_t off = 0;
        std::size_t th_off = 0;
        for (const auto& b : tb.blocks()) {
            b.sample_xi({theta.data() + th_off, std::size_t(b.dim_theta)}, rng,
                        {out.data() + std::size_t(r) * m + off, std::size_t(b.dim_xi)});
            off += b.dim_xi;
            th_off += b.dim_theta;
        }
    }
}

// R independent outputs of one design under P_theta.
inline VecD simulate(const Testbed& tb, int design_index, std::span<const double> theta,
                     int r_count, RngStream& rng) {
    if (r_count < 1) throw DomainError("simulate: replication count must be >= 1");
    std::vector<double> xi;
    sample_inputs(tb, theta, r_count, rng, xi);
    const int m = tb.dim_xi();
    VecD out(r_count);
    for (int r = 0; r < r_count; ++r)
        out[r] = tb.evaluate(design_index, {xi.data() + std::size_t(r) * m, std::size_t(m)});
    return out;
}

// Full score vector (all blocks stacked) of one simulation input at theta.
inline void score_all_blocks(const Testbed& tb, std::span<const double> xi,
                             std::span<const double> theta, std::span<double> out) {
    std::size_t xi_off = 0, th_off = 0;
    for (const auto& b : tb.blocks()) {
        b.score(xi.subspan(xi_off, b.dim_xi), theta.subspan(th_off, b.dim_theta),
                out.subspan(th_off, b.dim_theta));
        xi_off += b.dim_xi;
        th_off += b.dim_theta;
    }
}

// One stage's worth of batched data: D_n(q) = mean of k_q mapped samples.
struct DataBatch {
    VecD d;  // stacked block means, dimension = sum d_q
};

// raw_per_block[q] holds k_q raw samples of block q, each of dim_data doubles,
// flattened; G_q is applied to each and the results averaged.
inline DataBatch batch_data(const std::vector<InputBlock>& blocks,
                            const std::vector<VecD>& raw_per_block,
                            std::span<const int> k_per_block) {
    if (raw_per_block.size() != blocks.size() || k_per_block.size() != blocks.size())
        throw ShapeError("batch_data: block count mismatch");
    DataBatch out;
    for (std::size_t q = 0; q < blocks.size(); ++q) {
        const auto& b = blocks[q];
        const int k = k_per_block[q];
        if (k < 1 || raw_per_block[q].size() != std::size_t(k) * b.dim_data)
            throw ShapeError("batch_data: sample count does not match k_q");
        VecD acc(b.dim_theta, 0.0), g(b.dim_theta);
        for (int j = 0; j < k; ++j) {
            std::span<const double> sample{raw_per_block[q].data() + std::size_t(j) * b.dim_data,
                                           std::size_t(b.dim_data)};
            if (b.g_map) {
                b.g_map(sample, g);
            } else {
                if (b.dim_data != b.dim_theta)
                    throw ShapeError("batch_data: identity G needs dim_data == dim_theta");
                for (int c = 0; c < b.dim_theta; ++c) g[c] = sample[c];
            }
            for (int c = 0; c < b.dim_theta; ++c) acc[c] += g[c];
        }
        for (int c = 0; c < b.dim_theta; ++c) out.d.push_back(acc[c] / k);
    }
    return out;
}

// Stream of batched data samples D_1, D_2, ... for one replication.
class DataSource {
public:
    virtual ~DataSource() = default;
    // Fills D_n (dimension d) for the next stage; false when exhausted.
    virtual bool next(VecD& d_out) = 0;
    // Raw samples consumed so far (all blocks).
    virtual long long raw_samples_consumed() const = 0;
};

// Unlimited testbed-backed stream: each stage draws k_q raw samples per block
// from P_theta_true and emits the batched mean. Streams are addressed by
// (seed, replication, block, stage) so replications are independent and
// reproducible.
class TestbedDataSource final : public DataSource {
public:
    TestbedDataSource(const Testbed& tb, std::vector<int> k_per_block, std::uint64_t seed,
                      std::uint64_t replication, StreamUse use = StreamUse::Data)
        : tb_(tb), k_(std::move(k_per_block)), seed_(seed), rep_(replication), use_(use) {
        if (k_.size() != tb.blocks().size())
            throw ShapeError("TestbedDataSource: one k_q per block required");
    }

    bool next(VecD& d_out) override {
        ++stage_;
        const auto& blocks = tb_.blocks();
        std::vector<VecD> raw(blocks.size());
        std::size_t th_off = 0;
        for (std::size_t q = 0; q < blocks.size(); ++q) {
            const auto& b = blocks[q];
            RngStream rng(StreamKey{seed_, use_, rep_, q, std::uint64_t(stage_)});
            raw[q].resize(std::size_t(k_[q]) * b.dim_data);
            auto theta_q = std::span<const double>(tb_.theta_true()).subspan(th_off, b.dim_theta);
            for (int j = 0; j < k_[q]; ++j)
                b.sample_data(theta_q, rng, {raw[q].data() + std::size_t(j) * b.dim_data,
                                             std::size_t(b.dim_data)});
            consumed_ += k_[q];
            th_off += b.dim_theta;
        }
        d_out = batch_data(blocks, raw, k_).d;
        return true;
    }

    long long raw_samples_consumed() const override { return consumed_; }

private:
    const Testbed& tb_;
    std::vector<int> k_;
    std::uint64_t seed_, rep_;
    StreamUse use_;
    long long stage_ = 0;
    long long consumed_ = 0;
};

// Caps an underlying source after a fixed number of stages (for tests and
// finite-data scenarios).
class FiniteDataSource final : public DataSource {
public:
    FiniteDataSource(std::unique_ptr<DataSource> inner, long long max_stages)
        : inner_(std::move(inner)), left_(max_stages) {}
    bool next(VecD& d_out) override {
        if (left_ <= 0) return false;
        --left_;
        return inner_->next(d_out);
    }
    long long raw_samples_consumed() const override { return inner_->raw_samples_consumed(); }

private:
    std::unique_ptr<DataSource> inner_;
    long long left_;
};

} // namespace rsiu
