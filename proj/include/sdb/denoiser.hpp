// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "sdb/bridge.hpp"
#include "sdb/optimizer.hpp"
#include "sdb/tensor.hpp"

namespace sdb {

struct TimeEmbedding {
    int dim = 32;
    double freq_base = 1e4;
};

// Interleaved [sin(w_k t), cos(w_k t)] with w_k = base^(-2k/dim).
std::vector<double> embed_time(double t, const TimeEmbedding& embedding);

struct DenoiserConfig {
    int blocks = 2;        // L
    int d_model = 32;
    int n_heads = 4;
    int latent_dim = 2;    // d
    TimeEmbedding time_embedding{32, 1e4};
};

class DenoiserBinding;

// Score network over three tokens (z_t, condition, time embedding): pre-norm
// MHA blocks with a 4x GELU feed-forward, read out at the z_t token. The
// final projection starts at zero so the initial score is identically zero.
class Denoiser {
public:
    DenoiserConfig config;
    ParamStore params;

    static Denoiser init(const DenoiserConfig& config, uint64_t seed);

    // Closed-form parameter count for a configuration.
    static int64_t parameter_count(const DenoiserConfig& config);

    // Bind parameters to a tape (leaves registered once per binding) or to
    // nullptr for pure evaluation.
    DenoiserBinding bind(Tape* tape) const;

    void save(const std::string& path) const { save_checkpoint(params, path); }
    static Denoiser load(const std::string& path, const DenoiserConfig& config);
};

class DenoiserBinding : public ScoreField {
public:
    DenoiserBinding(const Denoiser& model, Tape* tape);

    Tensor score(const Tensor& z, const Tensor& y, double t) const override;

    // Per-parameter gradients extracted from a backward pass over this
    // binding's tape.
    std::unordered_map<std::string, Tensor> gradients(const GradMap& grads) const;

private:
    struct BlockRefs {
        size_t ln1g, ln1b, wq, bq, wk, bk, wv, bv, wo, bo, ln2g, ln2b, w1, b1, w2, b2;
    };

    const Denoiser* model_;
    std::vector<Tensor> leaves_;  // aligned with params order
    size_t in_z_w_, in_z_b_, in_y_w_, in_y_b_, in_t_w_, in_t_b_, out_w_, out_b_;
    std::vector<BlockRefs> blocks_;
};

}  // namespace sdb
