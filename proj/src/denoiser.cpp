// SPDX-License-Identifier: Apache-2.0
#include "sdb/denoiser.hpp"

#include <cmath>

#include "sdb/errors.hpp"
#include "sdb/rng.hpp"

namespace sdb {

std::vector<double> embed_time(double t, const TimeEmbedding& embedding) {
    if (embedding.dim <= 0 || embedding.dim % 2 != 0)
        throw ConfigError("embed_time: dimension must be even and positive");
    if (t < 0.0 || t > 1.0) throw DomainError("embed_time: t outside [0,1]");
    std::vector<double> out(embedding.dim);
    const int half = embedding.dim / 2;
    for (int k = 0; k < half; ++k) {
        const double w = std::pow(embedding.freq_base, -2.0 * k / embedding.dim);
        out[2 * k] = std::sin(w * t);
        out[2 * k + 1] = std::cos(w * t);
    }
    return out;
}

namespace {

struct ParamLayout {
    std::vector<std::pair<std::string, Shape>> entries;
};

ParamLayout layout(const DenoiserConfig& c) {
    ParamLayout l;
    const int d = c.latent_dim, dm = c.d_model, ff = 4 * c.d_model;
    auto push = [&](std::string name, Shape s) { l.entries.emplace_back(std::move(name), std::move(s)); };
    push("in_z.w", {d, dm});
    push("in_z.b", {1, dm});
    push("in_y.w", {d, dm});
    push("in_y.b", {1, dm});
    push("in_t.w", {c.time_embedding.dim, dm});
    push("in_t.b", {1, dm});
    for (int i = 0; i < c.blocks; ++i) {
        const std::string b = "blk" + std::to_string(i) + ".";
        push(b + "ln1.g", {1, dm});
        push(b + "ln1.b", {1, dm});
        push(b + "attn.wq", {dm, dm});
        push(b + "attn.bq", {1, dm});
        push(b + "attn.wk", {dm, dm});
        push(b + "attn.bk", {1, dm});
        push(b + "attn.wv", {dm, dm});
        push(b + "attn.bv", {1, dm});
        push(b + "attn.wo", {dm, dm});
        push(b + "attn.bo", {1, dm});
        push(b + "ln2.g", {1, dm});
        push(b + "ln2.b", {1, dm});
        push(b + "ffn.w1", {dm, ff});
        push(b + "ffn.b1", {1, ff});
        push(b + "ffn.w2", {ff, dm});
        push(b + "ffn.b2", {1, dm});
    }
    push("out.w", {dm, d});
    push("out.b", {1, d});
    return l;
}

}  // namespace

int64_t Denoiser::parameter_count(const DenoiserConfig& c) {
    const int64_t d = c.latent_dim, dm = c.d_model, emb = c.time_embedding.dim;
    const int64_t per_block = 2 * (2 * dm)                   // norms
                              + 4 * (dm * dm + dm)           // attention projections
                              + (dm * 4 * dm + 4 * dm)       // ffn in
                              + (4 * dm * dm + dm);          // ffn out
    return 2 * (d * dm + dm) + (emb * dm + dm) + c.blocks * per_block + dm * d + d;
}

Denoiser Denoiser::init(const DenoiserConfig& config, uint64_t seed) {
    if (config.d_model % config.n_heads != 0)
        throw ConfigError("denoiser: d_model must be divisible by n_heads");
    if (config.time_embedding.dim % 2 != 0)
        throw ConfigError("denoiser: time embedding dimension must be even");

    Denoiser model;
    model.config = config;
    Rng rng(seed);
    for (const auto& [name, shape] : layout(config).entries) {
        std::vector<double> values(static_cast<size_t>(shape_numel(shape)), 0.0);
        const bool is_matrix = shape[0] > 1;
        const bool is_norm_gain = name.find("ln") != std::string::npos && name.back() == 'g';
        const bool is_output = name.rfind("out.", 0) == 0;
        if (is_output) {
            // zero-initialized: the initial score is exactly zero
        } else if (is_norm_gain) {
            std::fill(values.begin(), values.end(), 1.0);
        } else if (is_matrix) {
            const double limit = std::sqrt(6.0 / (shape[0] + shape[1]));
            for (auto& v : values) v = rng.uniform(-limit, limit);
        }
        model.params.add(name, shape, std::move(values));
    }
    return model;
}

Denoiser Denoiser::load(const std::string& path, const DenoiserConfig& config) {
    Denoiser model;
    model.config = config;
    model.params = load_checkpoint(path);
    for (const auto& [name, shape] : layout(config).entries) {
        if (!model.params.has(name) || model.params.by_name(name).shape != shape)
            throw ConfigError("denoiser: checkpoint does not match configuration at " + name);
    }
    return model;
}

DenoiserBinding Denoiser::bind(Tape* tape) const { return DenoiserBinding(*this, tape); }

DenoiserBinding::DenoiserBinding(const Denoiser& model, Tape* tape) : model_(&model) {
    leaves_.reserve(model.params.size());
    for (const auto& p : model.params) {
        if (tape != nullptr) {
            leaves_.push_back(tape->leaf(p.shape, p.values));
        } else {
            Tensor t;
            t.shape = p.shape;
            t.data = p.values;
            leaves_.push_back(std::move(t));
        }
    }
    const ParamStore& ps = model.params;
    in_z_w_ = ps.index_of("in_z.w");
    in_z_b_ = ps.index_of("in_z.b");
    in_y_w_ = ps.index_of("in_y.w");
    in_y_b_ = ps.index_of("in_y.b");
    in_t_w_ = ps.index_of("in_t.w");
    in_t_b_ = ps.index_of("in_t.b");
    out_w_ = ps.index_of("out.w");
    out_b_ = ps.index_of("out.b");
    for (int i = 0; i < model.config.blocks; ++i) {
        const std::string b = "blk" + std::to_string(i) + ".";
        BlockRefs r;
        r.ln1g = ps.index_of(b + "ln1.g");
        r.ln1b = ps.index_of(b + "ln1.b");
        r.wq = ps.index_of(b + "attn.wq");
        r.bq = ps.index_of(b + "attn.bq");
        r.wk = ps.index_of(b + "attn.wk");
        r.bk = ps.index_of(b + "attn.bk");
        r.wv = ps.index_of(b + "attn.wv");
        r.bv = ps.index_of(b + "attn.bv");
        r.wo = ps.index_of(b + "attn.wo");
        r.bo = ps.index_of(b + "attn.bo");
        r.ln2g = ps.index_of(b + "ln2.g");
        r.ln2b = ps.index_of(b + "ln2.b");
        r.w1 = ps.index_of(b + "ffn.w1");
        r.b1 = ps.index_of(b + "ffn.b1");
        r.w2 = ps.index_of(b + "ffn.w2");
        r.b2 = ps.index_of(b + "ffn.b2");
        blocks_.push_back(r);
    }
}

std::unordered_map<std::string, Tensor> DenoiserBinding::gradients(const GradMap& grads) const {
    std::unordered_map<std::string, Tensor> out;
    for (size_t i = 0; i < leaves_.size(); ++i) {
        out.emplace(model_->params.at(i).name, grads.at(leaves_[i].node));
    }
    return out;
}

Tensor DenoiserBinding::score(const Tensor& z, const Tensor& y, double t) const {
    const DenoiserConfig& c = model_->config;
    const auto& L = leaves_;

    Tensor e = Tensor::row(embed_time(t, c.time_embedding));
    Tensor tok_z = add(matmul(z, L[in_z_w_]), L[in_z_b_]);
    Tensor tok_y = add(matmul(y, L[in_y_w_]), L[in_y_b_]);
    Tensor tok_t = add(matmul(e, L[in_t_w_]), L[in_t_b_]);
    std::vector<Tensor> toks{tok_z, tok_y, tok_t};
    Tensor x = concat_rows(toks);

    const int hd = c.d_model / c.n_heads;
    const double att_scale = 1.0 / std::sqrt(static_cast<double>(hd));

    for (const BlockRefs& r : blocks_) {
        Tensor h = add(mul(layer_norm_rows(x), L[r.ln1g]), L[r.ln1b]);
        Tensor q = add(matmul(h, L[r.wq]), L[r.bq]);
        Tensor k = add(matmul(h, L[r.wk]), L[r.bk]);
        Tensor v = add(matmul(h, L[r.wv]), L[r.bv]);
        Tensor qt = transpose(q);
        Tensor kt = transpose(k);
        Tensor vt = transpose(v);
        std::vector<Tensor> head_out_t;  // (hd, tokens) per head
        for (int hh = 0; hh < c.n_heads; ++hh) {
            Tensor qh = transpose(slice_rows(qt, hh * hd, hd));  // (3, hd)
            Tensor kht = slice_rows(kt, hh * hd, hd);            // (hd, 3) == K_h^T
            Tensor vh = transpose(slice_rows(vt, hh * hd, hd));  // (3, hd)
            Tensor att = softmax_rows(scale(matmul(qh, kht), att_scale));
            head_out_t.push_back(transpose(matmul(att, vh)));
        }
        Tensor att_out = transpose(concat_rows(head_out_t));  // (3, dm)
        x = add(x, add(matmul(att_out, L[r.wo]), L[r.bo]));
        Tensor h2 = add(mul(layer_norm_rows(x), L[r.ln2g]), L[r.ln2b]);
        Tensor f = add(matmul(gelu(add(matmul(h2, L[r.w1]), L[r.b1])), L[r.w2]), L[r.b2]);
        x = add(x, f);
    }

    Tensor z_tok = slice_rows(x, 0, 1);
    return add(matmul(z_tok, L[out_w_]), L[out_b_]);
}

}  // namespace sdb
