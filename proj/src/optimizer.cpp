// SPDX-License-Identifier: Apache-2.0
#include "sdb/optimizer.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace sdb {

void ParamStore::add(std::string name, Shape shape, std::vector<double> values) {
    if (shape_numel(shape) != static_cast<int64_t>(values.size()))
        throw ShapeError("ParamStore::add: size does not match shape for " + name);
    if (index_.count(name) > 0) throw ContractError("ParamStore::add: duplicate name " + name);
    index_[name] = params_.size();
    params_.push_back(NamedParam{std::move(name), std::move(shape),
                                 std::make_shared<std::vector<double>>(std::move(values))});
}

int64_t ParamStore::total_values() const {
    int64_t n = 0;
    for (const auto& p : params_) n += static_cast<int64_t>(p.values->size());
    return n;
}

const NamedParam& ParamStore::by_name(const std::string& name) const {
    return params_[index_of(name)];
}

size_t ParamStore::index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ContractError("ParamStore: unknown parameter " + name);
    return it->second;
}

ParamStore ParamStore::clone() const {
    ParamStore out;
    for (const auto& p : params_) out.add(p.name, p.shape, *p.values);
    return out;
}

void save_checkpoint(const ParamStore& params, const std::string& path) {
    nlohmann::json header;
    header["tensors"] = nlohmann::json::array();
    for (const auto& p : params) {
        header["tensors"].push_back({{"name", p.name}, {"shape", p.shape}});
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ContractError("save_checkpoint: cannot open " + path);
    const std::string htext = header.dump();
    out << htext << '\n';
    for (const auto& p : params) {
        out.write(reinterpret_cast<const char*>(p.values->data()),
                  static_cast<std::streamsize>(p.values->size() * sizeof(double)));
    }
    if (!out) throw ContractError("save_checkpoint: write failed for " + path);
}

ParamStore load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ContractError("load_checkpoint: cannot open " + path);
    std::string htext;
    std::getline(in, htext);
    const nlohmann::json header = nlohmann::json::parse(htext);
    ParamStore out;
    for (const auto& t : header.at("tensors")) {
        const std::string name = t.at("name").get<std::string>();
        const Shape shape = t.at("shape").get<Shape>();
        std::vector<double> values(static_cast<size_t>(shape_numel(shape)));
        in.read(reinterpret_cast<char*>(values.data()),
                static_cast<std::streamsize>(values.size() * sizeof(double)));
        if (!in) throw ContractError("load_checkpoint: truncated tensor " + name);
        out.add(name, shape, std::move(values));
    }
    return out;
}

AdamState::AdamState(const ParamStore& params) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const auto& p : params) {
        m_.emplace_back(p.values->size(), 0.0);
        v_.emplace_back(p.values->size(), 0.0);
    }
}

void AdamState::step(ParamStore& params, const std::unordered_map<std::string, Tensor>& grads,
                     const AdamConfig& cfg) {
    if (grads.size() != params.size())
        throw ContractError("adam: gradient key set does not match parameters");
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
    for (size_t i = 0; i < params.size(); ++i) {
        NamedParam& p = params.at(i);
        auto it = grads.find(p.name);
        if (it == grads.end()) throw ContractError("adam: missing gradient for " + p.name);
        const Tensor& g = it->second;
        if (g.shape != p.shape) throw ContractError("adam: gradient shape mismatch for " + p.name);
        double* w = p.values->data();
        const double* gd = g.data->data();
        double* m = m_[i].data();
        double* v = v_[i].data();
        const size_t n = p.values->size();
        for (size_t j = 0; j < n; ++j) {
            m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * gd[j];
            v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * gd[j] * gd[j];
            const double mhat = m[j] / bc1;
            const double vhat = v[j] / bc2;
            w[j] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
}

}  // namespace sdb
