// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "sdb/tensor.hpp"

namespace sdb {

struct NamedParam {
    std::string name;
    Shape shape;
    std::shared_ptr<std::vector<double>> values;
};

// Ordered collection of named parameter tensors. Order is the serialization
// order of the checkpoint format.
class ParamStore {
public:
    void add(std::string name, Shape shape, std::vector<double> values);

    size_t size() const { return params_.size(); }
    int64_t total_values() const;
    const NamedParam& at(size_t i) const { return params_[i]; }
    NamedParam& at(size_t i) { return params_[i]; }
    const NamedParam& by_name(const std::string& name) const;
    size_t index_of(const std::string& name) const;
    bool has(const std::string& name) const { return index_.count(name) > 0; }

    auto begin() const { return params_.begin(); }
    auto end() const { return params_.end(); }

    // Deep copy (fresh buffers).
    ParamStore clone() const;

private:
    std::vector<NamedParam> params_;
    std::unordered_map<std::string, size_t> index_;
};

// Flat binary of 64-bit little-endian floats preceded by a one-line JSON
// header listing tensor names and shapes in serialization order.
void save_checkpoint(const ParamStore& params, const std::string& path);
ParamStore load_checkpoint(const std::string& path);

struct AdamConfig {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// First/second moments aligned with a ParamStore by index.
class AdamState {
public:
    explicit AdamState(const ParamStore& params);

    // One Adam update with bias correction. `grads` must carry exactly one
    // entry per parameter name with a matching shape.
    void step(ParamStore& params, const std::unordered_map<std::string, Tensor>& grads,
              const AdamConfig& cfg);

    int64_t steps_taken() const { return t_; }

private:
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    int64_t t_ = 0;
};

}  // namespace sdb
