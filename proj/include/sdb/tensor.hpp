// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sdb/errors.hpp"

namespace sdb {

class Tape;

using Shape = std::vector<int>;

inline int64_t shape_numel(const Shape& s) {
    int64_t n = 1;
    for (int d : s) n *= d;
    return n;
}

// Dense row-major tensor of doubles. Buffers are shared and treated as
// immutable once an op has produced them; ops always allocate fresh output
// storage. A tensor is either a constant (node < 0) or a handle into the
// tape that recorded it.
struct Tensor {
    Shape shape;
    std::shared_ptr<std::vector<double>> data;
    Tape* tape = nullptr;
    int node = -1;
    uint64_t gen = 0;

    Tensor() = default;

    int64_t numel() const { return data ? static_cast<int64_t>(data->size()) : 0; }
    int rows() const { return shape.empty() ? 1 : shape[0]; }
    int cols() const { return shape.size() < 2 ? 1 : shape[1]; }
    bool is_scalar() const { return numel() == 1; }

    double value() const { return (*data)[0]; }
    double at(int i) const { return (*data)[i]; }
    double at(int r, int c) const { return (*data)[static_cast<size_t>(r) * cols() + c]; }

    static Tensor zeros(Shape s);
    static Tensor full(Shape s, double v);
    static Tensor from_vector(Shape s, std::vector<double> v);
    static Tensor scalar(double v) { return full({1}, v); }
    static Tensor row(const std::vector<double>& v) {
        return from_vector({1, static_cast<int>(v.size())}, v);
    }
};

// Gradients keyed by tape node id. Leaves untouched by backward are present
// with all-zero gradients.
using GradMap = std::unordered_map<int, Tensor>;

// Reverse-mode tape. Operations append records in forward order; backward
// replays them in reverse, which is a valid topological order because every
// parent id is smaller than its consumer's id. The tape and its tensors are
// confined to one thread; clear() invalidates every node id issued so far.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // fn(tape, out_grad) accumulates into parent gradient buffers.
    using BackwardFn = std::function<void(Tape&, const double*)>;

    // Register a parameter leaf. The tensor shares `storage`.
    Tensor leaf(Shape shape, std::shared_ptr<std::vector<double>> storage);

    // Record an interior node; returns its id.
    int record(std::vector<int> parents, const Shape& shape, BackwardFn fn);

    // Reverse sweep from a scalar loss. Every record is visited (zero
    // upstream gradients are propagated as real arithmetic, so backward
    // cost is proportional to everything recorded, not just the subgraph
    // reachable from the loss).
    GradMap backward(const Tensor& loss);

    // Drop all records and bump the generation, invalidating issued ids.
    void clear();

    uint64_t generation() const { return gen_; }
    size_t size() const { return records_.size(); }

    // Gradient buffer of a node during backward.
    double* grad(int node) { return arena_.data() + offsets_[node]; }

private:
    struct Record {
        std::vector<int> parents;
        int64_t numel = 0;
        bool is_leaf = false;
        Shape shape;
        BackwardFn fn;
    };

    std::vector<Record> records_;
    std::vector<double> arena_;    // flat gradient storage, reused across sweeps
    std::vector<size_t> offsets_;  // node id -> offset into arena_
    uint64_t gen_ = 1;
};

// ---------------------------------------------------------------------------
// Forward ops. Each op validates shapes (ShapeError naming the op), checks
// the output for non-finite values (NumericError), and records itself when
// any operand lives on a tape.
//
// add/sub/mul accept equal shapes or a (n,d) op (1,d) row broadcast.
// ---------------------------------------------------------------------------
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor mul(const Tensor& a, const Tensor& b);          // elementwise
Tensor matmul(const Tensor& a, const Tensor& b);       // (m,k)x(k,n)
Tensor softmax_rows(const Tensor& a);
Tensor layer_norm_rows(const Tensor& a);               // per-row, eps 1e-5, no affine
Tensor gelu(const Tensor& a);                          // exact erf form
Tensor sum(const Tensor& a);                           // -> [1]
Tensor mean_squared_error(const Tensor& a, const Tensor& b);  // mean over elements -> [1]
Tensor concat_rows(std::span<const Tensor> parts);
Tensor slice_rows(const Tensor& a, int begin, int count);
Tensor transpose(const Tensor& a);

// Generic dispatcher over the closed op set.
enum class OpKind {
    Add,
    Sub,
    Scale,
    ElementwiseMul,
    Matmul,
    SoftmaxRows,
    LayerNorm,
    Gelu,
    Sum,
    MeanSquaredError,
    ConcatRows,
    SliceRows,
    Transpose,
};

struct OpArgs {
    double factor = 1.0;  // Scale
    int begin = 0;        // SliceRows
    int count = 0;        // SliceRows
};

Tensor apply(OpKind kind, std::span<const Tensor> operands, const OpArgs& args = {});

}  // namespace sdb
