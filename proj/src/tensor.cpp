// SPDX-License-Identifier: Apache-2.0
#include "sdb/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace sdb {

namespace {

constexpr double kLayerNormEps = 1e-5;

std::shared_ptr<std::vector<double>> alloc(int64_t n) {
    return std::make_shared<std::vector<double>>(static_cast<size_t>(n));
}

void check_finite(const std::vector<double>& v, const char* op) {
    for (double x : v) {
        if (!std::isfinite(x)) throw NumericError(std::string(op) + ": non-finite output");
    }
}

// Resolve the recording tape for an op, validating node liveness.
Tape* resolve_tape(std::initializer_list<const Tensor*> ins, const char* op) {
    Tape* tape = nullptr;
    for (const Tensor* t : ins) {
        if (t->node < 0) continue;
        if (t->tape == nullptr) throw ContractError(std::string(op) + ": node without tape");
        if (t->gen != t->tape->generation())
            throw ContractError(std::string(op) + ": node id from a cleared tape");
        if (tape != nullptr && tape != t->tape)
            throw ContractError(std::string(op) + ": operands from different tapes");
        tape = t->tape;
    }
    return tape;
}

Tensor make_output(Shape shape, std::shared_ptr<std::vector<double>> data, Tape* tape,
                   std::vector<int> parents, Tape::BackwardFn fn) {
    Tensor out;
    out.shape = std::move(shape);
    out.data = std::move(data);
    if (tape != nullptr) {
        out.tape = tape;
        out.node = tape->record(std::move(parents), out.shape, std::move(fn));
        out.gen = tape->generation();
    }
    return out;
}

void axpy(double* dst, const double* src, double a, int64_t n) {
    for (int64_t i = 0; i < n; ++i) dst[i] += a * src[i];
}

}  // namespace

Tensor Tensor::zeros(Shape s) {
    Tensor t;
    t.data = alloc(shape_numel(s));
    t.shape = std::move(s);
    return t;
}

Tensor Tensor::full(Shape s, double v) {
    Tensor t = zeros(std::move(s));
    std::fill(t.data->begin(), t.data->end(), v);
    return t;
}

Tensor Tensor::from_vector(Shape s, std::vector<double> v) {
    if (shape_numel(s) != static_cast<int64_t>(v.size()))
        throw ShapeError("from_vector: size does not match shape");
    Tensor t;
    t.shape = std::move(s);
    t.data = std::make_shared<std::vector<double>>(std::move(v));
    return t;
}

// ---------------------------------------------------------------------------
// Tape
// ---------------------------------------------------------------------------

Tensor Tape::leaf(Shape shape, std::shared_ptr<std::vector<double>> storage) {
    if (shape_numel(shape) != static_cast<int64_t>(storage->size()))
        throw ShapeError("leaf: storage does not match shape");
    Record rec;
    rec.numel = static_cast<int64_t>(storage->size());
    rec.is_leaf = true;
    rec.shape = shape;
    records_.push_back(std::move(rec));

    Tensor t;
    t.shape = std::move(shape);
    t.data = std::move(storage);
    t.tape = this;
    t.node = static_cast<int>(records_.size()) - 1;
    t.gen = gen_;
    return t;
}

int Tape::record(std::vector<int> parents, const Shape& shape, BackwardFn fn) {
    Record rec;
    rec.parents = std::move(parents);
    rec.numel = shape_numel(shape);
    rec.shape = shape;
    rec.fn = std::move(fn);
    records_.push_back(std::move(rec));
    return static_cast<int>(records_.size()) - 1;
}

GradMap Tape::backward(const Tensor& loss) {
    if (!loss.is_scalar()) throw ContractError("backward: loss must be scalar");
    if (loss.tape != this || loss.node < 0 || loss.gen != gen_)
        throw ContractError("backward: loss is not on the active tape");

    // Lay out one flat gradient arena covering every record.
    offsets_.resize(records_.size());
    size_t total = 0;
    for (size_t i = 0; i < records_.size(); ++i) {
        offsets_[i] = total;
        total += static_cast<size_t>(records_[i].numel);
    }
    arena_.assign(total, 0.0);
    arena_[offsets_[static_cast<size_t>(loss.node)]] = 1.0;

    // Reverse replay. Records are visited unconditionally; a candidate
    // branch that did not win carries zero gradients through the same
    // arithmetic as the winner.
    for (size_t i = records_.size(); i-- > 0;) {
        const Record& rec = records_[i];
        if (rec.fn) rec.fn(*this, arena_.data() + offsets_[i]);
    }

    GradMap out;
    for (size_t i = 0; i < records_.size(); ++i) {
        if (!records_[i].is_leaf) continue;
        Tensor g = Tensor::zeros(records_[i].shape);
        std::memcpy(g.data->data(), arena_.data() + offsets_[i],
                    sizeof(double) * static_cast<size_t>(records_[i].numel));
        out.emplace(static_cast<int>(i), std::move(g));
    }
    return out;
}

void Tape::clear() {
    records_.clear();
    ++gen_;
}

// ---------------------------------------------------------------------------
// Elementwise / broadcast ops
// ---------------------------------------------------------------------------

namespace {

enum class Bcast { None, RowB, RowA };

Bcast broadcast_kind(const Tensor& a, const Tensor& b, const char* op, bool allow_row_a) {
    if (a.shape == b.shape) return Bcast::None;
    if (a.shape.size() == 2 && b.shape.size() == 2 && a.shape[1] == b.shape[1]) {
        if (b.shape[0] == 1) return Bcast::RowB;
        if (allow_row_a && a.shape[0] == 1) return Bcast::RowA;
    }
    throw ShapeError(std::string(op) + ": shape mismatch");
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    const Bcast bc = broadcast_kind(a, b, "add", true);
    const Tensor& big = (bc == Bcast::RowA) ? b : a;
    const Tensor& row = (bc == Bcast::RowA) ? a : b;
    auto out = alloc(big.numel());
    const int n = big.rows(), d = big.cols();
    for (int i = 0; i < n; ++i) {
        const double* pa = big.data->data() + static_cast<size_t>(i) * d;
        const double* pb = (bc == Bcast::None) ? row.data->data() + static_cast<size_t>(i) * d
                                               : row.data->data();
        double* po = out->data() + static_cast<size_t>(i) * d;
        for (int j = 0; j < d; ++j) po[j] = pa[j] + pb[j];
    }
    check_finite(*out, "add");
    Tape* tape = resolve_tape({&a, &b}, "add");
    const int pa_node = a.node, pb_node = b.node;
    const int64_t an = a.numel(), bn = b.numel();
    return make_output(big.shape, out, tape, {a.node, b.node},
                       [pa_node, pb_node, an, bn, n, d](Tape& t, const double* g) {
                           if (pa_node >= 0) {
                               double* ga = t.grad(pa_node);
                               if (an == static_cast<int64_t>(n) * d) {
                                   axpy(ga, g, 1.0, an);
                               } else {
                                   for (int i = 0; i < n; ++i)
                                       axpy(ga, g + static_cast<size_t>(i) * d, 1.0, d);
                               }
                           }
                           if (pb_node >= 0) {
                               double* gb = t.grad(pb_node);
                               if (bn == static_cast<int64_t>(n) * d) {
                                   axpy(gb, g, 1.0, bn);
                               } else {
                                   for (int i = 0; i < n; ++i)
                                       axpy(gb, g + static_cast<size_t>(i) * d, 1.0, d);
                               }
                           }
                       });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    const Bcast bc = broadcast_kind(a, b, "sub", false);
    auto out = alloc(a.numel());
    const int n = a.rows(), d = a.cols();
    for (int i = 0; i < n; ++i) {
        const double* pa = a.data->data() + static_cast<size_t>(i) * d;
        const double* pb = (bc == Bcast::None) ? b.data->data() + static_cast<size_t>(i) * d
                                               : b.data->data();
        double* po = out->data() + static_cast<size_t>(i) * d;
        for (int j = 0; j < d; ++j) po[j] = pa[j] - pb[j];
    }
    check_finite(*out, "sub");
    Tape* tape = resolve_tape({&a, &b}, "sub");
    const int pa_node = a.node, pb_node = b.node;
    const int64_t bn = b.numel();
    return make_output(a.shape, out, tape, {a.node, b.node},
                       [pa_node, pb_node, bn, n, d](Tape& t, const double* g) {
                           if (pa_node >= 0) axpy(t.grad(pa_node), g, 1.0, static_cast<int64_t>(n) * d);
                           if (pb_node >= 0) {
                               double* gb = t.grad(pb_node);
                               if (bn == static_cast<int64_t>(n) * d) {
                                   axpy(gb, g, -1.0, bn);
                               } else {
                                   for (int i = 0; i < n; ++i)
                                       axpy(gb, g + static_cast<size_t>(i) * d, -1.0, d);
                               }
                           }
                       });
}

Tensor scale(const Tensor& a, double factor) {
    auto out = alloc(a.numel());
    const double* pa = a.data->data();
    for (int64_t i = 0; i < a.numel(); ++i) (*out)[i] = factor * pa[i];
    check_finite(*out, "scale");
    Tape* tape = resolve_tape({&a}, "scale");
    const int pa_node = a.node;
    const int64_t n = a.numel();
    return make_output(a.shape, out, tape, {a.node},
                       [pa_node, factor, n](Tape& t, const double* g) {
                           if (pa_node >= 0) axpy(t.grad(pa_node), g, factor, n);
                       });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    const Bcast bc = broadcast_kind(a, b, "elementwise-mul", true);
    const Tensor& big = (bc == Bcast::RowA) ? b : a;
    const Tensor& row = (bc == Bcast::RowA) ? a : b;
    auto out = alloc(big.numel());
    const int n = big.rows(), d = big.cols();
    for (int i = 0; i < n; ++i) {
        const double* pa = big.data->data() + static_cast<size_t>(i) * d;
        const double* pb = (bc == Bcast::None) ? row.data->data() + static_cast<size_t>(i) * d
                                               : row.data->data();
        double* po = out->data() + static_cast<size_t>(i) * d;
        for (int j = 0; j < d; ++j) po[j] = pa[j] * pb[j];
    }
    check_finite(*out, "elementwise-mul");
    Tape* tape = resolve_tape({&a, &b}, "elementwise-mul");
    const int na = a.node, nb = b.node;
    const int64_t an = a.numel(), bn = b.numel();
    auto da = a.data, db = b.data;
    return make_output(big.shape, out, tape, {a.node, b.node},
                       [na, nb, an, bn, n, d, da, db](Tape& t, const double* g) {
                           const int64_t big_n = static_cast<int64_t>(n) * d;
                           if (na >= 0) {
                               double* ga = t.grad(na);
                               const double* pb = db->data();
                               if (an == big_n && bn == big_n) {
                                   for (int64_t i = 0; i < big_n; ++i) ga[i] += g[i] * pb[i];
                               } else if (an == big_n) {  // b is the row
                                   for (int i = 0; i < n; ++i)
                                       for (int j = 0; j < d; ++j)
                                           ga[static_cast<size_t>(i) * d + j] +=
                                               g[static_cast<size_t>(i) * d + j] * pb[j];
                               } else {  // a is the row
                                   const double* pbig = db->data();
                                   for (int i = 0; i < n; ++i)
                                       for (int j = 0; j < d; ++j)
                                           ga[j] += g[static_cast<size_t>(i) * d + j] *
                                                    pbig[static_cast<size_t>(i) * d + j];
                               }
                           }
                           if (nb >= 0) {
                               double* gb = t.grad(nb);
                               const double* pa = da->data();
                               if (bn == big_n && an == big_n) {
                                   for (int64_t i = 0; i < big_n; ++i) gb[i] += g[i] * pa[i];
                               } else if (bn == big_n) {  // a is the row
                                   for (int i = 0; i < n; ++i)
                                       for (int j = 0; j < d; ++j)
                                           gb[static_cast<size_t>(i) * d + j] +=
                                               g[static_cast<size_t>(i) * d + j] * pa[j];
                               } else {  // b is the row
                                   for (int i = 0; i < n; ++i)
                                       for (int j = 0; j < d; ++j)
                                           gb[j] += g[static_cast<size_t>(i) * d + j] *
                                                    pa[static_cast<size_t>(i) * d + j];
                               }
                           }
                       });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.shape.size() != 2 || b.shape.size() != 2 || a.shape[1] != b.shape[0])
        throw ShapeError("matmul: shape mismatch");
    const int m = a.shape[0], k = a.shape[1], n = b.shape[1];
    auto out = alloc(static_cast<int64_t>(m) * n);
    const double* pa = a.data->data();
    const double* pb = b.data->data();
    double* po = out->data();
    for (int i = 0; i < m; ++i) {
        double* orow = po + static_cast<size_t>(i) * n;
        for (int kk = 0; kk < k; ++kk) {
            const double aik = pa[static_cast<size_t>(i) * k + kk];
            const double* brow = pb + static_cast<size_t>(kk) * n;
            for (int j = 0; j < n; ++j) orow[j] += aik * brow[j];
        }
    }
    check_finite(*out, "matmul");
    Tape* tape = resolve_tape({&a, &b}, "matmul");
    const int na = a.node, nb = b.node;
    auto da = a.data, db = b.data;
    return make_output({m, n}, out, tape, {a.node, b.node},
                       [na, nb, m, k, n, da, db](Tape& t, const double* g) {
                           if (na >= 0) {  // dA = g * B^T
                               double* ga = t.grad(na);
                               const double* pb = db->data();
                               for (int i = 0; i < m; ++i) {
                                   const double* grow = g + static_cast<size_t>(i) * n;
                                   double* garow = ga + static_cast<size_t>(i) * k;
                                   for (int kk = 0; kk < k; ++kk) {
                                       const double* brow = pb + static_cast<size_t>(kk) * n;
                                       double acc = 0.0;
                                       for (int j = 0; j < n; ++j) acc += grow[j] * brow[j];
                                       garow[kk] += acc;
                                   }
                               }
                           }
                           if (nb >= 0) {  // dB = A^T * g
                               double* gb = t.grad(nb);
                               const double* pa = da->data();
                               for (int i = 0; i < m; ++i) {
                                   const double* grow = g + static_cast<size_t>(i) * n;
                                   const double* arow = pa + static_cast<size_t>(i) * k;
                                   for (int kk = 0; kk < k; ++kk) {
                                       axpy(gb + static_cast<size_t>(kk) * n, grow, arow[kk], n);
                                   }
                               }
                           }
                       });
}

Tensor softmax_rows(const Tensor& a) {
    if (a.shape.size() != 2) throw ShapeError("softmax-rows: expects a matrix");
    const int n = a.shape[0], d = a.shape[1];
    auto out = alloc(a.numel());
    for (int i = 0; i < n; ++i) {
        const double* pa = a.data->data() + static_cast<size_t>(i) * d;
        double* po = out->data() + static_cast<size_t>(i) * d;
        double mx = pa[0];
        for (int j = 1; j < d; ++j) mx = std::max(mx, pa[j]);
        double z = 0.0;
        for (int j = 0; j < d; ++j) {
            po[j] = std::exp(pa[j] - mx);
            z += po[j];
        }
        for (int j = 0; j < d; ++j) po[j] /= z;
    }
    check_finite(*out, "softmax-rows");
    Tape* tape = resolve_tape({&a}, "softmax-rows");
    const int na = a.node;
    auto saved = out;
    return make_output(a.shape, out, tape, {a.node},
                       [na, n, d, saved](Tape& t, const double* g) {
                           if (na < 0) return;
                           double* ga = t.grad(na);
                           const double* y = saved->data();
                           for (int i = 0; i < n; ++i) {
                               const double* yr = y + static_cast<size_t>(i) * d;
                               const double* gr = g + static_cast<size_t>(i) * d;
                               double dot = 0.0;
                               for (int j = 0; j < d; ++j) dot += gr[j] * yr[j];
                               double* gar = ga + static_cast<size_t>(i) * d;
                               for (int j = 0; j < d; ++j) gar[j] += yr[j] * (gr[j] - dot);
                           }
                       });
}

Tensor layer_norm_rows(const Tensor& a) {
    if (a.shape.size() != 2) throw ShapeError("layer-norm: expects a matrix");
    const int n = a.shape[0], d = a.shape[1];
    auto out = alloc(a.numel());
    auto inv_std = std::make_shared<std::vector<double>>(n);
    for (int i = 0; i < n; ++i) {
        const double* pa = a.data->data() + static_cast<size_t>(i) * d;
        double* po = out->data() + static_cast<size_t>(i) * d;
        double mean = 0.0;
        for (int j = 0; j < d; ++j) mean += pa[j];
        mean /= d;
        double var = 0.0;
        for (int j = 0; j < d; ++j) var += (pa[j] - mean) * (pa[j] - mean);
        var /= d;
        const double is = 1.0 / std::sqrt(var + kLayerNormEps);
        (*inv_std)[i] = is;
        for (int j = 0; j < d; ++j) po[j] = (pa[j] - mean) * is;
    }
    check_finite(*out, "layer-norm");
    Tape* tape = resolve_tape({&a}, "layer-norm");
    const int na = a.node;
    auto y = out;
    return make_output(a.shape, out, tape, {a.node},
                       [na, n, d, y, inv_std](Tape& t, const double* g) {
                           if (na < 0) return;
                           double* ga = t.grad(na);
                           for (int i = 0; i < n; ++i) {
                               const double* yr = y->data() + static_cast<size_t>(i) * d;
                               const double* gr = g + static_cast<size_t>(i) * d;
                               double gm = 0.0, gym = 0.0;
                               for (int j = 0; j < d; ++j) {
                                   gm += gr[j];
                                   gym += gr[j] * yr[j];
                               }
                               gm /= d;
                               gym /= d;
                               const double is = (*inv_std)[i];
                               double* gar = ga + static_cast<size_t>(i) * d;
                               for (int j = 0; j < d; ++j)
                                   gar[j] += is * (gr[j] - gm - yr[j] * gym);
                           }
                       });
}

Tensor gelu(const Tensor& a) {
    auto out = alloc(a.numel());
    const double* pa = a.data->data();
    const int64_t n = a.numel();
    for (int64_t i = 0; i < n; ++i) {
        const double x = pa[i];
        (*out)[i] = 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2));
    }
    check_finite(*out, "gelu");
    Tape* tape = resolve_tape({&a}, "gelu");
    const int na = a.node;
    auto da = a.data;
    return make_output(a.shape, out, tape, {a.node},
                       [na, n, da](Tape& t, const double* g) {
                           if (na < 0) return;
                           double* ga = t.grad(na);
                           const double* x = da->data();
                           constexpr double inv_sqrt_2pi = 0.3989422804014327;
                           for (int64_t i = 0; i < n; ++i) {
                               const double cdf = 0.5 * (1.0 + std::erf(x[i] * M_SQRT1_2));
                               const double pdf = inv_sqrt_2pi * std::exp(-0.5 * x[i] * x[i]);
                               ga[i] += g[i] * (cdf + x[i] * pdf);
                           }
                       });
}

Tensor sum(const Tensor& a) {
    auto out = alloc(1);
    double acc = 0.0;
    for (int64_t i = 0; i < a.numel(); ++i) acc += (*a.data)[i];
    (*out)[0] = acc;
    check_finite(*out, "sum");
    Tape* tape = resolve_tape({&a}, "sum");
    const int na = a.node;
    const int64_t n = a.numel();
    return make_output({1}, out, tape, {a.node},
                       [na, n](Tape& t, const double* g) {
                           if (na < 0) return;
                           double* ga = t.grad(na);
                           for (int64_t i = 0; i < n; ++i) ga[i] += g[0];
                       });
}

Tensor mean_squared_error(const Tensor& a, const Tensor& b) {
    if (a.shape != b.shape) throw ShapeError("mean-squared-error: shape mismatch");
    const int64_t n = a.numel();
    auto out = alloc(1);
    const double* pa = a.data->data();
    const double* pb = b.data->data();
    double acc = 0.0;
    for (int64_t i = 0; i < n; ++i) {
        const double dlt = pa[i] - pb[i];
        acc += dlt * dlt;
    }
    (*out)[0] = acc / static_cast<double>(n);
    check_finite(*out, "mean-squared-error");
    Tape* tape = resolve_tape({&a, &b}, "mean-squared-error");
    const int na = a.node, nb = b.node;
    auto da = a.data, db = b.data;
    return make_output({1}, out, tape, {a.node, b.node},
                       [na, nb, n, da, db](Tape& t, const double* g) {
                           const double c = 2.0 * g[0] / static_cast<double>(n);
                           const double* pa = da->data();
                           const double* pb = db->data();
                           if (na >= 0) {
                               double* ga = t.grad(na);
                               for (int64_t i = 0; i < n; ++i) ga[i] += c * (pa[i] - pb[i]);
                           }
                           if (nb >= 0) {
                               double* gb = t.grad(nb);
                               for (int64_t i = 0; i < n; ++i) gb[i] -= c * (pa[i] - pb[i]);
                           }
                       });
}

Tensor concat_rows(std::span<const Tensor> parts) {
    if (parts.empty()) throw ShapeError("concat-rows: no operands");
    const int d = parts[0].cols();
    int total_rows = 0;
    for (const Tensor& p : parts) {
        if (p.shape.size() != 2 || p.shape[1] != d)
            throw ShapeError("concat-rows: column mismatch");
        total_rows += p.shape[0];
    }
    auto out = alloc(static_cast<int64_t>(total_rows) * d);
    std::vector<int> parents;
    std::vector<int> row_offsets;
    std::vector<int> row_counts;
    int at = 0;
    Tape* tape = nullptr;
    for (const Tensor& p : parts) {
        std::memcpy(out->data() + static_cast<size_t>(at) * d, p.data->data(),
                    sizeof(double) * static_cast<size_t>(p.numel()));
        parents.push_back(p.node);
        row_offsets.push_back(at);
        row_counts.push_back(p.shape[0]);
        at += p.shape[0];
        Tape* pt = resolve_tape({&p}, "concat-rows");
        if (pt != nullptr) {
            if (tape != nullptr && tape != pt)
                throw ContractError("concat-rows: operands from different tapes");
            tape = pt;
        }
    }
    check_finite(*out, "concat-rows");
    auto parents_copy = parents;
    return make_output({total_rows, d}, out, tape, std::move(parents_copy),
                       [parents, row_offsets, row_counts, d](Tape& t, const double* g) {
                           for (size_t p = 0; p < parents.size(); ++p) {
                               if (parents[p] < 0) continue;
                               axpy(t.grad(parents[p]),
                                    g + static_cast<size_t>(row_offsets[p]) * d, 1.0,
                                    static_cast<int64_t>(row_counts[p]) * d);
                           }
                       });
}

Tensor slice_rows(const Tensor& a, int begin, int count) {
    if (a.shape.size() != 2) throw ShapeError("slice-rows: expects a matrix");
    if (begin < 0 || count <= 0 || begin + count > a.shape[0])
        throw ShapeError("slice-rows: range out of bounds");
    const int d = a.shape[1];
    auto out = alloc(static_cast<int64_t>(count) * d);
    std::memcpy(out->data(), a.data->data() + static_cast<size_t>(begin) * d,
                sizeof(double) * out->size());
    check_finite(*out, "slice-rows");
    Tape* tape = resolve_tape({&a}, "slice-rows");
    const int na = a.node;
    return make_output({count, d}, out, tape, {a.node},
                       [na, begin, count, d](Tape& t, const double* g) {
                           if (na < 0) return;
                           axpy(t.grad(na) + static_cast<size_t>(begin) * d, g, 1.0,
                                static_cast<int64_t>(count) * d);
                       });
}

Tensor transpose(const Tensor& a) {
    if (a.shape.size() != 2) throw ShapeError("transpose: expects a matrix");
    const int n = a.shape[0], d = a.shape[1];
    auto out = alloc(a.numel());
    const double* pa = a.data->data();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j)
            (*out)[static_cast<size_t>(j) * n + i] = pa[static_cast<size_t>(i) * d + j];
    check_finite(*out, "transpose");
    Tape* tape = resolve_tape({&a}, "transpose");
    const int na = a.node;
    return make_output({d, n}, out, tape, {a.node},
                       [na, n, d](Tape& t, const double* g) {
                           if (na < 0) return;
                           double* ga = t.grad(na);
                           for (int j = 0; j < d; ++j)
                               for (int i = 0; i < n; ++i)
                                   ga[static_cast<size_t>(i) * d + j] +=
                                       g[static_cast<size_t>(j) * n + i];
                       });
}

Tensor apply(OpKind kind, std::span<const Tensor> ops, const OpArgs& args) {
    auto need = [&](size_t n) {
        if (ops.size() != n) throw ContractError("apply: wrong operand count");
    };
    switch (kind) {
        case OpKind::Add: need(2); return add(ops[0], ops[1]);
        case OpKind::Sub: need(2); return sub(ops[0], ops[1]);
        case OpKind::Scale: need(1); return scale(ops[0], args.factor);
        case OpKind::ElementwiseMul: need(2); return mul(ops[0], ops[1]);
        case OpKind::Matmul: need(2); return matmul(ops[0], ops[1]);
        case OpKind::SoftmaxRows: need(1); return softmax_rows(ops[0]);
        case OpKind::LayerNorm: need(1); return layer_norm_rows(ops[0]);
        case OpKind::Gelu: need(1); return gelu(ops[0]);
        case OpKind::Sum: need(1); return sum(ops[0]);
        case OpKind::MeanSquaredError: need(2); return mean_squared_error(ops[0], ops[1]);
        case OpKind::ConcatRows: return concat_rows(ops);
        case OpKind::SliceRows: need(1); return slice_rows(ops[0], args.begin, args.count);
        case OpKind::Transpose: need(1); return transpose(ops[0]);
    }
    throw ContractError("apply: unknown op kind");
}

}  // namespace sdb
