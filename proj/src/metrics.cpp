// SPDX-License-Identifier: Apache-2.0
#include "sdb/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "sdb/errors.hpp"

namespace sdb {

double wasserstein1(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ContractError("wasserstein1: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const size_t m = a.size(), n = b.size();
    if (m == n) {
        double w = 0.0;
        for (size_t i = 0; i < m; ++i) w += std::fabs(a[i] - b[i]);
        return w / static_cast<double>(m);
    }
    // walk the merged quantile grid
    size_t i = 0, j = 0;
    double q = 0.0, w = 0.0;
    while (i < m && j < n) {
        const double qa = static_cast<double>(i + 1) / m;
        const double qb = static_cast<double>(j + 1) / n;
        const double qn = std::min(qa, qb);
        w += (qn - q) * std::fabs(a[i] - b[j]);
        q = qn;
        if (qa <= qn) ++i;
        if (qb <= qn) ++j;
    }
    return w;
}

std::vector<std::vector<double>> random_unit_directions(int n, int dim, Rng& rng) {
    std::vector<std::vector<double>> dirs(n, std::vector<double>(dim));
    for (auto& d : dirs) {
        double len = 0.0;
        do {
            len = 0.0;
            for (auto& x : d) {
                x = rng.gaussian();
                len += x * x;
            }
        } while (len == 0.0);
        len = std::sqrt(len);
        for (auto& x : d) x /= len;
    }
    return dirs;
}

double swd_with_directions(const PointSet& a, const PointSet& b,
                           const std::vector<std::vector<double>>& directions) {
    if (a.empty() || b.empty()) throw ContractError("swd: empty sample");
    if (a[0].size() != b[0].size()) throw ContractError("swd: dimension mismatch");
    double total = 0.0;
    std::vector<double> pa(a.size()), pb(b.size());
    for (const auto& dir : directions) {
        for (size_t i = 0; i < a.size(); ++i) {
            double dot = 0.0;
            for (size_t j = 0; j < dir.size(); ++j) dot += dir[j] * a[i][j];
            pa[i] = dot;
        }
        for (size_t i = 0; i < b.size(); ++i) {
            double dot = 0.0;
            for (size_t j = 0; j < dir.size(); ++j) dot += dir[j] * b[i][j];
            pb[i] = dot;
        }
        total += wasserstein1(pa, pb);
    }
    return total / static_cast<double>(directions.size());
}

double swd(const PointSet& a, const PointSet& b, int n_projections, Rng& rng) {
    if (a.empty() || b.empty()) throw ContractError("swd: empty sample");
    return swd_with_directions(a, b,
                               random_unit_directions(n_projections,
                                                      static_cast<int>(a[0].size()), rng));
}

namespace {

double sq_dist(const std::vector<double>& x, const std::vector<double>& y) {
    double acc = 0.0;
    for (size_t j = 0; j < x.size(); ++j) {
        const double d = x[j] - y[j];
        acc += d * d;
    }
    return acc;
}

}  // namespace

double mmd2_rbf(const PointSet& a, const PointSet& b, double bandwidth) {
    if (bandwidth <= 0.0) throw ConfigError("mmd2_rbf: bandwidth must be positive");
    if (a.size() < 2 || b.size() < 2) throw ContractError("mmd2_rbf: need at least 2 samples");
    const double inv = -1.0 / (2.0 * bandwidth * bandwidth);
    const size_t m = a.size(), n = b.size();
    double within_a = 0.0, within_b = 0.0, cross = 0.0;
    for (size_t i = 0; i < m; ++i)
        for (size_t j = i + 1; j < m; ++j) within_a += std::exp(inv * sq_dist(a[i], a[j]));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) within_b += std::exp(inv * sq_dist(b[i], b[j]));
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < n; ++j) cross += std::exp(inv * sq_dist(a[i], b[j]));
    return 2.0 * within_a / (static_cast<double>(m) * (m - 1)) +
           2.0 * within_b / (static_cast<double>(n) * (n - 1)) -
           2.0 * cross / (static_cast<double>(m) * n);
}

double median_heuristic_bandwidth(const PointSet& a, const PointSet& b, Rng& rng) {
    constexpr size_t kCap = 2000;
    PointSet pooled;
    pooled.reserve(a.size() + b.size());
    pooled.insert(pooled.end(), a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    if (pooled.size() > kCap) {
        PointSet sub;
        sub.reserve(kCap);
        for (size_t i = 0; i < kCap; ++i)
            sub.push_back(pooled[rng.uniform_int(static_cast<int>(pooled.size()))]);
        pooled = std::move(sub);
    }
    std::vector<double> dists;
    dists.reserve(pooled.size() * (pooled.size() - 1) / 2);
    for (size_t i = 0; i < pooled.size(); ++i)
        for (size_t j = i + 1; j < pooled.size(); ++j)
            dists.push_back(std::sqrt(sq_dist(pooled[i], pooled[j])));
    if (dists.empty()) throw ContractError("median_heuristic_bandwidth: degenerate pool");
    std::nth_element(dists.begin(), dists.begin() + dists.size() / 2, dists.end());
    const double med = dists[dists.size() / 2];
    return med > 0.0 ? med : 1.0;
}

// ---------------------------------------------------------------------------
// Content classifier (hand-rolled MLP; cross-entropy needs its own backward)
// ---------------------------------------------------------------------------

namespace {

constexpr int kHidden = 64;

double gelu_f(double x) { return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2)); }
double gelu_df(double x) {
    constexpr double inv_sqrt_2pi = 0.3989422804014327;
    return 0.5 * (1.0 + std::erf(x * M_SQRT1_2)) + x * inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

struct MlpBuffers {
    std::vector<double> a1, h1, a2, h2, logits, probs;
};

void mlp_forward(const ParamStore& ps, const std::vector<double>& x, int k, MlpBuffers& buf) {
    const auto& w1 = *ps.by_name("w1").values;
    const auto& b1 = *ps.by_name("b1").values;
    const auto& w2 = *ps.by_name("w2").values;
    const auto& b2 = *ps.by_name("b2").values;
    const auto& w3 = *ps.by_name("w3").values;
    const auto& b3 = *ps.by_name("b3").values;
    const int d = static_cast<int>(x.size());
    buf.a1.assign(kHidden, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < kHidden; ++j) buf.a1[j] += x[i] * w1[static_cast<size_t>(i) * kHidden + j];
    buf.h1.resize(kHidden);
    for (int j = 0; j < kHidden; ++j) buf.h1[j] = gelu_f(buf.a1[j] + b1[j]);
    buf.a2.assign(kHidden, 0.0);
    for (int i = 0; i < kHidden; ++i)
        for (int j = 0; j < kHidden; ++j)
            buf.a2[j] += buf.h1[i] * w2[static_cast<size_t>(i) * kHidden + j];
    buf.h2.resize(kHidden);
    for (int j = 0; j < kHidden; ++j) buf.h2[j] = gelu_f(buf.a2[j] + b2[j]);
    buf.logits.assign(k, 0.0);
    for (int i = 0; i < kHidden; ++i)
        for (int j = 0; j < k; ++j)
            buf.logits[j] += buf.h2[i] * w3[static_cast<size_t>(i) * k + j];
    for (int j = 0; j < k; ++j) buf.logits[j] += b3[j];
    buf.probs.resize(k);
    double mx = buf.logits[0];
    for (int j = 1; j < k; ++j) mx = std::max(mx, buf.logits[j]);
    double z = 0.0;
    for (int j = 0; j < k; ++j) {
        buf.probs[j] = std::exp(buf.logits[j] - mx);
        z += buf.probs[j];
    }
    for (int j = 0; j < k; ++j) buf.probs[j] /= z;
}

}  // namespace

ContentClassifier ContentClassifier::train(const PointSet& xs, const std::vector<int>& labels,
                                           int num_classes, uint64_t seed,
                                           double min_holdout_accuracy) {
    if (xs.size() != labels.size() || xs.empty())
        throw ContractError("classifier: samples and labels misaligned");
    ContentClassifier h;
    h.num_classes_ = num_classes;
    if (num_classes < 2) {
        h.trivial_ = true;
        return h;
    }

    const int d = static_cast<int>(xs[0].size());
    const int k = num_classes;
    Rng rng(seed);

    auto xavier = [&](int fan_in, int fan_out) {
        std::vector<double> v(static_cast<size_t>(fan_in) * fan_out);
        const double lim = std::sqrt(6.0 / (fan_in + fan_out));
        for (auto& x : v) x = rng.uniform(-lim, lim);
        return v;
    };
    h.params_.add("w1", {d, kHidden}, xavier(d, kHidden));
    h.params_.add("b1", {1, kHidden}, std::vector<double>(kHidden, 0.0));
    h.params_.add("w2", {kHidden, kHidden}, xavier(kHidden, kHidden));
    h.params_.add("b2", {1, kHidden}, std::vector<double>(kHidden, 0.0));
    h.params_.add("w3", {kHidden, k}, xavier(kHidden, k));
    h.params_.add("b3", {1, k}, std::vector<double>(k, 0.0));

    // deterministic shuffle, 85/15 train/holdout split
    std::vector<int> order(xs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    for (size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.uniform_int(static_cast<int>(i))]);
    const size_t n_train = std::max<size_t>(1, (order.size() * 85) / 100);

    AdamState opt(h.params_);
    AdamConfig cfg;
    cfg.lr = 3e-3;
    const int epochs = 80, batch = 128;
    MlpBuffers buf;

    std::unordered_map<std::string, Tensor> grads;
    auto zero_grads = [&]() {
        grads.clear();
        for (const auto& p : h.params_) grads.emplace(p.name, Tensor::zeros(p.shape));
    };

    for (int epoch = 0; epoch < epochs; ++epoch) {
        for (size_t at = 0; at < n_train; at += batch) {
            const size_t end = std::min(n_train, at + batch);
            zero_grads();
            for (size_t bi = at; bi < end; ++bi) {
                const auto& x = xs[order[bi]];
                const int label = labels[order[bi]];
                mlp_forward(h.params_, x, k, buf);
                // dCE/dlogits = probs - onehot
                std::vector<double> dl(buf.probs);
                dl[label] -= 1.0;
                auto& gw3 = *grads.at("w3").data;
                auto& gb3 = *grads.at("b3").data;
                std::vector<double> dh2(kHidden, 0.0);
                const auto& w3 = *h.params_.by_name("w3").values;
                for (int i = 0; i < kHidden; ++i) {
                    for (int j = 0; j < k; ++j) {
                        gw3[static_cast<size_t>(i) * k + j] += buf.h2[i] * dl[j];
                        dh2[i] += w3[static_cast<size_t>(i) * k + j] * dl[j];
                    }
                }
                for (int j = 0; j < k; ++j) gb3[j] += dl[j];
                const auto& b2v = *h.params_.by_name("b2").values;
                std::vector<double> da2(kHidden);
                for (int j = 0; j < kHidden; ++j)
                    da2[j] = dh2[j] * gelu_df(buf.a2[j] + b2v[j]);
                auto& gw2 = *grads.at("w2").data;
                auto& gb2 = *grads.at("b2").data;
                std::vector<double> dh1(kHidden, 0.0);
                const auto& w2 = *h.params_.by_name("w2").values;
                for (int i = 0; i < kHidden; ++i) {
                    for (int j = 0; j < kHidden; ++j) {
                        gw2[static_cast<size_t>(i) * kHidden + j] += buf.h1[i] * da2[j];
                        dh1[i] += w2[static_cast<size_t>(i) * kHidden + j] * da2[j];
                    }
                }
                for (int j = 0; j < kHidden; ++j) gb2[j] += da2[j];
                const auto& b1v = *h.params_.by_name("b1").values;
                std::vector<double> da1(kHidden);
                for (int j = 0; j < kHidden; ++j)
                    da1[j] = dh1[j] * gelu_df(buf.a1[j] + b1v[j]);
                auto& gw1 = *grads.at("w1").data;
                auto& gb1 = *grads.at("b1").data;
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < kHidden; ++j)
                        gw1[static_cast<size_t>(i) * kHidden + j] += x[i] * da1[j];
                for (int j = 0; j < kHidden; ++j) gb1[j] += da1[j];
            }
            const double inv = 1.0 / static_cast<double>(end - at);
            for (auto& [name, g] : grads)
                for (auto& v : *g.data) v *= inv;
            opt.step(h.params_, grads, cfg);
        }
    }

    int correct = 0, total = 0;
    for (size_t i = n_train; i < order.size(); ++i) {
        mlp_forward(h.params_, xs[order[i]], k, buf);
        int arg = 0;
        for (int j = 1; j < k; ++j)
            if (buf.logits[j] > buf.logits[arg]) arg = j;
        correct += (arg == labels[order[i]]) ? 1 : 0;
        ++total;
    }
    h.holdout_accuracy_ = total > 0 ? static_cast<double>(correct) / total : 0.0;
    if (h.holdout_accuracy_ < min_holdout_accuracy)
        throw CalibrationError("classifier: held-out accuracy " +
                               std::to_string(h.holdout_accuracy_) +
                               " below the sanity floor; generator looks degenerate");
    return h;
}

int ContentClassifier::predict(const std::vector<double>& x) const {
    if (trivial_) return 0;
    MlpBuffers buf;
    mlp_forward(params_, x, num_classes_, buf);
    int arg = 0;
    for (int j = 1; j < num_classes_; ++j)
        if (buf.logits[j] > buf.logits[arg]) arg = j;
    return arg;
}

double ContentClassifier::accuracy(const PointSet& xs, const std::vector<int>& labels) const {
    if (xs.size() != labels.size() || xs.empty())
        throw ContractError("classifier accuracy: misaligned inputs");
    int correct = 0;
    for (size_t i = 0; i < xs.size(); ++i) correct += (predict(xs[i]) == labels[i]) ? 1 : 0;
    return static_cast<double>(correct) / xs.size();
}

double content_accuracy(const ContentClassifier& h, const PointSet& translated,
                        const std::vector<int>& source_labels) {
    return h.accuracy(translated, source_labels);
}

double mean_squared_endpoint_error(const PointSet& round_tripped, const PointSet& originals) {
    if (round_tripped.size() != originals.size() || round_tripped.empty())
        throw ContractError("mean_squared_endpoint_error: misaligned inputs");
    double acc = 0.0;
    for (size_t i = 0; i < round_tripped.size(); ++i) acc += sq_dist(round_tripped[i], originals[i]);
    return acc / static_cast<double>(round_tripped.size());
}

}  // namespace sdb
