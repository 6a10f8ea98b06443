// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "sdb/optimizer.hpp"
#include "sdb/rng.hpp"

namespace sdb {

using PointSet = std::vector<std::vector<double>>;

struct MetricsReport {
    double swd = 0.0;
    double mmd2 = 0.0;  // unbiased U-statistic; may be negative
    double content_accuracy = 0.0;
    double cycle_mse = 0.0;
    int sample_count = 0;
    uint64_t seed = 0;
};

// Exact W1 between two 1-d empirical distributions (quantile walk; handles
// unequal sizes).
double wasserstein1(std::vector<double> a, std::vector<double> b);

std::vector<std::vector<double>> random_unit_directions(int n, int dim, Rng& rng);

// Mean over unit directions of the 1-d W1 between the projected samples.
double swd_with_directions(const PointSet& a, const PointSet& b,
                           const std::vector<std::vector<double>>& directions);
double swd(const PointSet& a, const PointSet& b, int n_projections, Rng& rng);

// Unbiased U-statistic MMD^2 with k(x,y) = exp(-||x-y||^2 / (2 bandwidth^2)).
double mmd2_rbf(const PointSet& a, const PointSet& b, double bandwidth);

// Median pairwise distance over the pooled sample (deterministic subsample
// above a size cap).
double median_heuristic_bandwidth(const PointSet& a, const PointSet& b, Rng& rng);

// Frozen MLP content classifier: two GELU hidden layers of width 64 trained
// by cross-entropy. Training fails with CalibrationError when the held-out
// accuracy stays below the sanity floor.
class ContentClassifier {
public:
    static ContentClassifier train(const PointSet& xs, const std::vector<int>& labels,
                                   int num_classes, uint64_t seed,
                                   double min_holdout_accuracy = 0.95);

    int predict(const std::vector<double>& x) const;
    double accuracy(const PointSet& xs, const std::vector<int>& labels) const;
    double holdout_accuracy() const { return holdout_accuracy_; }
    int num_classes() const { return num_classes_; }

private:
    ParamStore params_;
    int num_classes_ = 1;
    bool trivial_ = false;  // single class
    double holdout_accuracy_ = 1.0;
};

// Fraction of translated samples whose predicted label matches the source's
// content label.
double content_accuracy(const ContentClassifier& h, const PointSet& translated,
                        const std::vector<int>& source_labels);

// E || round_tripped - original ||^2 (squared norm per sample, mean over samples).
double mean_squared_endpoint_error(const PointSet& round_tripped, const PointSet& originals);

}  // namespace sdb
