// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdb/bridge.hpp"
#include "sdb/denoiser.hpp"
#include "sdb/metrics.hpp"
#include "sdb/objectives.hpp"
#include "sdb/synthgen.hpp"

namespace sdb {

// One reproducible experiment cell: all randomness flows from the explicit
// seeds (data, init, train, eval).
struct RunConfig {
    GeneratorConfig data;          // data.seed is the data seed
    int n_train = 3000;
    int n_test = 3000;
    ObjectiveConfig objective;
    DenoiserConfig denoiser;
    NoiseSchedule schedule;        // schedule.t_steps is the inference discretization
    double rho = 0.0;
    int epochs = 30;
    int batch_size = 128;
    int cycle_batch = 2;           // round trips per training iteration
    double learning_rate = 1e-3;
    uint64_t seed_init = 2;
    uint64_t seed_train = 3;
    uint64_t seed_eval = 4;
    int swd_projections = 128;
    int max_iterations = 0;        // 0: run all epochs; otherwise stop early
    // method routing
    bool use_pairing = true;    // false: all samples go through WTA
    bool drop_unpaired = false; // paired-only baseline
};

struct BridgePair {
    Denoiser src_to_tgt;
    Denoiser tgt_to_src;
    NoiseSchedule schedule;
};

struct LogRow {
    int iter = 0;
    double total = 0.0, dsm = 0.0, cyc_end = 0.0, cyc_traj = 0.0, pair = 0.0;
    int wta_saturation_events = 0;
};

struct TrainingLog {
    std::vector<LogRow> rows;
    void write_csv(const std::string& path) const;
    std::string to_csv() const;
};

struct TrainResult {
    BridgePair pair;
    TrainingLog log;
};

// Mini-batch optimization of the unified objective, alternating the trained
// direction per iteration; the capacity ledgers reset at epoch boundaries.
// The hook (when set) runs after every optimizer step.
using IterHook = std::function<void(int iter)>;
TrainResult train(const RunConfig& config);
TrainResult train(const RunConfig& config, const Dataset& train_data,
                  const IterHook& hook = {});

std::vector<double> translate(const BridgePair& pair, BridgeDir direction,
                              const std::vector<double>& source, int n_steps, Rng& rng);

// Round-trip mean squared endpoint error over the given sources.
double cycle_mse(const BridgePair& pair, const PointSet& sources, int n_steps, Rng& rng);

// Translates every test source, then scores all four metrics against the
// test targets. The classifier must already be trained on clean target data.
MetricsReport evaluate(const BridgePair& pair, const Dataset& test_data,
                       const ContentClassifier& h, uint64_t eval_seed, int swd_projections);

// Same pipeline over raw score fields (oracle substitution in tests).
MetricsReport evaluate_fields(const ScoreField& fwd, const ScoreField& rev,
                              const NoiseSchedule& schedule, const Dataset& test_data,
                              const ContentClassifier& h, uint64_t eval_seed,
                              int swd_projections);

// Classifier for a run's data configuration, trained on clean target draws.
ContentClassifier train_classifier(const Dataset& train_data, int num_classes, uint64_t seed,
                                   double min_holdout_accuracy = 0.95);

// Deterministic train/test datasets for a config.
Dataset make_train_data(const RunConfig& config);
Dataset make_test_data(const RunConfig& config);

}  // namespace sdb
