// SPDX-License-Identifier: Apache-2.0
#include "sdb/engine.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "sdb/errors.hpp"

namespace sdb {

void TrainingLog::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("training log: cannot open " + path);
    out << to_csv();
}

std::string TrainingLog::to_csv() const {
    std::string s = "iter,loss_total,loss_dsm,loss_cyc_end,loss_cyc_traj,loss_pair,"
                    "wta_saturation_events\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.iter, r.total,
                      r.dsm, r.cyc_end, r.cyc_traj, r.pair, r.wta_saturation_events);
        s += buf;
    }
    return s;
}

Dataset make_train_data(const RunConfig& config) {
    GeneratorSpec spec = build_generator(config.data);
    Rng draw = Rng::from(config.data.seed, 101);
    Rng pairing = Rng::from(config.data.seed, 102);
    return assign_pairing(sample(spec, config.n_train, draw), config.rho, pairing);
}

Dataset make_test_data(const RunConfig& config) {
    GeneratorSpec spec = build_generator(config.data);
    Rng draw = Rng::from(config.data.seed, 201);
    Rng pairing = Rng::from(config.data.seed, 202);
    return assign_pairing(sample(spec, config.n_test, draw), config.rho, pairing);
}

TrainResult train(const RunConfig& config) { return train(config, make_train_data(config)); }

TrainResult train(const RunConfig& config, const Dataset& train_data, const IterHook& hook) {
    DenoiserConfig dcfg = config.denoiser;
    dcfg.latent_dim = config.data.latent_dim;

    TrainResult result{
        BridgePair{Denoiser::init(dcfg, Rng::from(config.seed_init, 0).uniform_int(1 << 30)),
                   Denoiser::init(dcfg, Rng::from(config.seed_init, 1).uniform_int(1 << 30)),
                   config.schedule},
        TrainingLog{}};
    if (config.epochs <= 0) return result;

    const int n = static_cast<int>(train_data.samples.size());
    if (n == 0) throw ConfigError("train: empty dataset");

    // endpoint pools by stable sample index
    std::vector<std::vector<double>> src_pool(n), tgt_pool(n);
    for (int i = 0; i < n; ++i) {
        src_pool[i] = train_data.samples[i].z_src;
        tgt_pool[i] = train_data.samples[i].z_tgt;
    }

    AdamState opt_fwd(result.pair.src_to_tgt.params);
    AdamState opt_rev(result.pair.tgt_to_src.params);
    AdamConfig adam;
    adam.lr = config.learning_rate;

    CapacityLedger ledger_fwd(config.objective.capacity);
    CapacityLedger ledger_rev(config.objective.capacity);

    Rng rng = Rng::from(config.seed_train, 7);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;

    Tape tape;
    const int batches_per_epoch = std::max(1, n / std::max(1, config.batch_size));
    int iter = 0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.uniform_int(static_cast<int>(i))]);
        ledger_fwd.reset();
        ledger_rev.reset();

        for (int b = 0; b < batches_per_epoch; ++b, ++iter) {
            const bool train_fwd = (iter % 2 == 0);
            Denoiser& trained_model = train_fwd ? result.pair.src_to_tgt : result.pair.tgt_to_src;
            const Denoiser& frozen_model =
                train_fwd ? result.pair.tgt_to_src : result.pair.src_to_tgt;
            CapacityLedger& ledger = train_fwd ? ledger_fwd : ledger_rev;

            tape.clear();
            DenoiserBinding trained = trained_model.bind(&tape);
            DenoiserBinding frozen = frozen_model.bind(nullptr);

            TotalLossInputs in;
            in.trained = &trained;
            in.frozen = &frozen;
            in.use_pairing = config.use_pairing;
            in.condition_pool = train_fwd ? &src_pool : &tgt_pool;

            const int base = b * config.batch_size;
            for (int j = 0; j < config.batch_size && base + j < n; ++j) {
                const EndpointSample& s = train_data.samples[order[base + j]];
                if (config.drop_unpaired && !s.paired) continue;
                BatchItem item;
                item.target = train_fwd ? &s.z_tgt : &s.z_src;
                item.true_cond = train_fwd ? &s.z_src : &s.z_tgt;
                item.paired = s.paired;
                in.items.push_back(item);
            }

            const bool cycles_on =
                config.objective.lambda_end > 0.0 || config.objective.lambda_traj > 0.0;
            if (cycles_on) {
                const auto& source_pool = train_fwd ? tgt_pool : src_pool;
                for (int c = 0; c < config.cycle_batch; ++c)
                    in.cycle_sources.push_back(&source_pool[rng.uniform_int(n)]);
            }

            if (in.items.empty() && in.cycle_sources.empty()) continue;

            TotalLossResult loss =
                total_loss(in, ledger, config.schedule, config.objective, rng);
            if (!std::isfinite(loss.total.value()))
                throw TrainingError("train: non-finite loss", iter);

            GradMap grads = tape.backward(loss.total);
            auto named = trained.gradients(grads);
            (train_fwd ? opt_fwd : opt_rev).step(trained_model.params, named, adam);

            result.log.rows.push_back(LogRow{iter, loss.total.value(), loss.dsm, loss.cycle_end,
                                             loss.cycle_traj, loss.pair,
                                             loss.saturation_events});
            if (hook) hook(iter);
            if (config.max_iterations > 0 && iter + 1 >= config.max_iterations) return result;
        }
    }
    return result;
}

std::vector<double> translate(const BridgePair& pair, BridgeDir direction,
                              const std::vector<double>& source, int n_steps, Rng& rng) {
    const Denoiser& model =
        direction == BridgeDir::SrcToTgt ? pair.src_to_tgt : pair.tgt_to_src;
    DenoiserBinding binding = model.bind(nullptr);
    return sample_bridge(binding, source, pair.schedule, n_steps, rng, false, direction)
        .final_values();
}

double cycle_mse(const BridgePair& pair, const PointSet& sources, int n_steps, Rng& rng) {
    DenoiserBinding fwd = pair.src_to_tgt.bind(nullptr);
    DenoiserBinding rev = pair.tgt_to_src.bind(nullptr);
    PointSet round_tripped;
    round_tripped.reserve(sources.size());
    for (const auto& src : sources) {
        const auto there =
            sample_bridge(fwd, src, pair.schedule, n_steps, rng, false).final_values();
        round_tripped.push_back(
            sample_bridge(rev, there, pair.schedule, n_steps, rng, false).final_values());
    }
    return mean_squared_endpoint_error(round_tripped, sources);
}

MetricsReport evaluate(const BridgePair& pair, const Dataset& test_data,
                       const ContentClassifier& h, uint64_t eval_seed, int swd_projections) {
    DenoiserBinding fwd = pair.src_to_tgt.bind(nullptr);
    DenoiserBinding rev = pair.tgt_to_src.bind(nullptr);
    return evaluate_fields(fwd, rev, pair.schedule, test_data, h, eval_seed, swd_projections);
}

MetricsReport evaluate_fields(const ScoreField& fwd, const ScoreField& rev,
                              const NoiseSchedule& schedule, const Dataset& test_data,
                              const ContentClassifier& h, uint64_t eval_seed,
                              int swd_projections) {
    const int n = static_cast<int>(test_data.samples.size());
    if (n == 0) throw ContractError("evaluate: empty test set");

    Rng rng_translate = Rng::from(eval_seed, 11);
    Rng rng_round = Rng::from(eval_seed, 12);
    Rng rng_swd = Rng::from(eval_seed, 13);
    Rng rng_mmd = Rng::from(eval_seed, 14);

    PointSet translated;
    PointSet targets;
    std::vector<int> labels;
    translated.reserve(n);
    for (const auto& s : test_data.samples) {
        translated.push_back(
            sample_bridge(fwd, s.z_src, schedule, schedule.t_steps, rng_translate, false)
                .final_values());
        targets.push_back(s.z_tgt);
        labels.push_back(s.content);
    }

    MetricsReport report;
    report.sample_count = n;
    report.seed = eval_seed;
    report.swd = swd(translated, targets, swd_projections, rng_swd);
    report.mmd2 = mmd2_rbf(translated, targets,
                           median_heuristic_bandwidth(translated, targets, rng_mmd));
    report.content_accuracy = content_accuracy(h, translated, labels);

    PointSet round_tripped;
    round_tripped.reserve(n);
    PointSet sources;
    for (int i = 0; i < n; ++i) {
        round_tripped.push_back(
            sample_bridge(rev, translated[i], schedule, schedule.t_steps, rng_round, false)
                .final_values());
        sources.push_back(test_data.samples[i].z_src);
    }
    report.cycle_mse = mean_squared_endpoint_error(round_tripped, sources);
    return report;
}

ContentClassifier train_classifier(const Dataset& train_data, int num_classes, uint64_t seed,
                                   double min_holdout_accuracy) {
    PointSet xs;
    std::vector<int> labels;
    for (const auto& s : train_data.samples) {
        xs.push_back(s.z_tgt);
        labels.push_back(s.content);
    }
    return ContentClassifier::train(xs, labels, num_classes, seed, min_holdout_accuracy);
}

}  // namespace sdb
