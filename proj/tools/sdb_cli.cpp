// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: data generation, single-cell training and
// evaluation, experiment sweeps, and result-table aggregation.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdb/engine.hpp"
#include "sdb/errors.hpp"
#include "sdb/harness.hpp"

namespace {

struct CommonOpts {
    std::string config_file;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_file, "flat key = value configuration file");
    cmd->add_option("--set", opts.sets, "override a config key, e.g. --set epochs=40");
}

sdb::RunConfig build_config(const CommonOpts& opts) {
    sdb::RunConfig cfg;
    if (!opts.config_file.empty()) sdb::load_config_file(cfg, opts.config_file);
    for (const auto& kv : opts.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw sdb::ConfigError("--set expects key=value: " + kv);
        sdb::apply_config_kv(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

int run(int argc, char** argv) {
    CLI::App app{"structured diffusion bridge benchmark"};
    app.require_subcommand(1);

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "write a dataset CSV");
    CommonOpts gen_opts;
    add_common(gen, gen_opts);
    std::string gen_out = "dataset.csv";
    int gen_n = 3000;
    double gen_rho = 0.0;
    gen->add_option("--out", gen_out, "output CSV path");
    gen->add_option("--n", gen_n, "number of samples");
    gen->add_option("--rho", gen_rho, "paired fraction");

    // train
    auto* tr = app.add_subcommand("train", "train one configured cell");
    CommonOpts tr_opts;
    add_common(tr, tr_opts);
    std::string tr_method = "semi-paired";
    std::string tr_prefix = "model";
    std::string tr_log;
    tr->add_option("--method", tr_method, "mm-only|mm+end|mm+traj|paired-only|semi-paired");
    tr->add_option("--out-prefix", tr_prefix, "checkpoint path prefix");
    tr->add_option("--log", tr_log, "write the per-iteration loss CSV here");

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate a trained pair on fresh test data");
    CommonOpts ev_opts;
    add_common(ev, ev_opts);
    std::string ev_prefix = "model";
    ev->add_option("--ckpt-prefix", ev_prefix, "checkpoint path prefix");

    // sweep
    auto* sw = app.add_subcommand("sweep", "run an experiment grid");
    CommonOpts sw_opts;
    add_common(sw, sw_opts);
    std::string sw_kind = "rho";
    int sw_seeds = 3;
    int sw_jobs = 1;
    bool sw_k1000 = false;
    std::vector<double> sw_values;
    std::string sw_out = "results.csv";
    bool sw_append = false;
    sw->add_option("--kind", sw_kind, "rho|modes|capacity|candidates|ablation");
    sw->add_option("--seeds", sw_seeds, "seeds per cell");
    sw->add_option("--jobs", sw_jobs, "bounded worker pool size");
    sw->add_flag("--include-k1000", sw_k1000, "include the K_c=1000 modes cell");
    sw->add_option("--values", sw_values, "override the cell grid");
    sw->add_option("--out", sw_out, "results CSV path");
    sw->add_flag("--append", sw_append, "append to an existing results CSV");

    // report
    auto* rp = app.add_subcommand("report", "aggregate raw rows into mean+-std tables");
    std::string rp_in = "results.csv";
    rp->add_option("--in", rp_in, "raw results CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    if (gen->parsed()) {
        sdb::RunConfig cfg = build_config(gen_opts);
        sdb::GeneratorSpec spec = sdb::build_generator(cfg.data);
        sdb::Rng draw = sdb::Rng::from(cfg.data.seed, 101);
        sdb::Rng pairing = sdb::Rng::from(cfg.data.seed, 102);
        sdb::Dataset ds =
            sdb::assign_pairing(sdb::sample(spec, gen_n, draw), gen_rho, pairing);
        sdb::write_csv(ds, gen_out);
        std::printf("wrote %d samples (rho=%g) to %s\n", gen_n, gen_rho, gen_out.c_str());
        return 0;
    }

    if (tr->parsed()) {
        sdb::RunConfig cfg =
            sdb::apply_method(build_config(tr_opts), sdb::method_from_name(tr_method));
        sdb::TrainResult result = sdb::train(cfg);
        result.pair.src_to_tgt.save(tr_prefix + ".src_to_tgt.ckpt");
        result.pair.tgt_to_src.save(tr_prefix + ".tgt_to_src.ckpt");
        if (!tr_log.empty()) result.log.write_csv(tr_log);
        std::printf("trained %zu iterations; checkpoints at %s.{src_to_tgt,tgt_to_src}.ckpt\n",
                    result.log.rows.size(), tr_prefix.c_str());
        return 0;
    }

    if (ev->parsed()) {
        sdb::RunConfig cfg = build_config(ev_opts);
        sdb::DenoiserConfig dcfg = cfg.denoiser;
        dcfg.latent_dim = cfg.data.latent_dim;
        sdb::BridgePair pair{
            sdb::Denoiser::load(ev_prefix + ".src_to_tgt.ckpt", dcfg),
            sdb::Denoiser::load(ev_prefix + ".tgt_to_src.ckpt", dcfg), cfg.schedule};
        sdb::ContentClassifier h =
            sdb::train_classifier(sdb::make_train_data(cfg), cfg.data.content_count, 97);
        sdb::MetricsReport rep = sdb::evaluate(pair, sdb::make_test_data(cfg), h,
                                               cfg.seed_eval, cfg.swd_projections);
        std::printf("swd=%.6g mmd2=%.6g content_acc=%.6g cycle_mse=%.6g (n=%d)\n", rep.swd,
                    rep.mmd2, rep.content_accuracy, rep.cycle_mse, rep.sample_count);
        return 0;
    }

    if (sw->parsed()) {
        sdb::SweepSpec spec;
        spec.kind = sdb::sweep_from_name(sw_kind);
        spec.base = build_config(sw_opts);
        // paper defaults: the capacity table is reported at rho = 0.5
        if (spec.kind == sdb::SweepKind::Capacity) {
            bool rho_overridden = false;
            for (const auto& kv : sw_opts.sets) rho_overridden |= kv.rfind("rho=", 0) == 0;
            if (!rho_overridden && sw_opts.config_file.empty()) spec.base.rho = 0.5;
        }
        spec.seeds_per_cell = sw_seeds;
        spec.jobs = sw_jobs;
        spec.include_k1000 = sw_k1000;
        spec.values = sw_values;
        auto rows = sdb::run_sweep(spec);
        sdb::write_results_csv(rows, sw_out, sw_append);
        std::printf("wrote %zu rows to %s\n", rows.size(), sw_out.c_str());
        return 0;
    }

    if (rp->parsed()) {
        const auto rows = sdb::read_results_csv(rp_in);
        std::fputs(sdb::report_tables(rows).c_str(), stdout);
        return 0;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const sdb::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 3;
    } catch (const sdb::CalibrationError& e) {
        std::fprintf(stderr, "calibration error: %s\n", e.what());
        return 3;
    } catch (const sdb::DivergenceError& e) {
        std::fprintf(stderr, "divergence at step %d: %s\n", e.step, e.what());
        return 4;
    } catch (const sdb::TrainingError& e) {
        std::fprintf(stderr, "training diverged at iteration %d: %s\n", e.iteration, e.what());
        return 4;
    } catch (const sdb::NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
