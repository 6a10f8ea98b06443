// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "sdb/engine.hpp"

namespace sdb {

enum class Method { MmOnly, MmEnd, MmTraj, PairedOnly, SemiPaired };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

// Five ablation configurations derived from one base config by toggling the
// lambdas and the paired/WTA routing.
RunConfig apply_method(RunConfig base, Method m);

enum class SweepKind { Rho, Modes, Capacity, Candidates, Ablation };

const char* sweep_name(SweepKind k);
SweepKind sweep_from_name(const std::string& name);

struct SweepSpec {
    SweepKind kind = SweepKind::Rho;
    std::vector<double> values;  // empty: the kind's default grid
    int seeds_per_cell = 3;
    RunConfig base;
    bool include_k1000 = false;  // gate on the most expensive modes cell
    int jobs = 1;
};

// Paper grids: rho {0,0.1,0.5,1}, K_c {6,20,100(,1000)}, C_y {1,2,4,8,16,inf
// (encoded as -1)}, candidates {1,2,4,8,16}.
std::vector<double> default_cells(SweepKind kind, bool include_k1000);
std::vector<Method> methods_for(SweepKind kind);

struct ResultRow {
    std::string sweep;
    std::string cell;
    std::string method;
    uint64_t seed = 0;
    bool valid = true;  // false: recorded marker (paired-only at rho=0)
    MetricsReport report;
    double iter_time_s = 0.0;
};

// Seed discipline: per-cell seed s derives (data, init, train, eval) streams.
RunConfig cell_config(const SweepSpec& spec, double cell_value, Method m, uint64_t seed);

// Runs every (cell, method, seed) combination, optionally on a bounded
// worker pool; rows come back in deterministic order. Candidate sweeps
// measure per-iteration wall time serially (median over timed iterations
// after warmup) before training the cells.
std::vector<ResultRow> run_sweep(const SweepSpec& spec);

// Schema: sweep,cell,method,seed,swd,mmd2,content_acc,cycle_mse,iter_time_s
void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path,
                       bool append = false);
std::vector<ResultRow> read_results_csv(const std::string& path);

struct Aggregate {
    double mean_swd = 0, mean_mmd2 = 0, mean_acc = 0, mean_cycle = 0;
    double std_swd = 0, std_mmd2 = 0, std_acc = 0, std_cycle = 0;
    int n = 0;
};

// (sweep, cell, method) -> mean and sample standard deviation over seeds.
std::map<std::string, Aggregate> aggregate_rows(const std::vector<ResultRow>& rows);

// Mean +/- std tables in the ablation-table layout; rho sweeps are subset to
// the {0, 0.5, 1} grid.
std::string report_tables(const std::vector<ResultRow>& rows);

// Median seconds per training iteration (after warm-up), measured on a
// monotonic clock with nothing else running.
double median_iteration_seconds(const RunConfig& config, int warmup = 10, int timed = 50);

// Flat `key = value` configuration text; CLI flags override file values.
void apply_config_kv(RunConfig& config, const std::string& key, const std::string& value);
void load_config_file(RunConfig& config, const std::string& path);

}  // namespace sdb
