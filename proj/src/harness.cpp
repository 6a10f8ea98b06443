// SPDX-License-Identifier: Apache-2.0
#include "sdb/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "sdb/errors.hpp"

namespace sdb {

const char* method_name(Method m) {
    switch (m) {
        case Method::MmOnly: return "mm-only";
        case Method::MmEnd: return "mm+end";
        case Method::MmTraj: return "mm+traj";
        case Method::PairedOnly: return "paired-only";
        case Method::SemiPaired: return "semi-paired";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    for (Method m : {Method::MmOnly, Method::MmEnd, Method::MmTraj, Method::PairedOnly,
                     Method::SemiPaired})
        if (name == method_name(m)) return m;
    throw ConfigError("unknown method: " + name);
}

RunConfig apply_method(RunConfig base, Method m) {
    switch (m) {
        case Method::MmOnly:
            base.objective.lambda_end = 0.0;
            base.objective.lambda_traj = 0.0;
            base.objective.lambda_pair = 0.0;
            base.use_pairing = false;
            base.drop_unpaired = false;
            break;
        case Method::MmEnd:
            base.objective.lambda_traj = 0.0;
            base.objective.lambda_pair = 0.0;
            base.use_pairing = false;
            base.drop_unpaired = false;
            break;
        case Method::MmTraj:
            base.objective.lambda_pair = 0.0;
            base.use_pairing = false;
            base.drop_unpaired = false;
            break;
        case Method::PairedOnly:
            base.objective.lambda_end = 0.0;
            base.objective.lambda_traj = 0.0;
            base.use_pairing = true;
            base.drop_unpaired = true;
            break;
        case Method::SemiPaired:
            base.use_pairing = true;
            base.drop_unpaired = false;
            break;
    }
    return base;
}

const char* sweep_name(SweepKind k) {
    switch (k) {
        case SweepKind::Rho: return "rho";
        case SweepKind::Modes: return "modes";
        case SweepKind::Capacity: return "capacity";
        case SweepKind::Candidates: return "candidates";
        case SweepKind::Ablation: return "ablation";
    }
    return "?";
}

SweepKind sweep_from_name(const std::string& name) {
    for (SweepKind k : {SweepKind::Rho, SweepKind::Modes, SweepKind::Capacity,
                        SweepKind::Candidates, SweepKind::Ablation})
        if (name == sweep_name(k)) return k;
    throw ConfigError("unknown sweep kind: " + name);
}

std::vector<double> default_cells(SweepKind kind, bool include_k1000) {
    switch (kind) {
        case SweepKind::Rho: return {0.0, 0.1, 0.5, 1.0};
        case SweepKind::Modes:
            return include_k1000 ? std::vector<double>{6, 20, 100, 1000}
                                 : std::vector<double>{6, 20, 100};
        case SweepKind::Capacity: return {1, 2, 4, 8, 16, -1};  // -1 encodes unlimited
        case SweepKind::Candidates: return {1, 2, 4, 8, 16};
        case SweepKind::Ablation: return {};  // single cell at the base rho
    }
    return {};
}

std::vector<Method> methods_for(SweepKind kind) {
    switch (kind) {
        case SweepKind::Rho:
        case SweepKind::Ablation:
            return {Method::MmOnly, Method::MmEnd, Method::MmTraj, Method::PairedOnly,
                    Method::SemiPaired};
        case SweepKind::Modes: return {Method::MmOnly, Method::SemiPaired};
        case SweepKind::Capacity:
        case SweepKind::Candidates:
            return {Method::SemiPaired};
    }
    return {};
}

namespace {

std::string format_cell(SweepKind kind, double value) {
    char buf[32];
    switch (kind) {
        case SweepKind::Rho:
        case SweepKind::Ablation:
            std::snprintf(buf, sizeof(buf), "%g", value);
            return buf;
        case SweepKind::Capacity:
            if (value < 0) return "inf";
            std::snprintf(buf, sizeof(buf), "%d", static_cast<int>(value));
            return buf;
        case SweepKind::Modes:
        case SweepKind::Candidates:
            std::snprintf(buf, sizeof(buf), "%d", static_cast<int>(value));
            return buf;
    }
    return "?";
}

}  // namespace

RunConfig cell_config(const SweepSpec& spec, double cell_value, Method m, uint64_t seed) {
    RunConfig cfg = spec.base;
    switch (spec.kind) {
        case SweepKind::Rho:
        case SweepKind::Ablation:
            cfg.rho = cell_value;
            break;
        case SweepKind::Modes:
            cfg.data.content_count = static_cast<int>(cell_value);
            break;
        case SweepKind::Capacity:
            cfg.objective.capacity = cell_value < 0 ? 0 : static_cast<int>(cell_value);
            break;
        case SweepKind::Candidates:
            cfg.objective.wta_candidates = static_cast<int>(cell_value);
            break;
    }
    cfg.data.seed = seed;
    cfg.seed_init = seed + 100;
    cfg.seed_train = seed + 200;
    cfg.seed_eval = seed + 300;
    return apply_method(cfg, m);
}

namespace {

struct Task {
    size_t order;
    double cell_value;
    std::string cell;
    Method method;
    uint64_t seed;
    bool marker;
    double iter_time_s;
};

// Classifiers are pure functions of the data configuration; share them
// between runs of the same cell.
class ClassifierCache {
public:
    const ContentClassifier& get(const RunConfig& cfg) {
        char key[160];
        std::snprintf(key, sizeof(key), "%d|%d|%d|%.17g|%.17g|%llu|%d", cfg.data.content_count,
                      cfg.data.style_count, cfg.data.latent_dim, cfg.data.noise_std,
                      cfg.data.warp_alpha, static_cast<unsigned long long>(cfg.data.seed),
                      cfg.n_train);
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        RunConfig data_cfg = cfg;
        data_cfg.rho = 0.0;  // pairing does not affect clean target draws
        ContentClassifier h =
            train_classifier(make_train_data(data_cfg), cfg.data.content_count, 97);
        return cache_.emplace(key, std::move(h)).first->second;
    }

private:
    std::mutex mu_;
    std::map<std::string, ContentClassifier> cache_;
};

}  // namespace

double median_iteration_seconds(const RunConfig& config, int warmup, int timed) {
    using Clock = std::chrono::steady_clock;
    RunConfig cfg = config;
    cfg.max_iterations = warmup + timed;
    std::vector<double> durations;
    durations.reserve(warmup + timed);
    Clock::time_point last = Clock::now();
    train(cfg, make_train_data(cfg), [&](int) {
        const Clock::time_point now = Clock::now();
        durations.push_back(std::chrono::duration<double>(now - last).count());
        last = now;
    });
    if (static_cast<int>(durations.size()) <= warmup)
        throw ConfigError("median_iteration_seconds: not enough iterations to time");
    std::vector<double> tail(durations.begin() + warmup, durations.end());
    std::nth_element(tail.begin(), tail.begin() + tail.size() / 2, tail.end());
    return tail[tail.size() / 2];
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec) {
    std::vector<double> cells = spec.values;
    if (cells.empty()) cells = default_cells(spec.kind, spec.include_k1000);
    if (spec.kind == SweepKind::Ablation && cells.empty()) cells = {spec.base.rho};
    const std::vector<Method> methods = methods_for(spec.kind);

    std::vector<Task> tasks;
    for (double cell : cells) {
        for (Method m : methods) {
            for (int s = 1; s <= spec.seeds_per_cell; ++s) {
                Task t;
                t.order = tasks.size();
                t.cell_value = cell;
                t.cell = format_cell(spec.kind, cell);
                t.method = m;
                t.seed = static_cast<uint64_t>(s);
                const double rho = (spec.kind == SweepKind::Rho || spec.kind == SweepKind::Ablation)
                                       ? cell
                                       : spec.base.rho;
                t.marker = (m == Method::PairedOnly && rho == 0.0);
                t.iter_time_s = 0.0;
                tasks.push_back(t);
            }
        }
    }

    // Timing cells run exclusively, never inside the worker pool.
    if (spec.kind == SweepKind::Candidates) {
        for (Task& t : tasks) {
            if (t.marker) continue;
            RunConfig cfg = cell_config(spec, t.cell_value, t.method, t.seed);
            t.iter_time_s = median_iteration_seconds(cfg);
        }
    }

    std::vector<ResultRow> rows(tasks.size());
    ClassifierCache classifiers;
    std::mutex next_mu;
    size_t next = 0;

    auto worker = [&]() {
        for (;;) {
            size_t i;
            {
                std::lock_guard<std::mutex> lock(next_mu);
                if (next >= tasks.size()) return;
                i = next++;
            }
            const Task& t = tasks[i];
            ResultRow row;
            row.sweep = sweep_name(spec.kind);
            row.cell = t.cell;
            row.method = method_name(t.method);
            row.seed = t.seed;
            row.iter_time_s = t.iter_time_s;
            if (t.marker) {
                row.valid = false;
            } else {
                RunConfig cfg = cell_config(spec, t.cell_value, t.method, t.seed);
                const ContentClassifier& h = classifiers.get(cfg);
                TrainResult trained = train(cfg);
                row.report =
                    evaluate(trained.pair, make_test_data(cfg), h, cfg.seed_eval,
                             cfg.swd_projections);
            }
            rows[i] = std::move(row);
        }
    };

    const int jobs = std::max(1, spec.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return rows;
}

void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path,
                       bool append) {
    const bool fresh = !append || !std::ifstream(path).good();
    std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
    if (!out) throw ConfigError("write_results_csv: cannot open " + path);
    if (fresh) out << "sweep,cell,method,seed,swd,mmd2,content_acc,cycle_mse,iter_time_s\n";
    char buf[256];
    for (const auto& r : rows) {
        if (r.valid) {
            std::snprintf(buf, sizeof(buf), "%s,%s,%s,%llu,%.17g,%.17g,%.17g,%.17g,%.6f\n",
                          r.sweep.c_str(), r.cell.c_str(), r.method.c_str(),
                          static_cast<unsigned long long>(r.seed), r.report.swd, r.report.mmd2,
                          r.report.content_accuracy, r.report.cycle_mse, r.iter_time_s);
        } else {
            std::snprintf(buf, sizeof(buf), "%s,%s,%s,%llu,na,na,na,na,na\n", r.sweep.c_str(),
                          r.cell.c_str(), r.method.c_str(),
                          static_cast<unsigned long long>(r.seed));
        }
        out << buf;
    }
}

std::vector<ResultRow> read_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("read_results_csv: cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        ResultRow r;
        std::getline(ss, r.sweep, ',');
        std::getline(ss, r.cell, ',');
        std::getline(ss, r.method, ',');
        std::getline(ss, cell, ',');
        r.seed = std::stoull(cell);
        std::getline(ss, cell, ',');
        if (cell == "na") {
            r.valid = false;
        } else {
            r.report.swd = std::stod(cell);
            std::getline(ss, cell, ',');
            r.report.mmd2 = std::stod(cell);
            std::getline(ss, cell, ',');
            r.report.content_accuracy = std::stod(cell);
            std::getline(ss, cell, ',');
            r.report.cycle_mse = std::stod(cell);
            std::getline(ss, cell, ',');
            r.iter_time_s = std::stod(cell);
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::map<std::string, Aggregate> aggregate_rows(const std::vector<ResultRow>& rows) {
    struct Acc {
        std::vector<double> swd, mmd2, acc, cycle;
    };
    std::map<std::string, Acc> groups;
    for (const auto& r : rows) {
        if (!r.valid) continue;
        Acc& g = groups[r.sweep + "|" + r.cell + "|" + r.method];
        g.swd.push_back(r.report.swd);
        g.mmd2.push_back(r.report.mmd2);
        g.acc.push_back(r.report.content_accuracy);
        g.cycle.push_back(r.report.cycle_mse);
    }
    auto mean = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        return m / static_cast<double>(v.size());
    };
    auto sstd = [&](const std::vector<double>& v, double m) {
        if (v.size() < 2) return 0.0;
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return std::sqrt(s / static_cast<double>(v.size() - 1));
    };
    std::map<std::string, Aggregate> out;
    for (const auto& [key, g] : groups) {
        Aggregate a;
        a.n = static_cast<int>(g.swd.size());
        a.mean_swd = mean(g.swd);
        a.mean_mmd2 = mean(g.mmd2);
        a.mean_acc = mean(g.acc);
        a.mean_cycle = mean(g.cycle);
        a.std_swd = sstd(g.swd, a.mean_swd);
        a.std_mmd2 = sstd(g.mmd2, a.mean_mmd2);
        a.std_acc = sstd(g.acc, a.mean_acc);
        a.std_cycle = sstd(g.cycle, a.mean_cycle);
        out.emplace(key, a);
    }
    return out;
}

std::string report_tables(const std::vector<ResultRow>& rows) {
    auto aggregates = aggregate_rows(rows);

    // stable cell/method ordering from first appearance in the raw rows
    std::vector<std::pair<std::string, std::string>> order;  // (sweep|cell, method)
    for (const auto& r : rows) {
        // rho tables follow the ablation-table grid {0, 0.5, 1}
        if (r.sweep == "rho" && r.cell != "0" && r.cell != "0.5" && r.cell != "1") continue;
        const auto key = std::make_pair(r.sweep + "|" + r.cell, r.method);
        if (std::find(order.begin(), order.end(), key) == order.end()) order.push_back(key);
    }

    std::string out;
    char buf[256];
    std::string current;
    for (const auto& [cell_key, method] : order) {
        if (cell_key != current) {
            current = cell_key;
            const auto bar = cell_key.substr(cell_key.find('|') + 1);
            const auto kind = cell_key.substr(0, cell_key.find('|'));
            std::snprintf(buf, sizeof(buf),
                          "\n%s = %s\n%-14s %18s %18s %18s %18s\n", kind.c_str(), bar.c_str(),
                          "method", "SWD", "MMD^2", "Content Acc.", "Cycle MSE");
            out += buf;
        }
        auto it = aggregates.find(cell_key + "|" + method);
        if (it == aggregates.end()) {
            std::snprintf(buf, sizeof(buf), "%-14s %18s %18s %18s %18s\n", method.c_str(), "na",
                          "na", "na", "na");
            out += buf;
            continue;
        }
        const Aggregate& a = it->second;
        auto fmt = [&](double m, double s) {
            char cell[40];
            std::snprintf(cell, sizeof(cell), "%.4g+-%.2g", m, s);
            return std::string(cell);
        };
        std::snprintf(buf, sizeof(buf), "%-14s %18s %18s %18s %18s\n", method.c_str(),
                      fmt(a.mean_swd, a.std_swd).c_str(), fmt(a.mean_mmd2, a.std_mmd2).c_str(),
                      fmt(a.mean_acc, a.std_acc).c_str(),
                      fmt(a.mean_cycle, a.std_cycle).c_str());
        out += buf;
    }
    return out;
}

void apply_config_kv(RunConfig& config, const std::string& key, const std::string& value) {
    auto as_int = [&]() { return std::stoi(value); };
    auto as_double = [&]() { return std::stod(value); };
    auto as_u64 = [&]() { return static_cast<uint64_t>(std::stoull(value)); };

    if (key == "kc" || key == "content_count") config.data.content_count = as_int();
    else if (key == "style_count") config.data.style_count = as_int();
    else if (key == "latent_dim") config.data.latent_dim = as_int();
    else if (key == "noise_std") config.data.noise_std = as_double();
    else if (key == "warp_alpha") config.data.warp_alpha = as_double();
    else if (key == "data_seed") config.data.seed = as_u64();
    else if (key == "n_train") config.n_train = as_int();
    else if (key == "n_test") config.n_test = as_int();
    else if (key == "rho") config.rho = as_double();
    else if (key == "epochs") config.epochs = as_int();
    else if (key == "batch_size") config.batch_size = as_int();
    else if (key == "cycle_batch") config.cycle_batch = as_int();
    else if (key == "learning_rate") config.learning_rate = as_double();
    else if (key == "seed_init") config.seed_init = as_u64();
    else if (key == "seed_train") config.seed_train = as_u64();
    else if (key == "seed_eval") config.seed_eval = as_u64();
    else if (key == "swd_projections") config.swd_projections = as_int();
    else if (key == "max_iterations") config.max_iterations = as_int();
    else if (key == "lambda_end") config.objective.lambda_end = as_double();
    else if (key == "lambda_traj") config.objective.lambda_traj = as_double();
    else if (key == "lambda_pair") config.objective.lambda_pair = as_double();
    else if (key == "wta_candidates") config.objective.wta_candidates = as_int();
    else if (key == "capacity") config.objective.capacity = value == "inf" ? 0 : as_int();
    else if (key == "traj_steps") config.objective.traj_steps = as_int();
    else if (key == "eps_w") config.objective.eps_w = as_double();
    else if (key == "t_min") config.objective.t_min = as_double();
    else if (key == "blocks") config.denoiser.blocks = as_int();
    else if (key == "d_model") config.denoiser.d_model = as_int();
    else if (key == "n_heads") config.denoiser.n_heads = as_int();
    else if (key == "time_embed_dim") config.denoiser.time_embedding.dim = as_int();
    else if (key == "freq_base") config.denoiser.time_embedding.freq_base = as_double();
    else if (key == "sigma_min") config.schedule.sigma_min = as_double();
    else if (key == "sigma_max") config.schedule.sigma_max = as_double();
    else if (key == "inference_steps") config.schedule.t_steps = as_int();
    else throw ConfigError("unknown config key: " + key);
}

void load_config_file(RunConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file: cannot open " + path);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) apply_config_kv(config, key, value);
    }
}

}  // namespace sdb
