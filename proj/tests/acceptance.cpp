// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Trains the benchmark grid (3 seeds per cell, bounded
// worker pool) and prints one PASS/FAIL line per criterion. Exit status is
// the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "sdb/engine.hpp"
#include "sdb/errors.hpp"
#include "sdb/harness.hpp"
#include "sdb/metrics.hpp"
#include "sdb/objectives.hpp"

using namespace sdb;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------------------
// Training-run cache
// ---------------------------------------------------------------------------

struct Cell {
    double rho = 0.0;
    Method method = Method::SemiPaired;
    int kc = 6;
    int capacity = 2;   // 0 = unlimited
    int kw = 8;
    uint64_t seed = 1;

    std::string key() const {
        return fmt("%g|%s|%d|%d|%d|%llu", rho, method_name(method), kc, capacity, kw,
                   static_cast<unsigned long long>(seed));
    }
};

RunConfig cell_to_config(const Cell& c) {
    RunConfig cfg;
    cfg.rho = c.rho;
    cfg.data.content_count = c.kc;
    cfg.objective.capacity = c.capacity;
    cfg.objective.wta_candidates = c.kw;
    cfg.data.seed = c.seed;
    cfg.seed_init = c.seed + 100;
    cfg.seed_train = c.seed + 200;
    cfg.seed_eval = c.seed + 300;
    return apply_method(cfg, c.method);
}

class RunCache {
public:
    void request(const Cell& c) {
        std::lock_guard<std::mutex> lock(mu_);
        if (!results_.count(c.key())) pending_.push_back(c);
    }

    void execute(int jobs) {
        std::vector<Cell> tasks;
        {
            std::lock_guard<std::mutex> lock(mu_);
            tasks = pending_;
            pending_.clear();
        }
        std::mutex next_mu;
        size_t next = 0;
        const auto t0 = std::chrono::steady_clock::now();
        auto worker = [&]() {
            for (;;) {
                size_t i;
                {
                    std::lock_guard<std::mutex> lock(next_mu);
                    if (next >= tasks.size()) return;
                    i = next++;
                }
                const Cell& c = tasks[i];
                RunConfig cfg = cell_to_config(c);
                const ContentClassifier& h = classifier_for(cfg);
                TrainResult trained = train(cfg);
                MetricsReport rep = evaluate(trained.pair, make_test_data(cfg), h,
                                             cfg.seed_eval, cfg.swd_projections);
                {
                    std::lock_guard<std::mutex> lock(mu_);
                    results_[c.key()] = rep;
                    const double el =
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count();
                    std::printf("  [run %zu/%zu  t=%.0fs] %s  acc=%.3f swd=%.4f cyc=%.3f\n",
                                results_.size(), tasks.size(), el, c.key().c_str(),
                                rep.content_accuracy, rep.swd, rep.cycle_mse);
                    std::fflush(stdout);
                }
            }
        };
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    const MetricsReport& get(const Cell& c) const { return results_.at(c.key()); }

    double mean_over_seeds(Cell c, double MetricsReport::*field) const {
        double acc = 0.0;
        for (uint64_t s = 1; s <= 3; ++s) {
            c.seed = s;
            acc += results_.at(c.key()).*field;
        }
        return acc / 3.0;
    }

private:
    const ContentClassifier& classifier_for(const RunConfig& cfg) {
        const std::string key = fmt("%d|%llu", cfg.data.content_count,
                                    static_cast<unsigned long long>(cfg.data.seed));
        std::lock_guard<std::mutex> lock(cls_mu_);
        auto it = classifiers_.find(key);
        if (it != classifiers_.end()) return it->second;
        RunConfig data_cfg = cfg;
        data_cfg.rho = 0.0;
        ContentClassifier h =
            train_classifier(make_train_data(data_cfg), cfg.data.content_count, 97);
        return classifiers_.emplace(key, std::move(h)).first->second;
    }

    std::mutex mu_, cls_mu_;
    std::vector<Cell> pending_;
    std::map<std::string, MetricsReport> results_;
    std::map<std::string, ContentClassifier> classifiers_;
};

// ---------------------------------------------------------------------------
// Fast property criteria (7-10, 12)
// ---------------------------------------------------------------------------

struct PinnedScore : ScoreField {
    std::vector<double> zstar;
    const NoiseSchedule* sched;
    Tensor score(const Tensor& z, const Tensor&, double t) const override {
        const double s2 = sched->sigma2(t);
        std::vector<double> v(zstar.size());
        for (size_t j = 0; j < v.size(); ++j) v[j] = (zstar[j] - z.at(static_cast<int>(j))) / s2;
        return Tensor::row(v);
    }
};

void criterion7_autodiff() {
    Rng rng(5);
    double worst = 0.0;

    auto gradcheck = [&](auto&& graph, const Shape& shape, int numel) {
        std::vector<double> vals(numel);
        for (auto& v : vals) v = rng.gaussian();
        Tape tape;
        auto storage = std::make_shared<std::vector<double>>(vals);
        Tensor leaf = tape.leaf(shape, storage);
        Tensor loss = graph(leaf);
        GradMap grads = tape.backward(loss);
        const Tensor& g = grads.at(leaf.node);
        const double h = 1e-5;
        for (int j = 0; j < numel; ++j) {
            auto vp = vals, vm = vals;
            vp[j] += h;
            vm[j] -= h;
            const double fp = graph(Tensor::from_vector(shape, vp)).value();
            const double fm = graph(Tensor::from_vector(shape, vm)).value();
            const double fd = (fp - fm) / (2.0 * h);
            const double ad = (*g.data)[j];
            worst = std::max(worst,
                             std::fabs(ad - fd) / std::max(1e-6, std::fabs(ad) + std::fabs(fd)));
        }
    };

    Tensor w = Tensor::from_vector({3, 4}, [&] {
        std::vector<double> v(12);
        for (auto& x : v) x = rng.gaussian();
        return v;
    }());
    gradcheck([&](const Tensor& x) { return sum(mul(gelu(x), w)); }, {3, 4}, 12);
    gradcheck([&](const Tensor& x) { return sum(mul(softmax_rows(x), w)); }, {3, 4}, 12);
    gradcheck([&](const Tensor& x) { return sum(mul(layer_norm_rows(x), w)); }, {3, 4}, 12);
    gradcheck([&](const Tensor& x) { return mean_squared_error(x, w); }, {3, 4}, 12);
    gradcheck([&](const Tensor& x) { return sum(mul(matmul(x, transpose(x)), Tensor::full({3, 3}, 0.7))); },
              {3, 4}, 12);
    gradcheck([&](const Tensor& x) {
        std::vector<Tensor> parts{slice_rows(x, 0, 2), slice_rows(x, 1, 2)};
        return sum(mul(concat_rows(parts), Tensor::full({4, 4}, 1.3)));
    }, {3, 4}, 12);
    gradcheck([&](const Tensor& x) { return sum(scale(sub(x, w), -2.5)); }, {3, 4}, 12);
    gradcheck([&](const Tensor& x) { return sum(mul(add(x, w), w)); }, {3, 4}, 12);

    // full MHA denoiser block on a 3-token input
    DenoiserConfig dcfg;
    dcfg.blocks = 2;
    dcfg.d_model = 8;
    dcfg.n_heads = 2;
    dcfg.time_embedding = {8, 1e4};
    Denoiser model = Denoiser::init(dcfg, 17);
    Rng prng(7);
    for (auto& v : *model.params.by_name("out.w").values) v = prng.gaussian(0.0, 0.4);
    const std::vector<double> zv{0.35, -0.8}, yv{1.1, 0.4};
    auto loss_value = [&]() {
        auto b = model.bind(nullptr);
        Tensor s = b.score(Tensor::row(zv), Tensor::row(yv), 0.42);
        return sum(mul(s, s)).value();
    };
    Tape tape;
    auto binding = model.bind(&tape);
    Tensor s = binding.score(Tensor::row(zv), Tensor::row(yv), 0.42);
    GradMap grads = tape.backward(sum(mul(s, s)));
    auto named = binding.gradients(grads);
    Rng pick(19);
    const double h = 1e-5;
    for (const auto& p : model.params) {
        const Tensor& g = named.at(p.name);
        const int probes = std::min<int>(3, static_cast<int>(p.values->size()));
        for (int q = 0; q < probes; ++q) {
            const size_t j =
                static_cast<size_t>(pick.uniform_int(static_cast<int>(p.values->size())));
            const double orig = (*p.values)[j];
            (*p.values)[j] = orig + h;
            const double fp = loss_value();
            (*p.values)[j] = orig - h;
            const double fm = loss_value();
            (*p.values)[j] = orig;
            const double fd = (fp - fm) / (2.0 * h);
            const double ad = (*g.data)[j];
            worst = std::max(worst,
                             std::fabs(ad - fd) / std::max(1e-6, std::fabs(ad) + std::fabs(fd)));
        }
    }
    report(7, worst < 1e-4, fmt("max relative gradient error %.3g (< 1e-4)", worst));
}

void criterion8_analytic_scores() {
    NoiseSchedule sched;
    Rng rng(23);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const double t = rng.uniform(0.05, 0.95);
        const std::vector<double> z0{rng.gaussian(), rng.gaussian()};
        const std::vector<double> zT{rng.gaussian(), rng.gaussian()};
        const std::vector<double> zt{rng.gaussian(), rng.gaussian()};
        const double h = 1e-6;

        const double s2 = sched.sigma2(t);
        auto log_dsm = [&](const std::vector<double>& z) {
            double acc = 0.0;
            for (int j = 0; j < 2; ++j) acc -= 0.5 * (z[j] - z0[j]) * (z[j] - z0[j]) / s2;
            return acc;
        };
        const double d2 = sched.sigma2(1.0) - sched.sigma2(t);
        auto log_bridge = [&](const std::vector<double>& z) {
            double acc = 0.0;
            for (int j = 0; j < 2; ++j) acc -= 0.5 * (zT[j] - z[j]) * (zT[j] - z[j]) / d2;
            return acc;
        };
        const auto dsm = dsm_target(zt, z0, t, sched);
        const auto bridge = bridge_score_target(zt, zT, t, sched);
        for (int j = 0; j < 2; ++j) {
            auto zp = zt, zm = zt;
            zp[j] += h;
            zm[j] -= h;
            const double fd_dsm = (log_dsm(zp) - log_dsm(zm)) / (2.0 * h);
            const double fd_bridge = (log_bridge(zp) - log_bridge(zm)) / (2.0 * h);
            worst = std::max(worst, std::fabs(dsm[j] - fd_dsm) / std::max(1.0, std::fabs(fd_dsm)));
            worst = std::max(worst,
                             std::fabs(bridge[j] - fd_bridge) / std::max(1.0, std::fabs(fd_bridge)));
        }
    }
    report(8, worst < 1e-6, fmt("max relative error vs finite differences %.3g (< 1e-6)", worst));
}

void criterion9_sampler_oracle() {
    NoiseSchedule sched;
    PinnedScore field;
    field.zstar = {1.5, -0.5};
    field.sched = &sched;
    Rng rng(29);
    int hits = 0;
    for (int r = 0; r < 1000; ++r) {
        const auto out =
            sample_bridge(field, {-2.0, 2.0}, sched, 40, rng, false).final_values();
        bool inside = true;
        for (int j = 0; j < 2; ++j)
            inside = inside && std::fabs(out[j] - field.zstar[j]) <= 3.0 * sched.sigma_min;
        hits += inside ? 1 : 0;
    }
    report(9, hits >= 990, fmt("%d/1000 terminal states within 3 sigma_min (need >= 990)", hits));
}

void criterion10_metric_oracles() {
    Rng rng(31);
    bool pass = true;
    std::string detail;

    PointSet a(200, std::vector<double>(2));
    for (auto& p : a)
        for (auto& x : p) x = rng.gaussian();
    Rng prng(37);
    const double self = swd(a, a, 64, prng);
    pass = pass && self == 0.0;
    detail += fmt("swd(A,A)=%g", self);

    PointSet b(187, std::vector<double>(2));
    for (auto& p : b)
        for (auto& x : p) x = rng.gaussian(0.3, 1.0);
    auto brute = [&](const PointSet& x, const PointSet& y, double h) {
        auto k = [&](const std::vector<double>& u, const std::vector<double>& v) {
            double d2 = 0.0;
            for (size_t j = 0; j < u.size(); ++j) d2 += (u[j] - v[j]) * (u[j] - v[j]);
            return std::exp(-d2 / (2.0 * h * h));
        };
        double ta = 0, tb = 0, tc = 0;
        for (size_t i = 0; i < x.size(); ++i)
            for (size_t j = 0; j < x.size(); ++j)
                if (i != j) ta += k(x[i], x[j]);
        for (size_t i = 0; i < y.size(); ++i)
            for (size_t j = 0; j < y.size(); ++j)
                if (i != j) tb += k(y[i], y[j]);
        for (size_t i = 0; i < x.size(); ++i)
            for (size_t j = 0; j < y.size(); ++j) tc += k(x[i], y[j]);
        const double m = static_cast<double>(x.size()), n = static_cast<double>(y.size());
        return ta / (m * (m - 1)) + tb / (n * (n - 1)) - 2.0 * tc / (m * n);
    };
    const double gap = std::fabs(mmd2_rbf(a, b, 0.9) - brute(a, b, 0.9));
    pass = pass && gap <= 1e-12;
    detail += fmt("  |mmd2-brute|=%.2g", gap);

    PointSet big1(3000, std::vector<double>(2)), big2(3000, std::vector<double>(2));
    for (auto& p : big1)
        for (auto& x : p) x = rng.gaussian();
    for (auto& p : big2)
        for (auto& x : p) x = rng.gaussian();
    Rng hrng(41);
    const double null_mmd =
        mmd2_rbf(big1, big2, median_heuristic_bandwidth(big1, big2, hrng));
    pass = pass && std::fabs(null_mmd) <= 1e-3;
    detail += fmt("  null-mmd2=%.2g", null_mmd);

    RunConfig cfg;
    ContentClassifier h = train_classifier(make_train_data(cfg), cfg.data.content_count, 97);
    pass = pass && h.holdout_accuracy() >= 0.95;
    detail += fmt("  classifier-sanity=%.3f", h.holdout_accuracy());

    report(10, pass, detail);
}

void criterion11_determinism() {
    SweepSpec spec;
    spec.kind = SweepKind::Ablation;
    spec.base.rho = 0.5;
    spec.base.n_train = 256;
    spec.base.n_test = 128;
    spec.base.epochs = 2;
    spec.base.batch_size = 64;
    spec.base.cycle_batch = 1;
    spec.base.objective.traj_steps = 4;
    spec.base.schedule.t_steps = 8;
    spec.base.swd_projections = 32;
    spec.base.denoiser.blocks = 1;
    spec.base.denoiser.d_model = 16;
    spec.base.denoiser.n_heads = 2;
    spec.base.denoiser.time_embedding = {16, 1e4};
    spec.seeds_per_cell = 3;
    spec.jobs = 2;

    auto rows_a = run_sweep(spec);
    auto rows_b = run_sweep(spec);
    write_results_csv(rows_a, "/tmp/sdb_acc_cell_a.csv");
    write_results_csv(rows_b, "/tmp/sdb_acc_cell_b.csv");
    auto slurp = [](const std::string& p) {
        std::ifstream in(p);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    const bool same = slurp("/tmp/sdb_acc_cell_a.csv") == slurp("/tmp/sdb_acc_cell_b.csv");
    report(11, same, fmt("rerun of a full sweep cell: CSV %s (%zu rows)",
                         same ? "bit-identical" : "differs", rows_a.size()));
}

void criterion12_capacity_ledger() {
    NoiseSchedule sched;
    struct Zero : ScoreField {
        Tensor score(const Tensor& z, const Tensor&, double) const override {
            return Tensor::zeros(z.shape);
        }
    } field;
    Rng rng(43);
    bool pass = true;
    const int capacity = 2;
    CapacityLedger ledger(capacity);
    std::vector<std::vector<double>> pool(16, std::vector<double>{0.5, 0.5});
    const std::vector<double> z{0.0, 0.0};
    int violations = 0;
    for (int round = 0; round < 2000; ++round) {
        if (round % 131 == 0) ledger.reset();
        std::vector<int> ids;
        std::vector<const std::vector<double>*> cands;
        const int k = 1 + rng.uniform_int(6);
        for (int j = 0; j < k; ++j) {
            ids.push_back(rng.uniform_int(16));
            cands.push_back(&pool[ids.back()]);
        }
        bool alternative = false;
        for (int id : ids) alternative = alternative || !ledger.saturated(id);
        auto sel = wta_select(field, z, ids, cands, ledger, sched, 0.01, rng);
        if (alternative && ledger.count(sel.winner_id) > capacity) ++violations;
    }
    pass = violations == 0;
    report(12, pass, fmt("%d capacity violations over 2000 randomized selections", violations));
}

}  // namespace

int main() {
    std::printf("== fast property criteria ==\n");
    criterion7_autodiff();
    criterion8_analytic_scores();
    criterion9_sampler_oracle();
    criterion10_metric_oracles();
    criterion11_determinism();
    criterion12_capacity_ledger();

    std::printf("== timing (criterion 5, exclusive) ==\n");
    std::map<int, double> iter_time;
    for (int kw : {1, 2, 4, 8}) {
        Cell c;
        c.rho = 0.0;
        c.method = Method::SemiPaired;
        c.kw = kw;
        RunConfig cfg = cell_to_config(c);
        iter_time[kw] = median_iteration_seconds(cfg);
        std::printf("  K_w=%d: %.4f s/iter\n", kw, iter_time[kw]);
        std::fflush(stdout);
    }

    std::printf("== training grid ==\n");
    RunCache cache;
    std::vector<Cell> needed;
    auto need = [&](double rho, Method m, int kc = 6, int capacity = 2, int kw = 8) {
        for (uint64_t s = 1; s <= 3; ++s) {
            Cell c;
            c.rho = rho;
            c.method = m;
            c.kc = kc;
            c.capacity = capacity;
            c.kw = kw;
            c.seed = s;
            needed.push_back(c);
            cache.request(c);
        }
    };

    // criterion 1 + 3 + 5(kw=8 accuracy) + 6(kc=6 anchor)
    need(0.0, Method::MmOnly);
    need(0.0, Method::MmEnd);
    need(0.0, Method::MmTraj);
    // criterion 2 + 3
    need(0.5, Method::SemiPaired);
    need(0.5, Method::PairedOnly);
    need(1.0, Method::SemiPaired);
    need(1.0, Method::PairedOnly);
    // criterion 3 (remaining grid)
    need(0.1, Method::SemiPaired);
    need(0.1, Method::MmOnly);
    need(0.5, Method::MmOnly);
    need(1.0, Method::MmOnly);
    // criterion 4 (capacity, semi @ rho 0.5; C=2 reuses the semi cell above)
    need(0.5, Method::SemiPaired, 6, 4);
    need(0.5, Method::SemiPaired, 6, 16);
    need(0.5, Method::SemiPaired, 6, 0);
    // criterion 5 accuracy ladder (kw=8 reuses mm+traj? no: semi at rho 0)
    need(0.0, Method::SemiPaired, 6, 2, 1);
    need(0.0, Method::SemiPaired, 6, 2, 2);
    need(0.0, Method::SemiPaired, 6, 2, 4);
    need(0.0, Method::SemiPaired, 6, 2, 8);
    // criterion 6 (modes)
    need(0.0, Method::SemiPaired, 100);
    need(0.0, Method::MmOnly, 100);

    const int jobs = std::max(2u, std::thread::hardware_concurrency());
    cache.execute(std::min(jobs, 2));

    auto acc = [&](double rho, Method m, int kc = 6, int capacity = 2, int kw = 8) {
        Cell c;
        c.rho = rho;
        c.method = m;
        c.kc = kc;
        c.capacity = capacity;
        c.kw = kw;
        return cache.mean_over_seeds(c, &MetricsReport::content_accuracy);
    };
    auto cyc = [&](double rho, Method m) {
        Cell c;
        c.rho = rho;
        c.method = m;
        return cache.mean_over_seeds(c, &MetricsReport::cycle_mse);
    };
    auto swd_of = [&](double rho, Method m) {
        Cell c;
        c.rho = rho;
        c.method = m;
        return cache.mean_over_seeds(c, &MetricsReport::swd);
    };

    // criterion 1: ablation ordering at rho=0
    {
        const double a_mm = acc(0.0, Method::MmOnly);
        const double a_end = acc(0.0, Method::MmEnd);
        const double a_traj = acc(0.0, Method::MmTraj);
        const double c_mm = cyc(0.0, Method::MmOnly);
        const double c_end = cyc(0.0, Method::MmEnd);
        const double c_traj = cyc(0.0, Method::MmTraj);
        const bool pass = a_mm < a_end && a_end < a_traj && a_mm <= 0.35 && a_end >= 0.45 &&
                          a_traj >= 0.70 && c_mm > c_end && c_end > c_traj;
        report(1, pass,
               fmt("acc %.3f -> %.3f -> %.3f (bands <=0.35, >=0.45, >=0.70); cycle %.3f -> %.3f "
                   "-> %.3f",
                   a_mm, a_end, a_traj, c_mm, c_end, c_traj));
    }

    // criterion 2: semi-paired beats paired-only
    {
        const double g05 = acc(0.5, Method::SemiPaired) - acc(0.5, Method::PairedOnly);
        const double g10 = acc(1.0, Method::SemiPaired) - acc(1.0, Method::PairedOnly);
        report(2, g05 >= 0.03 && g10 >= 0.03,
               fmt("accuracy gaps: %.3f at rho=0.5, %.3f at rho=1.0 (need >= 0.03)", g05, g10));
    }

    // criterion 3: SWD stability of the full method at every rho
    {
        bool pass = true;
        std::string detail;
        const Method full_at[4] = {Method::MmTraj, Method::SemiPaired, Method::SemiPaired,
                                   Method::SemiPaired};
        const double rhos[4] = {0.0, 0.1, 0.5, 1.0};
        for (int i = 0; i < 4; ++i) {
            const double s_full = swd_of(rhos[i], full_at[i]);
            const double s_mm = swd_of(rhos[i], Method::MmOnly);
            pass = pass && s_full <= 2.0 * s_mm;
            detail += fmt("rho=%g: %.4f vs mm %.4f  ", rhos[i], s_full, s_mm);
        }
        report(3, pass, detail);
    }

    // criterion 4: capacity sensitivity
    {
        const double c2 = acc(0.5, Method::SemiPaired, 6, 2);
        const double c4 = acc(0.5, Method::SemiPaired, 6, 4);
        const double c16 = acc(0.5, Method::SemiPaired, 6, 16);
        const double cinf = acc(0.5, Method::SemiPaired, 6, 0);
        const bool pass = (c2 >= cinf + 0.01) && c2 > c16 && c4 > c16;
        report(4, pass,
               fmt("acc C2=%.3f C4=%.3f C16=%.3f Cinf=%.3f (need C2>=Cinf+0.01, {2,4}>16)", c2,
                   c4, c16, cinf));
    }

    // criterion 5: WTA cost/accuracy
    {
        bool pass = true;
        std::string detail;
        for (int k : {2, 4, 8}) {
            const double ratio = iter_time[k] / iter_time[1];
            pass = pass && ratio >= 0.7 * k && ratio <= 1.3 * k;
            detail += fmt("ratio(%d)=%.2f ", k, ratio);
        }
        const double a1 = acc(0.0, Method::SemiPaired, 6, 2, 1);
        const double a2 = acc(0.0, Method::SemiPaired, 6, 2, 2);
        const double a4 = acc(0.0, Method::SemiPaired, 6, 2, 4);
        const double a8 = acc(0.0, Method::SemiPaired, 6, 2, 8);
        pass = pass && a1 <= a2 + 1e-12 && a2 <= a4 + 1e-12 && a4 <= a8 + 1e-12;
        detail += fmt("; acc %.3f <= %.3f <= %.3f <= %.3f", a1, a2, a4, a8);
        report(5, pass, detail);
    }

    // criterion 6: K-mode robustness at K_c=100
    {
        const double full = acc(0.0, Method::SemiPaired, 100);
        const double mm = acc(0.0, Method::MmOnly, 100);
        report(6, full >= 0.55 && mm <= 0.10 && full > mm,
               fmt("K_c=100: full %.3f (>=0.55), mm-only %.3f (<=0.10)", full, mm));
    }

    std::printf("== summary: %d criterion failure(s) ==\n", g_failures);
    return g_failures;
}
