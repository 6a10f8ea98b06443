// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <unordered_map>
#include <vector>

#include "sdb/bridge.hpp"
#include "sdb/rng.hpp"
#include "sdb/tensor.hpp"

namespace sdb {

struct ObjectiveConfig {
    double lambda_end = 1.0;
    double lambda_traj = 1.0;
    double lambda_pair = 1.0;
    int wta_candidates = 8;  // K_w
    int capacity = 2;        // C_y; <= 0 means unlimited
    int traj_steps = 10;     // training-time trajectory discretization
    double eps_w = 1e-4;     // stabilizer of w(t) = 1/(sigma_t^2 + eps)
    double t_min = 0.01;     // lower bound of the corruption-time draw
};

// Per-epoch selection counts per conditioning-sample identity. The training
// loop resets it at epoch boundaries.
class CapacityLedger {
public:
    explicit CapacityLedger(int capacity) : capacity_(capacity) {}

    void reset() { counts_.clear(); }
    int capacity() const { return capacity_; }
    bool unlimited() const { return capacity_ <= 0; }
    int count(int id) const {
        auto it = counts_.find(id);
        return it == counts_.end() ? 0 : it->second;
    }
    bool saturated(int id) const { return !unlimited() && count(id) >= capacity_; }
    void note_selection(int id) { ++counts_[id]; }
    void flag_saturation_event() { ++saturation_events_; }
    int saturation_events() const { return saturation_events_; }

private:
    int capacity_;
    std::unordered_map<int, int> counts_;
    int saturation_events_ = 0;
};

// One corruption draw (time and unit noise), shared across WTA candidates so
// the argmin is a paired comparison.
struct CorruptionDraw {
    double t;
    std::vector<double> xi;
};

CorruptionDraw draw_corruption(int dim, double t_min, Rng& rng);

// || s(z_t, t | y) - (z_tgt - z_t)/sigma_t^2 ||^2 at a fixed draw.
Tensor dsm_loss_at(const ScoreField& field, const std::vector<double>& z_tgt,
                   const std::vector<double>& y, const NoiseSchedule& sched,
                   const CorruptionDraw& draw);

Tensor dsm_loss(const ScoreField& field, const std::vector<double>& z_tgt,
                const std::vector<double>& y, const NoiseSchedule& sched, double t_min,
                Rng& rng);

struct WtaSelection {
    int winner_index = -1;    // position in the candidate list
    int winner_id = -1;       // stable condition-sample identity
    Tensor loss;              // the winner's loss; gradients flow only through it
    bool capacity_ignored = false;
};

// Evaluates the DSM loss per candidate under one shared corruption draw,
// excludes candidates whose ledger count is at capacity, and returns the
// argmin among the rest (ties broken by lowest index). If every candidate is
// saturated, falls back to the global argmin and flags the event. Every
// candidate is evaluated through the field, so the recorded-graph cost is
// linear in the candidate count.
WtaSelection wta_select(const ScoreField& field, const std::vector<double>& z_tgt,
                        const std::vector<int>& candidate_ids,
                        const std::vector<const std::vector<double>*>& candidates,
                        CapacityLedger& ledger, const NoiseSchedule& sched, double t_min,
                        Rng& rng);

// Round trip source -> (frozen first leg) -> (trained second leg) -> source.
// Returns ||z_hat - source||^2; the first leg is sampled without gradients.
// When record is true both trajectories are exposed for the trajectory loss.
Tensor cycle_endpoint_loss(const ScoreField& frozen_first, const ScoreField& trained_second,
                           const std::vector<double>& source, const NoiseSchedule& sched,
                           int traj_steps, Rng& rng, bool record = false,
                           Trajectory* first_out = nullptr, Trajectory* second_out = nullptr);

// Mean over grid points of w(t) ||first(t) - second(1-t)||^2 with
// w(t) = 1/(sigma_t^2 + eps), t taken on the first trajectory's clock.
Tensor cycle_trajectory_loss(const Trajectory& first, const Trajectory& second,
                             const NoiseSchedule& sched, double eps_w);

// Score matching toward the analytic bridge target between a true pair. The
// conditioning endpoint is lifted to its t=1 state reusing the corruption
// noise; time is drawn away from both schedule singularities.
Tensor paired_loss_at(const ScoreField& field, const std::vector<double>& z_tgt,
                      const std::vector<double>& z_src_cond, bool paired,
                      const NoiseSchedule& sched, double t, const std::vector<double>& xi);
Tensor paired_loss(const ScoreField& field, const std::vector<double>& z_tgt,
                   const std::vector<double>& z_src_cond, bool paired,
                   const NoiseSchedule& sched, double t_min, Rng& rng);

struct BatchItem {
    const std::vector<double>* target = nullptr;     // corrupted side
    const std::vector<double>* true_cond = nullptr;  // opposite endpoint
    bool paired = false;
};

struct TotalLossInputs {
    const ScoreField* trained = nullptr;  // direction receiving gradients
    const ScoreField* frozen = nullptr;   // opposite direction, held constant
    std::vector<BatchItem> items;
    // opposite-side endpoints indexed by stable identity, the WTA pool
    const std::vector<std::vector<double>>* condition_pool = nullptr;
    std::vector<const std::vector<double>*> cycle_sources;
    bool use_pairing = true;  // false routes every sample through WTA
};

struct TotalLossResult {
    Tensor total;
    double dsm = 0.0;         // weighted contributions; they sum to total
    double cycle_end = 0.0;
    double cycle_traj = 0.0;
    double pair = 0.0;
    int saturation_events = 0;
};

// L_total = L_DSM + l_end L_end + l_traj L_traj + l_pair 1[paired] L_pair.
// Every sample contributes DSM (paired samples with their true condition,
// unpaired ones through WTA); the paired term is indicator-gated per sample.
TotalLossResult total_loss(const TotalLossInputs& in, CapacityLedger& ledger,
                           const NoiseSchedule& sched, const ObjectiveConfig& cfg, Rng& rng);

}  // namespace sdb
