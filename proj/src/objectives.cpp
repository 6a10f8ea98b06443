// SPDX-License-Identifier: Apache-2.0
#include "sdb/objectives.hpp"

#include <cmath>

#include "sdb/errors.hpp"

namespace sdb {

namespace {

Tensor squared_norm(const Tensor& diff) { return sum(mul(diff, diff)); }

}  // namespace

CorruptionDraw draw_corruption(int dim, double t_min, Rng& rng) {
    CorruptionDraw d;
    d.t = rng.uniform(t_min, 1.0);
    d.xi.resize(dim);
    for (auto& x : d.xi) x = rng.gaussian();
    return d;
}

Tensor dsm_loss_at(const ScoreField& field, const std::vector<double>& z_tgt,
                   const std::vector<double>& y, const NoiseSchedule& sched,
                   const CorruptionDraw& draw) {
    const auto z_t = corrupt_with(z_tgt, draw.t, sched, draw.xi);
    const auto target = dsm_target(z_t, z_tgt, draw.t, sched);
    Tensor s = field.score(Tensor::row(z_t), Tensor::row(y), draw.t);
    return squared_norm(sub(s, Tensor::row(target)));
}

Tensor dsm_loss(const ScoreField& field, const std::vector<double>& z_tgt,
                const std::vector<double>& y, const NoiseSchedule& sched, double t_min,
                Rng& rng) {
    return dsm_loss_at(field, z_tgt, y, sched,
                       draw_corruption(static_cast<int>(z_tgt.size()), t_min, rng));
}

WtaSelection wta_select(const ScoreField& field, const std::vector<double>& z_tgt,
                        const std::vector<int>& candidate_ids,
                        const std::vector<const std::vector<double>*>& candidates,
                        CapacityLedger& ledger, const NoiseSchedule& sched, double t_min,
                        Rng& rng) {
    if (candidates.empty() || candidates.size() != candidate_ids.size())
        throw ContractError("wta_select: candidate list empty or misaligned");

    const CorruptionDraw draw =
        draw_corruption(static_cast<int>(z_tgt.size()), t_min, rng);

    std::vector<Tensor> losses;
    losses.reserve(candidates.size());
    for (const auto* y : candidates) losses.push_back(dsm_loss_at(field, z_tgt, *y, sched, draw));

    int best = -1, best_any = 0;
    for (size_t k = 0; k < losses.size(); ++k) {
        if (losses[k].value() < losses[best_any].value()) best_any = static_cast<int>(k);
        if (ledger.saturated(candidate_ids[k])) continue;
        if (best < 0 || losses[k].value() < losses[best].value()) best = static_cast<int>(k);
    }

    WtaSelection sel;
    if (best < 0) {  // every candidate saturated: ignore capacity, flag it
        sel.capacity_ignored = true;
        ledger.flag_saturation_event();
        best = best_any;
    }
    sel.winner_index = best;
    sel.winner_id = candidate_ids[best];
    sel.loss = losses[best];
    ledger.note_selection(sel.winner_id);
    return sel;
}

Tensor cycle_endpoint_loss(const ScoreField& frozen_first, const ScoreField& trained_second,
                           const std::vector<double>& source, const NoiseSchedule& sched,
                           int traj_steps, Rng& rng, bool record, Trajectory* first_out,
                           Trajectory* second_out) {
    Trajectory first =
        sample_bridge(frozen_first, source, sched, traj_steps, rng, record);
    Trajectory second =
        sample_bridge(trained_second, first.final_values(), sched, traj_steps, rng, record);
    Tensor loss = squared_norm(sub(second.final_state(), Tensor::row(source)));
    if (first_out != nullptr) *first_out = std::move(first);
    if (second_out != nullptr) *second_out = std::move(second);
    return loss;
}

Tensor cycle_trajectory_loss(const Trajectory& first, const Trajectory& second,
                             const NoiseSchedule& sched, double eps_w) {
    if (first.states.size() != second.states.size() || first.states.size() < 2)
        throw ContractError("cycle_trajectory_loss: trajectory length mismatch");
    const size_t n = first.states.size() - 1;
    Tensor acc = Tensor::scalar(0.0);
    for (size_t i = 0; i <= n; ++i) {
        const double w = 1.0 / (sched.sigma2(first.times[i]) + eps_w);
        Tensor term = squared_norm(sub(first.states[i], second.states[n - i]));
        acc = add(acc, scale(term, w));
    }
    return scale(acc, 1.0 / static_cast<double>(n + 1));
}

Tensor paired_loss_at(const ScoreField& field, const std::vector<double>& z_tgt,
                      const std::vector<double>& z_src_cond, bool paired,
                      const NoiseSchedule& sched, double t, const std::vector<double>& xi) {
    if (!paired) throw ContractError("paired_loss: sample is not paired");
    const auto z_t = corrupt_with(z_tgt, t, sched, xi);
    // conditioning endpoint lifted to its t=1 state, reusing the same noise
    std::vector<double> z_term(z_src_cond.size());
    for (size_t j = 0; j < z_term.size(); ++j)
        z_term[j] = z_src_cond[j] + sched.sigma_max * xi[j];
    const auto target = bridge_score_target(z_t, z_term, t, sched);
    Tensor s = field.score(Tensor::row(z_t), Tensor::row(z_src_cond), t);
    return squared_norm(sub(s, Tensor::row(target)));
}

Tensor paired_loss(const ScoreField& field, const std::vector<double>& z_tgt,
                   const std::vector<double>& z_src_cond, bool paired,
                   const NoiseSchedule& sched, double t_min, Rng& rng) {
    if (!paired) throw ContractError("paired_loss: sample is not paired");
    // keep the bridge target away from its t=1 singularity
    const double t = rng.uniform(t_min, 1.0 - t_min);
    std::vector<double> xi(z_tgt.size());
    for (auto& x : xi) x = rng.gaussian();
    return paired_loss_at(field, z_tgt, z_src_cond, paired, sched, t, xi);
}

TotalLossResult total_loss(const TotalLossInputs& in, CapacityLedger& ledger,
                           const NoiseSchedule& sched, const ObjectiveConfig& cfg, Rng& rng) {
    if (in.trained == nullptr) throw ContractError("total_loss: no trained field");

    TotalLossResult out;
    out.saturation_events = ledger.saturation_events();

    Tensor dsm_sum = Tensor::scalar(0.0);
    Tensor pair_sum = Tensor::scalar(0.0);
    const int n_items = static_cast<int>(in.items.size());

    for (const BatchItem& item : in.items) {
        const bool treat_paired = item.paired && in.use_pairing;
        if (treat_paired) {
            dsm_sum = add(dsm_sum,
                          dsm_loss(*in.trained, *item.target, *item.true_cond, sched,
                                   cfg.t_min, rng));
            if (cfg.lambda_pair > 0.0) {
                pair_sum = add(pair_sum,
                               paired_loss(*in.trained, *item.target, *item.true_cond, true,
                                           sched, cfg.t_min, rng));
            }
        } else {
            if (in.condition_pool == nullptr || in.condition_pool->empty())
                throw ContractError("total_loss: WTA requires a condition pool");
            const int pool = static_cast<int>(in.condition_pool->size());
            std::vector<int> ids(cfg.wta_candidates);
            std::vector<const std::vector<double>*> cands(cfg.wta_candidates);
            for (int k = 0; k < cfg.wta_candidates; ++k) {
                ids[k] = rng.uniform_int(pool);
                cands[k] = &(*in.condition_pool)[ids[k]];
            }
            WtaSelection sel = wta_select(*in.trained, *item.target, ids, cands, ledger,
                                          sched, cfg.t_min, rng);
            dsm_sum = add(dsm_sum, sel.loss);
        }
    }

    Tensor total = Tensor::scalar(0.0);
    if (n_items > 0) {
        Tensor dsm_term = scale(dsm_sum, 1.0 / n_items);
        out.dsm = dsm_term.value();
        total = add(total, dsm_term);
        if (cfg.lambda_pair > 0.0) {
            Tensor pair_term = scale(pair_sum, cfg.lambda_pair / n_items);
            out.pair = pair_term.value();
            total = add(total, pair_term);
        }
    }

    const bool want_end = cfg.lambda_end > 0.0;
    const bool want_traj = cfg.lambda_traj > 0.0;
    if ((want_end || want_traj) && !in.cycle_sources.empty()) {
        if (in.frozen == nullptr) throw ContractError("total_loss: cycle losses need both bridges");
        Tensor end_sum = Tensor::scalar(0.0);
        Tensor traj_sum = Tensor::scalar(0.0);
        for (const auto* src : in.cycle_sources) {
            Trajectory first, second;
            Tensor end = cycle_endpoint_loss(*in.frozen, *in.trained, *src, sched,
                                             cfg.traj_steps, rng, want_traj, &first, &second);
            if (want_end) end_sum = add(end_sum, end);
            if (want_traj)
                traj_sum = add(traj_sum, cycle_trajectory_loss(first, second, sched, cfg.eps_w));
        }
        const double inv = 1.0 / static_cast<double>(in.cycle_sources.size());
        if (want_end) {
            Tensor end_term = scale(end_sum, cfg.lambda_end * inv);
            out.cycle_end = end_term.value();
            total = add(total, end_term);
        }
        if (want_traj) {
            Tensor traj_term = scale(traj_sum, cfg.lambda_traj * inv);
            out.cycle_traj = traj_term.value();
            total = add(total, traj_term);
        }
    }

    out.total = total;
    out.saturation_events = ledger.saturation_events() - out.saturation_events;
    return out;
}

}  // namespace sdb
