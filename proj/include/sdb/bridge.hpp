// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "sdb/rng.hpp"
#include "sdb/tensor.hpp"

namespace sdb {

// Geometric variance-exploding schedule: sigma(t) = smin * (smax/smin)^t on
// t in [0,1]. g(t)^2 = d(sigma^2)/dt.
struct NoiseSchedule {
    double sigma_min = 0.01;
    double sigma_max = 1.0;
    int t_steps = 40;  // inference discretization

    double sigma(double t) const;
    double sigma2(double t) const { return sigma(t) * sigma(t); }
    double g2(double t) const;
};

enum class BridgeDir { SrcToTgt, TgtToSrc };

// States of one sampled bridge, indexed by diffusion time. A recorded
// trajectory holds n_steps+1 states on the uniform grid t = 1, 1-dt, ..., 0;
// an unrecorded one keeps only the terminal state.
struct Trajectory {
    std::vector<Tensor> states;
    std::vector<double> times;
    BridgeDir direction = BridgeDir::SrcToTgt;

    const Tensor& final_state() const { return states.back(); }
    std::vector<double> final_values() const { return *states.back().data; }
};

// A conditional score s(z_t, t | y). Implementations: the MHA denoiser
// (bound to a tape for training, or tape-free for sampling) and analytic
// oracles in tests. z and y are (1,d) rows; the result is a (1,d) row.
class ScoreField {
public:
    virtual ~ScoreField() = default;
    virtual Tensor score(const Tensor& z, const Tensor& y, double t) const = 0;
};

// z_t = z_0 + sigma(t) * xi with the given noise.
std::vector<double> corrupt_with(const std::vector<double>& z0, double t,
                                 const NoiseSchedule& sched, const std::vector<double>& xi);
std::vector<double> corrupt(const std::vector<double>& z0, double t, const NoiseSchedule& sched,
                            Rng& rng);

// grad_{z_t} log N(z_t; z_0, sigma_t^2 I) = (z_0 - z_t) / sigma_t^2. t in (0,1].
std::vector<double> dsm_target(const std::vector<double>& z_t, const std::vector<double>& z0,
                               double t, const NoiseSchedule& sched);

// grad_{z_t} log N(z_T; z_t, (sigma_T^2 - sigma_t^2) I)
//   = (z_T - z_t) / (sigma(1)^2 - sigma(t)^2). t in [0,1).
std::vector<double> bridge_score_target(const std::vector<double>& z_t,
                                        const std::vector<double>& z_terminal, double t,
                                        const NoiseSchedule& sched);

// Euler-Maruyama integration of the reverse SDE
//   dz = -g(t)^2 s(z, t | y) dt + g(t) dw,   t: 1 -> 0,
// initialized at z(1) = y + sigma_max * xi. Score and g are evaluated at the
// destination time of each step, so the score is never queried at t = 1.
// Throws DivergenceError (with the step index) if the state leaves the
// finite range. States stay connected to the score field's tape, so a bound
// denoiser makes the whole path differentiable.
Trajectory sample_bridge(const ScoreField& field, const std::vector<double>& condition,
                         const NoiseSchedule& sched, int n_steps, Rng& rng, bool record,
                         BridgeDir direction = BridgeDir::SrcToTgt);

}  // namespace sdb
