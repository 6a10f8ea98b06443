// SPDX-License-Identifier: Apache-2.0
#include "sdb/bridge.hpp"

#include <cmath>

#include "sdb/errors.hpp"

namespace sdb {

double NoiseSchedule::sigma(double t) const {
    if (t < 0.0 || t > 1.0) throw DomainError("sigma: t outside [0,1]");
    return sigma_min * std::pow(sigma_max / sigma_min, t);
}

double NoiseSchedule::g2(double t) const {
    return 2.0 * std::log(sigma_max / sigma_min) * sigma2(t);
}

std::vector<double> corrupt_with(const std::vector<double>& z0, double t,
                                 const NoiseSchedule& sched, const std::vector<double>& xi) {
    if (t <= 0.0 || t > 1.0) throw DomainError("corrupt: t outside (0,1]");
    const double s = sched.sigma(t);
    std::vector<double> out(z0.size());
    for (size_t j = 0; j < z0.size(); ++j) out[j] = z0[j] + s * xi[j];
    return out;
}

std::vector<double> corrupt(const std::vector<double>& z0, double t, const NoiseSchedule& sched,
                            Rng& rng) {
    std::vector<double> xi(z0.size());
    for (auto& x : xi) x = rng.gaussian();
    return corrupt_with(z0, t, sched, xi);
}

std::vector<double> dsm_target(const std::vector<double>& z_t, const std::vector<double>& z0,
                               double t, const NoiseSchedule& sched) {
    if (t <= 0.0) throw DomainError("dsm-target: singular at t=0");
    if (t > 1.0) throw DomainError("dsm-target: t outside (0,1]");
    const double s2 = sched.sigma2(t);
    std::vector<double> out(z_t.size());
    for (size_t j = 0; j < z_t.size(); ++j) out[j] = (z0[j] - z_t[j]) / s2;
    return out;
}

std::vector<double> bridge_score_target(const std::vector<double>& z_t,
                                        const std::vector<double>& z_terminal, double t,
                                        const NoiseSchedule& sched) {
    if (t >= 1.0) throw DomainError("bridge-score-target: singular at t=1");
    if (t < 0.0) throw DomainError("bridge-score-target: t outside [0,1)");
    const double denom = sched.sigma2(1.0) - sched.sigma2(t);
    std::vector<double> out(z_t.size());
    for (size_t j = 0; j < z_t.size(); ++j) out[j] = (z_terminal[j] - z_t[j]) / denom;
    return out;
}

Trajectory sample_bridge(const ScoreField& field, const std::vector<double>& condition,
                         const NoiseSchedule& sched, int n_steps, Rng& rng, bool record,
                         BridgeDir direction) {
    if (n_steps < 1) throw ConfigError("sample_bridge: n_steps must be positive");
    const int d = static_cast<int>(condition.size());
    const double dt = 1.0 / n_steps;

    Tensor y = Tensor::row(condition);
    std::vector<double> init(condition);
    for (int j = 0; j < d; ++j) init[j] += sched.sigma_max * rng.gaussian();
    Tensor z = Tensor::from_vector({1, d}, init);

    Trajectory traj;
    traj.direction = direction;
    if (record) {
        traj.states.push_back(z);
        traj.times.push_back(1.0);
    }

    for (int i = 0; i < n_steps; ++i) {
        const double t_next = static_cast<double>(n_steps - (i + 1)) / n_steps;
        const double g2 = sched.g2(t_next);
        std::vector<double> noise(d);
        const double nscale = std::sqrt(g2 * dt);
        for (int j = 0; j < d; ++j) noise[j] = nscale * rng.gaussian();
        try {
            Tensor s = field.score(z, y, t_next);
            z = add(add(z, scale(s, g2 * dt)), Tensor::from_vector({1, d}, noise));
        } catch (const NumericError& e) {
            throw DivergenceError(std::string("sample_bridge: ") + e.what(), i);
        }
        if (record) {
            traj.states.push_back(z);
            traj.times.push_back(t_next);
        }
    }
    if (!record) {
        traj.states.push_back(z);
        traj.times.push_back(0.0);
    }
    return traj;
}

}  // namespace sdb
