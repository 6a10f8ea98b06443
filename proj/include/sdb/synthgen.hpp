// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdb/rng.hpp"

namespace sdb {

struct GeneratorConfig {
    int content_count = 6;   // K_c
    int style_count = 3;     // S
    int latent_dim = 2;      // d
    double noise_std = 0.05; // sigma_data
    double warp_alpha = 0.1; // alpha of phi(z) = z + alpha z^3
    uint64_t seed = 1;
};

// Frozen draw of the benchmark's latent factors: content means on a circle
// (one rotation offset per side) and per-style linear maps with spectral
// norm <= 1. The circle radius grows once K_c packs classes tighter than
// the sample noise can keep apart, and the style amplitude shrinks with the
// class spacing, so the content classifier stays calibratable at every K_c.
struct GeneratorSpec {
    GeneratorConfig config;
    double radius = 3.0;
    double style_scale = 1.0;  // extra shrink applied on top of the norm rescale
    std::vector<std::vector<double>> mean_src;   // K_c vectors of dim d
    std::vector<std::vector<double>> mean_tgt;
    std::vector<std::vector<double>> style_src;  // S row-major d*d matrices (A_s)
    std::vector<std::vector<double>> style_tgt;  // (B_s)
};

struct EndpointSample {
    std::vector<double> z_src;  // conditioning endpoint
    std::vector<double> z_tgt;  // denoised endpoint of the bridge
    int content = 0;
    int style = 0;
    bool paired = false;
};

struct Dataset {
    std::vector<EndpointSample> samples;
    double rho = 0.0;
};

GeneratorSpec build_generator(const GeneratorConfig& config);

// Low-level draw with all latent factors pinned; sample() composes this.
EndpointSample sample_with_latents(const GeneratorSpec& spec, int content, int style,
                                   const std::vector<double>& u,
                                   const std::vector<double>& eps_src,
                                   const std::vector<double>& eps_tgt);

std::vector<EndpointSample> sample(const GeneratorSpec& spec, int n, Rng& rng);

// Flags exactly floor(rho*N) samples as paired, chosen uniformly; preserves
// sample order.
Dataset assign_pairing(std::vector<EndpointSample> samples, double rho, Rng& rng);

// CSV schema: z_src_0..z_src_{d-1},z_tgt_0..,content,style,paired with
// 17-significant-digit floats.
void write_csv(const Dataset& dataset, const std::string& path);
Dataset read_csv(const std::string& path);

// Largest singular value by power iteration on M^T M (row-major d x d).
double spectral_norm(const std::vector<double>& m, int d);

double warp(double z, double alpha);

}  // namespace sdb
