// SPDX-License-Identifier: Apache-2.0
#include "sdb/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sdb/errors.hpp"

namespace sdb {

namespace {

// Class spacing floor that keeps adjacent content clusters ~4.4 sigma apart
// for the default noise_std, so the classifier sanity bound stays reachable
// as K_c grows.
constexpr double kMinChord = 0.26;

double chord(double radius, int k) { return 2.0 * radius * std::sin(M_PI / std::max(2, k)); }

std::vector<double> matvec(const std::vector<double>& m, const std::vector<double>& v, int d) {
    std::vector<double> out(d, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out[i] += m[static_cast<size_t>(i) * d + j] * v[j];
    return out;
}

}  // namespace

double warp(double z, double alpha) { return z + alpha * z * z * z; }

double spectral_norm(const std::vector<double>& m, int d) {
    std::vector<double> v(d, 1.0 / std::sqrt(static_cast<double>(d)));
    double norm = 0.0;
    for (int it = 0; it < 200; ++it) {
        // w = M^T (M v)
        std::vector<double> mv = matvec(m, v, d);
        std::vector<double> w(d, 0.0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) w[j] += m[static_cast<size_t>(i) * d + j] * mv[i];
        double len = 0.0;
        for (double x : w) len += x * x;
        len = std::sqrt(len);
        if (len == 0.0) return 0.0;
        for (int j = 0; j < d; ++j) v[j] = w[j] / len;
        norm = std::sqrt(len);
    }
    return norm;
}

GeneratorSpec build_generator(const GeneratorConfig& config) {
    if (config.content_count < 1 || config.style_count < 1 || config.latent_dim < 1)
        throw ConfigError("build_generator: counts and dimension must be positive");
    if (config.noise_std < 0.0 || config.warp_alpha < 0.0)
        throw ConfigError("build_generator: noise_std and warp_alpha must be nonnegative");

    GeneratorSpec spec;
    spec.config = config;
    const int kc = config.content_count;
    const int d = config.latent_dim;

    spec.radius = 3.0;
    if (kc > 1 && chord(spec.radius, kc) < kMinChord)
        spec.radius = kMinChord / (2.0 * std::sin(M_PI / kc));
    spec.style_scale =
        std::min(1.0, chord(spec.radius, std::max(kc, 2)) / chord(3.0, 6));

    Rng rng(config.seed);
    const double offset_src = rng.uniform(0.0, 2.0 * M_PI);
    const double offset_tgt = rng.uniform(0.0, 2.0 * M_PI);
    auto place = [&](double offset, int c) {
        std::vector<double> mu(d, 0.0);
        const double angle = offset + 2.0 * M_PI * c / kc;
        mu[0] = spec.radius * std::cos(angle);
        if (d >= 2) mu[1] = spec.radius * std::sin(angle);
        return mu;
    };
    for (int c = 0; c < kc; ++c) {
        spec.mean_src.push_back(place(offset_src, c));
        spec.mean_tgt.push_back(place(offset_tgt, c));
    }

    auto draw_style = [&]() {
        std::vector<double> m(static_cast<size_t>(d) * d);
        const double entry_std = 1.0 / std::sqrt(static_cast<double>(d));
        for (auto& x : m) x = rng.gaussian(0.0, entry_std);
        const double norm = spectral_norm(m, d);
        const double rescale = spec.style_scale / std::max(1.0, norm);
        for (auto& x : m) x *= rescale;
        return m;
    };
    for (int s = 0; s < config.style_count; ++s) {
        spec.style_src.push_back(draw_style());
        spec.style_tgt.push_back(draw_style());
    }
    return spec;
}

EndpointSample sample_with_latents(const GeneratorSpec& spec, int content, int style,
                                   const std::vector<double>& u,
                                   const std::vector<double>& eps_src,
                                   const std::vector<double>& eps_tgt) {
    const int d = spec.config.latent_dim;
    EndpointSample out;
    out.content = content;
    out.style = style;
    out.z_src = matvec(spec.style_src[style], u, d);
    out.z_tgt = matvec(spec.style_tgt[style], u, d);
    for (int j = 0; j < d; ++j) {
        out.z_src[j] = warp(spec.mean_src[content][j] + out.z_src[j] + eps_src[j],
                            spec.config.warp_alpha);
        out.z_tgt[j] = warp(spec.mean_tgt[content][j] + out.z_tgt[j] + eps_tgt[j],
                            spec.config.warp_alpha);
    }
    return out;
}

std::vector<EndpointSample> sample(const GeneratorSpec& spec, int n, Rng& rng) {
    if (n < 1) throw ConfigError("sample: n must be positive");
    const int d = spec.config.latent_dim;
    std::vector<EndpointSample> out;
    out.reserve(n);
    std::vector<double> u(d), e0(d), eT(d);
    for (int i = 0; i < n; ++i) {
        const int c = rng.uniform_int(spec.config.content_count);
        const int s = rng.uniform_int(spec.config.style_count);
        for (int j = 0; j < d; ++j) {
            u[j] = rng.gaussian();
            e0[j] = rng.gaussian(0.0, spec.config.noise_std);
            eT[j] = rng.gaussian(0.0, spec.config.noise_std);
        }
        out.push_back(sample_with_latents(spec, c, s, u, e0, eT));
    }
    return out;
}

Dataset assign_pairing(std::vector<EndpointSample> samples, double rho, Rng& rng) {
    if (rho < 0.0 || rho > 1.0) throw ConfigError("assign_pairing: rho must be in [0,1]");
    const int n = static_cast<int>(samples.size());
    const int n_paired = static_cast<int>(std::floor(rho * n));
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    for (int i = 0; i < n_paired; ++i) {
        const int j = i + rng.uniform_int(n - i);
        std::swap(order[i], order[j]);
    }
    for (auto& s : samples) s.paired = false;
    for (int i = 0; i < n_paired; ++i) samples[order[i]].paired = true;
    Dataset out;
    out.samples = std::move(samples);
    out.rho = rho;
    return out;
}

void write_csv(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_csv: cannot open " + path);
    if (dataset.samples.empty()) throw ConfigError("write_csv: empty dataset");
    const int d = static_cast<int>(dataset.samples[0].z_src.size());
    for (int j = 0; j < d; ++j) out << "z_src_" << j << ',';
    for (int j = 0; j < d; ++j) out << "z_tgt_" << j << ',';
    out << "content,style,paired\n";
    char buf[40];
    for (const auto& s : dataset.samples) {
        for (int j = 0; j < d; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", s.z_src[j]);
            out << buf << ',';
        }
        for (int j = 0; j < d; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", s.z_tgt[j]);
            out << buf << ',';
        }
        out << s.content << ',' << s.style << ',' << (s.paired ? 1 : 0) << '\n';
    }
}

Dataset read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("read_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("read_csv: missing header");
    int d = 0;
    {
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ','))
            if (col.rfind("z_src_", 0) == 0) ++d;
    }
    if (d == 0) throw ConfigError("read_csv: malformed header");
    Dataset out;
    int paired_count = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        EndpointSample s;
        s.z_src.resize(d);
        s.z_tgt.resize(d);
        for (int j = 0; j < d; ++j) {
            std::getline(ss, cell, ',');
            s.z_src[j] = std::stod(cell);
        }
        for (int j = 0; j < d; ++j) {
            std::getline(ss, cell, ',');
            s.z_tgt[j] = std::stod(cell);
        }
        std::getline(ss, cell, ',');
        s.content = std::stoi(cell);
        std::getline(ss, cell, ',');
        s.style = std::stoi(cell);
        std::getline(ss, cell, ',');
        s.paired = std::stoi(cell) != 0;
        paired_count += s.paired ? 1 : 0;
        out.samples.push_back(std::move(s));
    }
    out.rho = out.samples.empty() ? 0.0
                                  : static_cast<double>(paired_count) / out.samples.size();
    return out;
}

}  // namespace sdb
