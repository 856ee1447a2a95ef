/*
 * Copyright (C) 2026 The Promist Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cmath>
#include <vector>

#include "promist/filter.hpp"
#include "promist/synthetic.hpp"

namespace promist {

/// Radially averaged profile of one channel around the image center.
/// Bin i holds the mean over samples whose rounded center distance is i,
/// out to the largest fully contained radius.
inline std::vector<double> radial_profile(const LinearImage& img, int channel = 0) {
    validate(img);
    if (channel < 0 || channel >= kChannels)
        throw ParameterError("radial profile channel out of range");
    const int cx = img.width / 2;
    const int cy = img.height / 2;
    const int rmax = std::min(img.width, img.height) / 2;
    std::vector<double> sum(rmax + 1, 0.0);
    std::vector<long long> count(rmax + 1, 0);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const double d = std::hypot(static_cast<double>(x - cx), static_cast<double>(y - cy));
            const int r = static_cast<int>(std::lround(d));
            if (r > rmax) continue;
            sum[r] += img.at(x, y, channel);
            ++count[r];
        }
    std::vector<double> prof(rmax + 1, 0.0);
    for (int r = 0; r <= rmax; ++r)
        if (count[r] > 0) prof[r] = sum[r] / static_cast<double>(count[r]);
    return prof;
}

/// Weighted blur stack response without the unfiltered pass-through term:
/// sum_k w_k * blur(img, sigma_k). This is the light actually redistributed
/// by the filter; the (1 - alpha) core would otherwise swamp any halo-extent
/// measurement.
inline LinearImage scatter_response(const LinearImage& img, const BlurStack& stack, int threads = 1) {
    validate(img);
    validate(stack);
    std::vector<double> acc(img.sample_count(), 0.0);
    for (const BlurLayer& l : stack.layers) {
        const LinearImage b = blur(img, l.sigma, threads);
        for (std::size_t i = 0; i < acc.size(); ++i)
            acc[i] += l.weight * b.data[i];
    }
    LinearImage out;
    out.width = img.width;
    out.height = img.height;
    out.data.resize(img.sample_count());
    for (std::size_t i = 0; i < acc.size(); ++i)
        out.data[i] = static_cast<float>(acc[i]);
    return out;
}

/// Halo extent of a configuration: radius at which the radially averaged
/// scattered impulse response first drops below 1% of its central value.
/// Measured on an odd square canvas with the impulse at the center.
inline int halo_radius(const FilterConfig& cfg, int canvas = 257, int threads = 1) {
    const LinearImage imp = impulse_image(canvas);
    const BlurStack stack = derive_params(cfg, canvas);
    const LinearImage halo = scatter_response(imp, stack, threads);
    const std::vector<double> prof = radial_profile(halo);
    const double cutoff = 0.01 * prof[0];
    for (std::size_t r = 0; r < prof.size(); ++r)
        if (prof[r] < cutoff) return static_cast<int>(r);
    return static_cast<int>(prof.size());
}

/// Densely sampled stack covering the same sigma span as cfg's discrete
/// layers: dense_layers geometric steps from sigma_0 to sigma_{L-1}, with
/// weights following the same geometric law in log-sigma. Serves as the
/// quasi-continuous reference the discrete stacks are compared against.
inline BlurStack dense_reference_stack(const FilterConfig& cfg, int image_width,
                                       int dense_layers = 32) {
    validate(cfg);
    if (cfg.layer_count < 2)
        throw ParameterError("dense reference needs a config with >= 2 layers");
    if (dense_layers < 2)
        throw ParameterError("dense reference needs >= 2 layers");
    const BlurStack base = derive_params(cfg, image_width);
    const double sigma0 = base.layers.front().sigma;
    const double octaves = static_cast<double>(cfg.layer_count - 1);
    const double ratio = cfg.weight_ratio ? *cfg.weight_ratio : weight_ratio_for_density(cfg.density);
    const double ln_ratio = std::log(ratio);

    BlurStack dense;
    dense.alpha = base.alpha;
    dense.layers.resize(dense_layers);
    double wsum = 0.0;
    for (int j = 0; j < dense_layers; ++j) {
        const double t = octaves * static_cast<double>(j) / (dense_layers - 1);
        dense.layers[j].sigma = sigma0 * std::exp2(t);
        dense.layers[j].weight = std::exp(ln_ratio * t);
        wsum += dense.layers[j].weight;
    }
    for (auto& l : dense.layers) l.weight /= wsum;
    return dense;
}

/// Radially averaged full impulse response of cfg restricted to layer_count
/// layers.
inline std::vector<double> layer_profile(FilterConfig cfg, int layer_count,
                                         int canvas = 257, int threads = 1) {
    cfg.layer_count = layer_count;
    const LinearImage imp = impulse_image(canvas);
    const BlurStack stack = derive_params(cfg, canvas);
    const LinearImage out = apply_filter(imp, stack, threads);
    return radial_profile(out);
}

/// Radially averaged full impulse response of the dense reference for cfg.
inline std::vector<double> dense_reference_profile(const FilterConfig& cfg, int canvas = 257,
                                                   int threads = 1, int dense_layers = 32) {
    const LinearImage imp = impulse_image(canvas);
    const BlurStack stack = dense_reference_stack(cfg, canvas, dense_layers);
    const LinearImage out = apply_filter(imp, stack, threads);
    return radial_profile(out);
}

inline double profile_l2(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw ParameterError("profiles must have equal length");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

struct AblationRow {
    int layer_count = 0;
    double l2_to_reference = 0.0;
};

/// Distance of each discrete stack's impulse profile to the dense reference.
/// The reference span always comes from cfg.layer_count, so all rows are
/// measured against the same target.
inline std::vector<AblationRow> ablate_layers(const FilterConfig& cfg,
                                              const std::vector<int>& layer_counts,
                                              int canvas = 257, int threads = 1) {
    if (layer_counts.empty())
        throw ParameterError("ablation needs at least one layer count");
    for (int L : layer_counts)
        if (L < 1)
            throw ParameterError("layer counts must be >= 1");
    const std::vector<double> ref = dense_reference_profile(cfg, canvas, threads);
    std::vector<AblationRow> rows;
    rows.reserve(layer_counts.size());
    for (int L : layer_counts) {
        AblationRow row;
        row.layer_count = L;
        row.l2_to_reference = profile_l2(layer_profile(cfg, L, canvas, threads), ref);
        rows.push_back(row);
    }
    return rows;
}

} // namespace promist
