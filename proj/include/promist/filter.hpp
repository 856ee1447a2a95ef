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
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "promist/color.hpp"
#include "promist/gaussian.hpp"

namespace promist {

/// User-facing diffusion grade. Density follows the Pro-Mist grade naming
/// (1/8 is the subtlest stock grade, 1/2 the heaviest we model) and doubles
/// as the blend fraction. Focal length widens the scatter radii the way a
/// longer lens magnifies the bokeh of a physical filter.
struct FilterConfig {
    double density = 0.5;
    double focal_mm = 20.0;
    int layer_count = 6;
    double base_sigma = 1.0; // pixels at reference_width
    double reference_width = 1024.0;
    ToneOperator tone_op = ToneOperator::Clamp;
    // When set, replaces the density-derived geometric weight ratio.
    std::optional<double> weight_ratio;
};

struct BlurLayer {
    double sigma = 0.0;
    double weight = 0.0;
};

/// Derived per-image schedule: blur layers plus the blend fraction applied
/// against the unfiltered signal.
struct BlurStack {
    std::vector<BlurLayer> layers;
    double alpha = 0.0;
};

inline void validate(const FilterConfig& cfg) {
    if (!std::isfinite(cfg.density) || cfg.density <= 0.0 || cfg.density > 1.0)
        throw ParameterError("density must lie in (0, 1]");
    if (!std::isfinite(cfg.focal_mm) || cfg.focal_mm <= 0.0)
        throw ParameterError("focal_mm must be positive");
    if (cfg.layer_count < 1)
        throw ParameterError("layer_count must be >= 1");
    if (!std::isfinite(cfg.base_sigma) || cfg.base_sigma <= 0.0)
        throw ParameterError("base_sigma must be positive");
    if (!std::isfinite(cfg.reference_width) || cfg.reference_width < 1.0)
        throw ParameterError("reference_width must be >= 1");
    if (cfg.weight_ratio && (!std::isfinite(*cfg.weight_ratio) || *cfg.weight_ratio <= 0.0))
        throw ParameterError("weight_ratio override must be positive");
}

inline void validate(const BlurStack& stack) {
    if (stack.layers.empty())
        throw ParameterError("blur stack needs at least one layer");
    double sum = 0.0;
    double prev = -1.0;
    for (const BlurLayer& l : stack.layers) {
        if (!std::isfinite(l.sigma) || l.sigma < 0.0)
            throw ParameterError("layer sigma must be finite and >= 0");
        if (l.sigma <= prev)
            throw ParameterError("layer sigmas must be strictly increasing");
        prev = l.sigma;
        if (!std::isfinite(l.weight) || l.weight < 0.0)
            throw ParameterError("layer weights must be >= 0");
        sum += l.weight;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ParameterError("layer weights must sum to 1");
    if (!std::isfinite(stack.alpha) || stack.alpha < 0.0 || stack.alpha > 1.0)
        throw ParameterError("alpha must lie in [0, 1]");
}

/// Geometric weight ratio as a function of density. Anchored at the two
/// stock grades, r(1/2) = 1.5 and r(1/8) = 0.6: at the heavy grade the
/// large-radius layers dominate the mix, at the light grade the small
/// radii do. Between and beyond the anchors, ln r is linear in log2(density).
inline double weight_ratio_for_density(double density) {
    const double lr_half = std::log(1.5);
    const double lr_eighth = std::log(0.6);
    const double t = (std::log2(density) - (-1.0)) / ((-3.0) - (-1.0));
    return std::exp(lr_half + (lr_eighth - lr_half) * t);
}

/// Expands a config into concrete (sigma, weight) layers for an image of the
/// given width. Sigmas double per layer and scale linearly with focal length
/// and with image width, so the rendered halo keeps its apparent size across
/// lenses and resolutions.
inline BlurStack derive_params(const FilterConfig& cfg, int image_width) {
    validate(cfg);
    if (image_width < 1)
        throw ParameterError("image width must be >= 1");

    BlurStack stack;
    stack.alpha = cfg.density;
    stack.layers.resize(cfg.layer_count);

    const double scale = (cfg.focal_mm / 20.0) * (static_cast<double>(image_width) / cfg.reference_width);
    const double ratio = cfg.weight_ratio ? *cfg.weight_ratio : weight_ratio_for_density(cfg.density);

    double wsum = 0.0;
    for (int k = 0; k < cfg.layer_count; ++k) {
        stack.layers[k].sigma = cfg.base_sigma * std::ldexp(1.0, k) * scale;
        stack.layers[k].weight = std::pow(ratio, k);
        wsum += stack.layers[k].weight;
    }
    for (auto& l : stack.layers) l.weight /= wsum;
    return stack;
}

/// Convex blend of the image with its weighted blur stack:
/// out = (1 - alpha) * img + alpha * sum_k w_k * blur(img, sigma_k).
/// Dimensions, non-negativity, and total linear energy are preserved.
inline LinearImage apply_filter(const LinearImage& img, const BlurStack& stack, int threads = 1) {
    validate(img);
    validate(stack);

    std::vector<double> acc(img.sample_count(), 0.0);
    for (const BlurLayer& l : stack.layers) {
        const LinearImage b = blur(img, l.sigma, threads);
        const double w = l.weight;
        for (std::size_t i = 0; i < acc.size(); ++i)
            acc[i] += w * b.data[i];
    }

    LinearImage out;
    out.width = img.width;
    out.height = img.height;
    out.data.resize(img.sample_count());
    const double a = stack.alpha;
    for (std::size_t i = 0; i < acc.size(); ++i)
        out.data[i] = static_cast<float>((1.0 - a) * img.data[i] + a * acc[i]);
    return out;
}

/// Full display-to-display pipeline: decode to scene-referred linear RGB,
/// diffuse, tone map, re-encode at the source bit depth.
inline EncodedImage emulate(const EncodedImage& img, const FilterConfig& cfg, int threads = 1) {
    const LinearImage lin = decode_srgb(img);
    const BlurStack stack = derive_params(cfg, img.width);
    LinearImage filtered = apply_filter(lin, stack, threads);
    filtered = tone_map(filtered, cfg.tone_op);
    return encode_srgb(filtered, img.bit_depth);
}

namespace detail {

inline std::string number_token(double v) {
    // Grade fractions keep their conventional names: 0.5 -> "1-2".
    for (int den = 2; den <= 64; ++den) {
        if (std::abs(v * den - 1.0) <= 1e-9)
            return "1-" + std::to_string(den);
    }
    char buf[32];
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
        return buf;
    }
    std::snprintf(buf, sizeof buf, "%g", v);
    std::string s = buf;
    for (char& c : s)
        if (c == '.') c = 'p';
    return s;
}

} // namespace detail

/// Canonical directory-safe label, e.g. density 1/2 at 20mm -> "d1-2_f20".
inline std::string label(const FilterConfig& cfg) {
    return "d" + detail::number_token(cfg.density) + "_f" + detail::number_token(cfg.focal_mm);
}

/// The standard four-configuration grid: both densities at both focal lengths.
inline std::vector<FilterConfig> default_configs() {
    std::vector<FilterConfig> out;
    for (double density : {0.125, 0.5})
        for (double focal : {20.0, 50.0}) {
            FilterConfig cfg;
            cfg.density = density;
            cfg.focal_mm = focal;
            out.push_back(cfg);
        }
    return out;
}

/// Parses "1/2", "1/8", or a plain decimal into a density value.
inline double parse_density(const std::string& text) {
    const auto bad = [&] { return ParameterError("invalid density '" + text + "'"); };
    double value = 0.0;
    const auto slash = text.find('/');
    try {
        std::size_t used = 0;
        if (slash != std::string::npos) {
            std::size_t used2 = 0;
            const double num = std::stod(text.substr(0, slash), &used);
            const std::string den_text = text.substr(slash + 1);
            const double den = std::stod(den_text, &used2);
            if (used != slash || used2 != den_text.size() || den == 0.0) throw bad();
            value = num / den;
        } else {
            value = std::stod(text, &used);
            if (used != text.size()) throw bad();
        }
    } catch (const ParameterError&) {
        throw;
    } catch (const std::exception&) {
        throw bad();
    }
    if (!std::isfinite(value) || value <= 0.0 || value > 1.0) throw bad();
    return value;
}

/// Optional plain-text parameter file, one `key = value` per line,
/// '#' starts a comment. Recognized keys: density, focal_mm, layer_count,
/// base_sigma, reference_width, weight_ratio_overrides, tone_operator.
/// weight_ratio_overrides maps densities to ratios, e.g. "1/2:1.4, 1/8:0.5".
struct ParamsFile {
    std::optional<double> density;
    std::optional<double> focal_mm;
    std::optional<int> layer_count;
    std::optional<double> base_sigma;
    std::optional<double> reference_width;
    std::optional<ToneOperator> tone_op;
    std::map<double, double> weight_ratio_overrides;
};

inline ParamsFile parse_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open params file: " + path);
    ParamsFile p;
    std::string line;
    int lineno = 0;
    const auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string();
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    };
    const auto to_double = [&](const std::string& v, const char* key) {
        try {
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            if (used != v.size() || !std::isfinite(d))
                throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ParameterError(std::string("params file: bad value for ") + key +
                                 " at line " + std::to_string(lineno));
        }
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParameterError("params file: expected key = value at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "density") {
            p.density = parse_density(value);
        } else if (key == "focal_mm") {
            p.focal_mm = to_double(value, "focal_mm");
        } else if (key == "layer_count") {
            const double d = to_double(value, "layer_count");
            if (d != std::floor(d))
                throw ParameterError("params file: layer_count must be an integer at line " +
                                     std::to_string(lineno));
            p.layer_count = static_cast<int>(d);
        } else if (key == "base_sigma") {
            p.base_sigma = to_double(value, "base_sigma");
        } else if (key == "reference_width") {
            p.reference_width = to_double(value, "reference_width");
        } else if (key == "tone_operator") {
            p.tone_op = parse_tone_operator(value);
        } else if (key == "weight_ratio_overrides") {
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                if (item.empty()) continue;
                const auto colon = item.find(':');
                if (colon == std::string::npos)
                    throw ParameterError("params file: expected density:ratio at line " +
                                         std::to_string(lineno));
                const double d = parse_density(trim(item.substr(0, colon)));
                const double r = to_double(trim(item.substr(colon + 1)), "weight_ratio_overrides");
                p.weight_ratio_overrides[d] = r;
            }
        } else {
            throw ParameterError("params file: unknown key '" + key + "' at line " +
                                 std::to_string(lineno));
        }
    }
    return p;
}

/// Folds file-provided parameters into a config; flag-level settings in cfg
/// are replaced by any value present in the file.
inline FilterConfig apply_params(FilterConfig cfg, const ParamsFile& p) {
    if (p.density) cfg.density = *p.density;
    if (p.focal_mm) cfg.focal_mm = *p.focal_mm;
    if (p.layer_count) cfg.layer_count = *p.layer_count;
    if (p.base_sigma) cfg.base_sigma = *p.base_sigma;
    if (p.reference_width) cfg.reference_width = *p.reference_width;
    if (p.tone_op) cfg.tone_op = *p.tone_op;
    for (const auto& [density, ratio] : p.weight_ratio_overrides)
        if (std::abs(density - cfg.density) <= 1e-9) cfg.weight_ratio = ratio;
    validate(cfg);
    return cfg;
}

} // namespace promist
