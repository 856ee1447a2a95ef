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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "promist/image.hpp"

namespace promist {

namespace detail {

// Portable uniform double in [0, 1): 53 top bits of the generator output.
// std::uniform_real_distribution is implementation-defined, which would make
// fixtures differ across standard libraries.
inline double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t unit_below(std::mt19937_64& rng, std::uint64_t n) {
    return rng() % n; // slight modulo bias is irrelevant for scene dressing
}

} // namespace detail

/// Linear-domain image with a single bright pixel at the center. The spot
/// value may exceed 1 to model scene-referred highlights.
inline LinearImage impulse_image(int size, float spot = 1.0f, float background = 0.0f) {
    if (size < 1 || size % 2 == 0)
        throw ParameterError("impulse canvas must be a positive odd size");
    LinearImage img = make_linear(size, size, background);
    const int c = size / 2;
    for (int ch = 0; ch < kChannels; ++ch)
        img.at(c, c, ch) = spot;
    return img;
}

/// Linear-domain image with i.i.d. uniform samples in [lo, hi].
inline LinearImage uniform_random_image(std::uint64_t seed, int width, int height,
                                        float lo = 0.0f, float hi = 1.0f) {
    if (width < 1 || height < 1)
        throw ParameterError("image dimensions must be >= 1");
    if (!(lo <= hi) || lo < 0.0f)
        throw ParameterError("need 0 <= lo <= hi");
    LinearImage img = make_linear(width, height, 0.0f);
    std::mt19937_64 rng(seed);
    for (float& s : img.data)
        s = lo + static_cast<float>(detail::unit_double(rng)) * (hi - lo);
    return img;
}

/// Procedural high-key evening scene used as a natural-image stand-in:
/// a slowly graded blue sky filling most of the frame, a smooth dark ground
/// band, and a scattering of small warm-white glints that sit just above the
/// sky level. Returned as an 8-bit encoded image.
inline EncodedImage glint_scene(std::uint64_t seed, int height = 96, int width = 128) {
    if (width < 16 || height < 16)
        throw ParameterError("glint scene needs at least 16x16 pixels");
    std::mt19937_64 rng(seed);
    const auto u = [&rng] { return detail::unit_double(rng); };

    std::vector<double> disp(static_cast<std::size_t>(width) * height * kChannels);
    const auto px = [&](int x, int y) -> double* {
        return disp.data() + (static_cast<std::size_t>(y) * width + x) * kChannels;
    };

    const double b0 = 0.80 + 0.02 * u();
    const double b1 = 0.90 + 0.02 * u();
    const double sky_phase = u();
    const double rr = 0.42 + 0.06 * u();
    const double gg = 0.60 + 0.06 * u();
    constexpr double kTau = 6.283185307179586;
    for (int y = 0; y < height; ++y) {
        const double yy = static_cast<double>(y) / (height - 1);
        for (int x = 0; x < width; ++x) {
            const double xx = static_cast<double>(x) / (width - 1);
            const double blue = b0 + (b1 - b0) * (1.0 - yy) +
                                0.015 * std::sin(kTau * (xx * 0.7 + sky_phase));
            double* p = px(x, y);
            p[0] = blue * rr;
            p[1] = blue * gg;
            p[2] = blue;
        }
    }

    const int horizon = static_cast<int>(height * (0.72 + 0.08 * u()));
    const double ground = 0.32 + 0.05 * u();
    const double ground_phase = u();
    for (int y = horizon; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double xx = static_cast<double>(x) / (width - 1);
            const double v = ground + 0.02 * std::sin(kTau * (xx * 3.0 + ground_phase));
            double* p = px(x, y);
            p[0] = v;
            p[1] = v * 0.92;
            p[2] = v * 0.75;
        }
    }

    const int glints = 10 + static_cast<int>(detail::unit_below(rng, 8));
    for (int i = 0; i < glints; ++i) {
        const int y0 = 2 + static_cast<int>(detail::unit_below(rng, static_cast<std::uint64_t>(horizon - 4)));
        const int x0 = 2 + static_cast<int>(detail::unit_below(rng, static_cast<std::uint64_t>(width - 4)));
        const int rd = 1 + static_cast<int>(detail::unit_below(rng, 3));
        const double col[3] = {1.0, 0.82 + 0.08 * u(), 0.74 + 0.08 * u()};
        for (int dy = -rd; dy <= rd; ++dy)
            for (int dx = -rd; dx <= rd; ++dx) {
                if (dy * dy + dx * dx > rd * rd) continue;
                const int yq = y0 + dy;
                const int xq = x0 + dx;
                if (yq < 0 || yq >= height || xq < 0 || xq >= width) continue;
                double* p = px(xq, yq);
                p[0] = col[0];
                p[1] = col[1];
                p[2] = col[2];
            }
    }

    EncodedImage img;
    img.width = width;
    img.height = height;
    img.bit_depth = 8;
    img.data.resize(disp.size());
    for (std::size_t i = 0; i < disp.size(); ++i) {
        const double v = std::clamp(disp[i], 0.0, 1.0);
        img.data[i] = static_cast<std::uint16_t>(std::lround(v * 255.0));
    }
    return img;
}

} // namespace promist
