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
#include <thread>
#include <vector>

#include "promist/image.hpp"

namespace promist {

/// Sampled, unit-sum, symmetric 1D Gaussian. sigma = 0 degenerates to the
/// identity kernel [1].
struct Kernel1D {
    double sigma = 0.0;
    int radius = 0; // taps span [-radius, radius]
    std::vector<double> taps; // length 2*radius+1, center at index radius
};

/// Samples exp(-i^2 / (2 sigma^2)) over i in [-ceil(3 sigma), ceil(3 sigma)]
/// and normalizes to unit sum.
inline Kernel1D make_kernel(double sigma) {
    if (!std::isfinite(sigma) || sigma < 0.0)
        throw ParameterError("kernel sigma must be finite and >= 0");
    Kernel1D k;
    k.sigma = sigma;
    if (sigma == 0.0) {
        k.radius = 0;
        k.taps = {1.0};
        return k;
    }
    k.radius = static_cast<int>(std::ceil(3.0 * sigma));
    k.taps.resize(2 * k.radius + 1);
    const double inv = -1.0 / (2.0 * sigma * sigma);
    double sum = 1.0; // center tap
    k.taps[k.radius] = 1.0;
    for (int i = 1; i <= k.radius; ++i) {
        const double t = std::exp(inv * static_cast<double>(i) * i);
        k.taps[k.radius - i] = t;
        k.taps[k.radius + i] = t;
        sum += 2.0 * t;
    }
    for (double& t : k.taps) t /= sum;
    return k;
}

namespace detail {

/// Mirror border indexing: -1 -> 0, -2 -> 1, n -> n-1. The edge sample sits
/// on the fold, so constants and total energy survive normalized convolution.
inline int reflect_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - 1 - i;
}

// Horizontal pass over rows [y0, y1). Interleaved RGB, fixed tap order per
// pixel so the result is independent of how rows are partitioned.
inline void blur_rows(const float* in, float* out, int width, int height,
                      const Kernel1D& k, int y0, int y1) {
    (void)height;
    const int r = k.radius;
    const double* t = k.taps.data() + r; // t[0] is the center tap
    const int interior_lo = r;
    const int interior_hi = width - r; // first x past the interior
    for (int y = y0; y < y1; ++y) {
        const float* row = in + static_cast<std::size_t>(y) * width * kChannels;
        float* orow = out + static_cast<std::size_t>(y) * width * kChannels;
        int x = 0;
        auto border_pixel = [&](int px) {
            const double tc = t[0];
            double a0 = tc * row[px * kChannels + 0];
            double a1 = tc * row[px * kChannels + 1];
            double a2 = tc * row[px * kChannels + 2];
            for (int i = 1; i <= r; ++i) {
                const double w = t[i];
                const int xm = reflect_index(px - i, width) * kChannels;
                const int xp = reflect_index(px + i, width) * kChannels;
                a0 += w * (row[xm + 0] + row[xp + 0]);
                a1 += w * (row[xm + 1] + row[xp + 1]);
                a2 += w * (row[xm + 2] + row[xp + 2]);
            }
            orow[px * kChannels + 0] = static_cast<float>(a0);
            orow[px * kChannels + 1] = static_cast<float>(a1);
            orow[px * kChannels + 2] = static_cast<float>(a2);
        };
        for (; x < std::min(interior_lo, width); ++x) border_pixel(x);
        for (; x < interior_hi; ++x) {
            const float* p = row + x * kChannels;
            const double tc = t[0];
            double a0 = tc * p[0];
            double a1 = tc * p[1];
            double a2 = tc * p[2];
            for (int i = 1; i <= r; ++i) {
                const double w = t[i];
                const float* pm = p - i * kChannels;
                const float* pp = p + i * kChannels;
                a0 += w * (pm[0] + pp[0]);
                a1 += w * (pm[1] + pp[1]);
                a2 += w * (pm[2] + pp[2]);
            }
            orow[x * kChannels + 0] = static_cast<float>(a0);
            orow[x * kChannels + 1] = static_cast<float>(a1);
            orow[x * kChannels + 2] = static_cast<float>(a2);
        }
        for (x = std::max(x, interior_hi); x < width; ++x) border_pixel(x);
    }
}

// Vertical pass producing output rows [y0, y1). Accumulates whole rows in a
// double scratch buffer; tap order is fixed, so thread count cannot change
// the result.
inline void blur_cols(const float* in, float* out, int width, int height,
                      const Kernel1D& k, int y0, int y1,
                      std::vector<double>& scratch) {
    const int r = k.radius;
    const double* t = k.taps.data() + r;
    const std::size_t rowlen = static_cast<std::size_t>(width) * kChannels;
    scratch.resize(rowlen);
    for (int y = y0; y < y1; ++y) {
        const float* rc = in + static_cast<std::size_t>(y) * rowlen;
        const double tc = t[0];
        for (std::size_t i = 0; i < rowlen; ++i) scratch[i] = tc * rc[i];
        for (int i = 1; i <= r; ++i) {
            const double w = t[i];
            const float* rm = in + static_cast<std::size_t>(reflect_index(y - i, height)) * rowlen;
            const float* rp = in + static_cast<std::size_t>(reflect_index(y + i, height)) * rowlen;
            for (std::size_t j = 0; j < rowlen; ++j)
                scratch[j] += w * (rm[j] + rp[j]);
        }
        float* orow = out + static_cast<std::size_t>(y) * rowlen;
        for (std::size_t j = 0; j < rowlen; ++j)
            orow[j] = static_cast<float>(scratch[j]);
    }
}

template <typename Fn>
inline void parallel_rows(int height, int threads, Fn&& fn) {
    threads = std::clamp(threads, 1, 256);
    threads = std::min(threads, height);
    if (threads <= 1) {
        fn(0, height, 0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const int chunk = (height + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
        const int y0 = w * chunk;
        const int y1 = std::min(height, y0 + chunk);
        if (y0 >= y1) break;
        pool.emplace_back([&fn, y0, y1, w] { fn(y0, y1, w); });
    }
    for (auto& th : pool) th.join();
}

} // namespace detail

/// Separable Gaussian blur with mirror border handling. Dimensions are
/// preserved, constants are fixed points, and the per-pixel accumulation
/// order is fixed so results are bit-identical for any thread count.
inline LinearImage blur(const LinearImage& img, double sigma, int threads = 1) {
    validate(img);
    const Kernel1D k = make_kernel(sigma); // validates sigma
    if (k.radius == 0) return img;

    LinearImage tmp;
    tmp.width = img.width;
    tmp.height = img.height;
    tmp.data.resize(img.sample_count());
    detail::parallel_rows(img.height, threads, [&](int y0, int y1, int) {
        detail::blur_rows(img.data.data(), tmp.data.data(), img.width, img.height, k, y0, y1);
    });

    LinearImage out;
    out.width = img.width;
    out.height = img.height;
    out.data.resize(img.sample_count());
    std::vector<std::vector<double>> scratch(std::clamp(threads, 1, 256));
    detail::parallel_rows(img.height, threads, [&](int y0, int y1, int w) {
        detail::blur_cols(tmp.data.data(), out.data.data(), img.width, img.height, k, y0, y1,
                          scratch[static_cast<std::size_t>(w)]);
    });
    return out;
}

} // namespace promist
