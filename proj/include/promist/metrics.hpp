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
#include <limits>
#include <vector>

#include "promist/image.hpp"

namespace promist {

/// Planar HSV view of an image. Hue in degrees [0, 360) with the zero-chroma
/// convention hue = 0; saturation and value in [0, 1].
struct HsvRaster {
    int width = 0;
    int height = 0;
    std::vector<float> hue, sat, val;
};

/// Hexcone RGB -> HSV on display-referred samples in [0, 1].
inline HsvRaster rgb_to_hsv(const LinearImage& img) {
    validate(img);
    for (float s : img.data)
        if (s < 0.0f || s > 1.0f)
            throw ParameterError("rgb_to_hsv expects samples in [0, 1]");
    HsvRaster out;
    out.width = img.width;
    out.height = img.height;
    const std::size_t n = img.pixel_count();
    out.hue.resize(n);
    out.sat.resize(n);
    out.val.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = img.data[i * kChannels + 0];
        const double g = img.data[i * kChannels + 1];
        const double b = img.data[i * kChannels + 2];
        const double mx = std::max({r, g, b});
        const double mn = std::min({r, g, b});
        const double d = mx - mn;
        double h = 0.0;
        if (d > 0.0) {
            if (mx == r)
                h = std::fmod((g - b) / d, 6.0);
            else if (mx == g)
                h = (b - r) / d + 2.0;
            else
                h = (r - g) / d + 4.0;
            h *= 60.0;
            if (h < 0.0) h += 360.0;
            if (h >= 360.0) h -= 360.0;
        }
        out.hue[i] = static_cast<float>(h);
        out.sat[i] = static_cast<float>(mx > 0.0 ? d / mx : 0.0);
        out.val[i] = static_cast<float>(mx);
    }
    return out;
}

/// Uniform histogram over [lo, hi]: bins are half-open except the last,
/// which also takes the right edge.
inline std::vector<long long> histogram(const std::vector<float>& samples, int bins,
                                        double lo, double hi) {
    if (bins < 1)
        throw ParameterError("histogram needs at least one bin");
    if (!(lo < hi))
        throw ParameterError("histogram domain must be nonempty");
    std::vector<long long> counts(bins, 0);
    const double scale = bins / (hi - lo);
    for (float s : samples) {
        int b = static_cast<int>((static_cast<double>(s) - lo) * scale);
        b = std::clamp(b, 0, bins - 1);
        ++counts[b];
    }
    return counts;
}

struct HsvHistogram {
    int bins = 0;
    std::vector<long long> hue_counts, sat_counts, val_counts;
};

inline HsvHistogram hsv_histograms(const HsvRaster& hsv, int bins = 64) {
    HsvHistogram h;
    h.bins = bins;
    h.hue_counts = histogram(hsv.hue, bins, 0.0, 360.0);
    h.sat_counts = histogram(hsv.sat, bins, 0.0, 1.0);
    h.val_counts = histogram(hsv.val, bins, 0.0, 1.0);
    return h;
}

/// L1 distance between two histograms after normalizing each to unit mass.
/// Ranges over [0, 2].
inline double histogram_l1(const std::vector<long long>& a, const std::vector<long long>& b) {
    if (a.size() != b.size())
        throw ParameterError("histogram L1 needs equal bin counts");
    long long na = 0, nb = 0;
    for (long long c : a) na += c;
    for (long long c : b) nb += c;
    if (na == 0 || nb == 0)
        throw ParameterError("histogram L1 needs nonempty histograms");
    double l1 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        l1 += std::abs(static_cast<double>(a[i]) / na - static_cast<double>(b[i]) / nb);
    return l1;
}

/// Linearly interpolated percentile, q in [0, 100].
inline double percentile(std::vector<float> values, double q) {
    if (values.empty())
        throw ParameterError("percentile of empty sample set");
    if (!(q >= 0.0 && q <= 100.0))
        throw ParameterError("percentile rank must lie in [0, 100]");
    std::sort(values.begin(), values.end());
    const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + frac * (static_cast<double>(values[lo + 1]) - values[lo]);
}

namespace detail {

inline void require_same_shape(const LinearImage& a, const LinearImage& b) {
    if (a.width != b.width || a.height != b.height)
        throw ParameterError("images must have identical dimensions");
}

} // namespace detail

/// Peak signal-to-noise ratio in dB over all RGB samples, full scale 1.0.
/// Identical images yield +infinity.
inline double psnr(const LinearImage& a, const LinearImage& b) {
    validate(a);
    validate(b);
    detail::require_same_shape(a, b);
    double se = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - b.data[i];
        se += d * d;
    }
    const double mse = se / static_cast<double>(a.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

/// Mean structural similarity on Rec. 709 luma: 8x8 uniform windows at
/// stride 1, population moments, C1 = 0.01^2 and C2 = 0.03^2 on unit range.
inline double ssim(const LinearImage& a, const LinearImage& b) {
    validate(a);
    validate(b);
    detail::require_same_shape(a, b);
    constexpr int kWin = 8;
    const int w = a.width;
    const int h = a.height;
    if (w < kWin || h < kWin)
        throw ParameterError("ssim needs images at least 8x8");

    const std::size_t n = a.pixel_count();
    std::vector<double> ya(n), yb(n);
    for (std::size_t i = 0; i < n; ++i) {
        const float* pa = a.data.data() + i * kChannels;
        const float* pb = b.data.data() + i * kChannels;
        ya[i] = 0.2126 * pa[0] + 0.7152 * pa[1] + 0.0722 * pa[2];
        yb[i] = 0.2126 * pb[0] + 0.7152 * pb[1] + 0.0722 * pb[2];
    }

    // Summed-area tables over luma and its second moments, one row/col pad.
    const int sw = w + 1;
    const auto build = [&](auto&& value) {
        std::vector<double> sat(static_cast<std::size_t>(sw) * (h + 1), 0.0);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                sat[static_cast<std::size_t>(y + 1) * sw + (x + 1)] =
                    value(i) + sat[static_cast<std::size_t>(y) * sw + (x + 1)] +
                    sat[static_cast<std::size_t>(y + 1) * sw + x] -
                    sat[static_cast<std::size_t>(y) * sw + x];
            }
        return sat;
    };
    const std::vector<double> sa = build([&](std::size_t i) { return ya[i]; });
    const std::vector<double> sb = build([&](std::size_t i) { return yb[i]; });
    const std::vector<double> saa = build([&](std::size_t i) { return ya[i] * ya[i]; });
    const std::vector<double> sbb = build([&](std::size_t i) { return yb[i] * yb[i]; });
    const std::vector<double> sab = build([&](std::size_t i) { return ya[i] * yb[i]; });
    const auto window_sum = [&](const std::vector<double>& sat, int x, int y) {
        return sat[static_cast<std::size_t>(y + kWin) * sw + (x + kWin)] -
               sat[static_cast<std::size_t>(y) * sw + (x + kWin)] -
               sat[static_cast<std::size_t>(y + kWin) * sw + x] +
               sat[static_cast<std::size_t>(y) * sw + x];
    };

    constexpr double kC1 = 0.01 * 0.01;
    constexpr double kC2 = 0.03 * 0.03;
    constexpr double kInvArea = 1.0 / (kWin * kWin);
    double total = 0.0;
    long long windows = 0;
    for (int y = 0; y + kWin <= h; ++y)
        for (int x = 0; x + kWin <= w; ++x) {
            const double mua = window_sum(sa, x, y) * kInvArea;
            const double mub = window_sum(sb, x, y) * kInvArea;
            const double vara = std::max(0.0, window_sum(saa, x, y) * kInvArea - mua * mua);
            const double varb = std::max(0.0, window_sum(sbb, x, y) * kInvArea - mub * mub);
            const double covab = window_sum(sab, x, y) * kInvArea - mua * mub;
            total += ((2.0 * mua * mub + kC1) * (2.0 * covab + kC2)) /
                     ((mua * mua + mub * mub + kC1) * (vara + varb + kC2));
            ++windows;
        }
    return total / static_cast<double>(windows);
}

/// Side-by-side diagnostics of a filtered image against its source. All
/// fields are computed on display-referred [0, 1] samples.
struct PairReport {
    double mean_value_delta = 0.0; // filtered minus original, HSV value
    double mean_sat_delta = 0.0;
    double hue_histogram_l1 = 0.0;
    double dynamic_range_original = 0.0; // p99 - p1 of HSV value
    double dynamic_range_filtered = 0.0;
    double psnr_db = 0.0;
    double ssim = 0.0;
};

inline PairReport pair_report(const LinearImage& original, const LinearImage& filtered,
                              int bins = 64) {
    detail::require_same_shape(original, filtered);
    const HsvRaster ho = rgb_to_hsv(original);
    const HsvRaster hf = rgb_to_hsv(filtered);

    const auto mean = [](const std::vector<float>& v) {
        double s = 0.0;
        for (float x : v) s += x;
        return s / static_cast<double>(v.size());
    };

    PairReport r;
    r.mean_value_delta = mean(hf.val) - mean(ho.val);
    r.mean_sat_delta = mean(hf.sat) - mean(ho.sat);
    r.hue_histogram_l1 = histogram_l1(histogram(ho.hue, bins, 0.0, 360.0),
                                      histogram(hf.hue, bins, 0.0, 360.0));
    r.dynamic_range_original = percentile(ho.val, 99.0) - percentile(ho.val, 1.0);
    r.dynamic_range_filtered = percentile(hf.val, 99.0) - percentile(hf.val, 1.0);
    r.psnr_db = psnr(original, filtered);
    r.ssim = promist::ssim(original, filtered);
    return r;
}

} // namespace promist
