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
#include <cstdint>
#include <string>
#include <vector>

#include "promist/error.hpp"

namespace promist {

inline constexpr int kChannels = 3; // RGB everywhere

/// Display-referred integer raster. Samples are stored in uint16_t slots
/// regardless of bit depth; bit_depth selects the valid code range.
struct EncodedImage {
    int width = 0;
    int height = 0;
    int bit_depth = 8; // 8 or 16
    std::vector<std::uint16_t> data; // row-major, interleaved RGB

    std::uint16_t max_code() const {
        return bit_depth == 16 ? 65535 : 255;
    }
    std::size_t sample_count() const {
        return static_cast<std::size_t>(width) * height * kChannels;
    }
    std::uint16_t& at(int x, int y, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * kChannels + c];
    }
    std::uint16_t at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * kChannels + c];
    }
};

/// Scene-referred linear raster. Samples are proportional to light intensity,
/// finite and >= 0, with headroom above 1.0 permitted. The same container is
/// used for display-referred [0,1] rasters in the analysis path.
struct LinearImage {
    int width = 0;
    int height = 0;
    std::vector<float> data; // row-major, interleaved RGB

    std::size_t sample_count() const {
        return static_cast<std::size_t>(width) * height * kChannels;
    }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * height;
    }
    float& at(int x, int y, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * kChannels + c];
    }
    float at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * kChannels + c];
    }
};

inline LinearImage make_linear(int width, int height, float fill = 0.0f) {
    if (width < 1 || height < 1)
        throw ParameterError("image dimensions must be positive");
    LinearImage img;
    img.width = width;
    img.height = height;
    img.data.assign(static_cast<std::size_t>(width) * height * kChannels, fill);
    return img;
}

inline void validate(const EncodedImage& img) {
    if (img.width < 1 || img.height < 1)
        throw StructuralError("encoded image has empty dimensions");
    if (img.bit_depth != 8 && img.bit_depth != 16)
        throw StructuralError("encoded image bit depth must be 8 or 16");
    if (img.data.size() != img.sample_count())
        throw StructuralError("encoded image data length does not match width*height*3");
    const std::uint16_t maxc = img.max_code();
    for (std::uint16_t v : img.data)
        if (v > maxc)
            throw StructuralError("encoded sample exceeds bit-depth range");
}

inline void validate(const LinearImage& img) {
    if (img.width < 1 || img.height < 1)
        throw StructuralError("linear image has empty dimensions");
    if (img.data.size() != img.sample_count())
        throw StructuralError("linear image data length does not match width*height*3");
    for (float v : img.data)
        if (!std::isfinite(v) || v < 0.0f)
            throw StructuralError("linear sample must be finite and >= 0");
}

/// Sum of all samples; the conserved quantity of the diffusion stages.
inline double total_energy(const LinearImage& img) {
    double sum = 0.0;
    for (float v : img.data) sum += v;
    return sum;
}

inline float max_sample(const LinearImage& img) {
    float m = 0.0f;
    for (float v : img.data) m = v > m ? v : m;
    return m;
}

} // namespace promist
