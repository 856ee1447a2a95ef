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
#include <string>

#include "promist/image.hpp"

namespace promist {

/// Electro-optical transfer used when linearizing encoded sources.
/// Srgb is the piecewise IEC 61966-2-1 curve; Gamma22 is a plain power law.
enum class TransferFunction { Srgb, Gamma22 };

/// Compression of scene-referred values into display range.
enum class ToneOperator { Clamp, Reinhard };

namespace detail {

inline double srgb_eotf(double v) {
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

inline double srgb_oetf(double x) {
    return x <= 0.0031308 ? 12.92 * x : 1.055 * std::pow(x, 1.0 / 2.4) - 0.055;
}

inline double eotf(double v, TransferFunction tf) {
    return tf == TransferFunction::Srgb ? srgb_eotf(v) : std::pow(v, 2.2);
}

inline double oetf(double x, TransferFunction tf) {
    return tf == TransferFunction::Srgb ? srgb_oetf(x) : std::pow(x, 1.0 / 2.2);
}

} // namespace detail

/// Removes the display encoding, normalizing codes to [0,1] and applying the
/// transfer function. Output samples are scene-referred linear.
inline LinearImage decode(const EncodedImage& img, TransferFunction tf) {
    validate(img);
    LinearImage out;
    out.width = img.width;
    out.height = img.height;
    out.data.resize(img.sample_count());
    const double scale = 1.0 / img.max_code();
    for (std::size_t i = 0; i < img.data.size(); ++i)
        out.data[i] = static_cast<float>(detail::eotf(img.data[i] * scale, tf));
    return out;
}

inline LinearImage decode_srgb(const EncodedImage& img) {
    return decode(img, TransferFunction::Srgb);
}

/// Clamps to [0,1], applies the inverse transfer, and quantizes
/// round-to-nearest at the requested bit depth.
inline EncodedImage encode(const LinearImage& img, int bit_depth, TransferFunction tf) {
    validate(img);
    if (bit_depth != 8 && bit_depth != 16)
        throw ParameterError("bit depth must be 8 or 16");
    EncodedImage out;
    out.width = img.width;
    out.height = img.height;
    out.bit_depth = bit_depth;
    out.data.resize(img.sample_count());
    const double maxc = out.max_code();
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const double x = std::clamp(static_cast<double>(img.data[i]), 0.0, 1.0);
        const double v = detail::oetf(x, tf) * maxc;
        out.data[i] = static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, maxc)));
    }
    return out;
}

inline EncodedImage encode_srgb(const LinearImage& img, int bit_depth = 8) {
    return encode(img, bit_depth, TransferFunction::Srgb);
}

/// Maps scene-referred values into [0,1]. Clamp is the identity on in-range
/// samples; Reinhard is x/(1+x).
inline LinearImage tone_map(const LinearImage& img, ToneOperator op) {
    validate(img);
    LinearImage out;
    out.width = img.width;
    out.height = img.height;
    out.data.resize(img.sample_count());
    if (op == ToneOperator::Clamp) {
        for (std::size_t i = 0; i < img.data.size(); ++i)
            out.data[i] = std::min(img.data[i], 1.0f);
    } else {
        for (std::size_t i = 0; i < img.data.size(); ++i) {
            const double x = img.data[i];
            out.data[i] = static_cast<float>(x / (1.0 + x));
        }
    }
    return out;
}

/// Normalizes integer codes to [0,1] without linearizing. This is the
/// display-referred raster the analysis stages operate on.
inline LinearImage normalize(const EncodedImage& img) {
    validate(img);
    LinearImage out;
    out.width = img.width;
    out.height = img.height;
    out.data.resize(img.sample_count());
    const float scale = 1.0f / img.max_code();
    for (std::size_t i = 0; i < img.data.size(); ++i)
        out.data[i] = img.data[i] * scale;
    return out;
}

inline ToneOperator parse_tone_operator(const std::string& s) {
    if (s == "clamp") return ToneOperator::Clamp;
    if (s == "reinhard") return ToneOperator::Reinhard;
    throw ParameterError("unknown tone operator '" + s + "' (expected clamp or reinhard)");
}

inline const char* to_string(ToneOperator op) {
    return op == ToneOperator::Clamp ? "clamp" : "reinhard";
}

inline const char* to_string(TransferFunction tf) {
    return tf == TransferFunction::Srgb ? "srgb" : "gamma22";
}

} // namespace promist
