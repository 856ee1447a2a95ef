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

#include <bit>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <png.h>

#include "promist/image.hpp"

namespace promist {

namespace detail {

struct FileCloser {
    std::FILE* fp = nullptr;
    ~FileCloser() {
        if (fp) std::fclose(fp);
    }
};

// Silent handlers: failures surface as IoError, not stderr chatter.
inline void png_on_error(png_structp png, png_const_charp) {
    png_longjmp(png, 1);
}

inline void png_on_warning(png_structp, png_const_charp) {}

} // namespace detail

/// Reads a PNG as interleaved RGB. Palette and gray images are expanded,
/// an alpha channel is discarded, and 16-bit samples arrive in host order.
inline EncodedImage read_png(const std::string& path) {
    detail::FileCloser file{std::fopen(path.c_str(), "rb")};
    if (!file.fp)
        throw IoError("cannot open for reading: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                             detail::png_on_error, detail::png_on_warning);
    if (!png)
        throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png_create_info_struct failed");
    }

    // Containers live outside the setjmp scope so longjmp cannot skip their
    // destructors' bookkeeping.
    EncodedImage img;
    std::vector<unsigned char> raw;
    std::vector<png_bytep> rows;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("failed to decode PNG: " + path);
    }

    png_init_io(png, file.fp);
    png_read_info(png, info);

    const png_byte color_type = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    if (depth == 16 && std::endian::native == std::endian::little)
        png_set_swap(png);
    png_read_update_info(png, info);

    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    img.bit_depth = png_get_bit_depth(png, info);
    const int channels = png_get_channels(png, info);
    if (channels != kChannels || (img.bit_depth != 8 && img.bit_depth != 16))
        png_error(png, "unsupported PNG layout");

    const std::size_t rowbytes = png_get_rowbytes(png, info);
    raw.resize(rowbytes * img.height);
    rows.resize(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = raw.data() + static_cast<std::size_t>(y) * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    img.data.resize(img.sample_count());
    if (img.bit_depth == 8) {
        for (std::size_t i = 0; i < img.data.size(); ++i)
            img.data[i] = raw[i];
    } else {
        std::memcpy(img.data.data(), raw.data(), img.data.size() * sizeof(std::uint16_t));
    }
    validate(img);
    return img;
}

/// Writes interleaved RGB as an 8- or 16-bit truecolor PNG. Output bytes
/// depend only on the pixel data, so identical images rewrite identically.
inline void write_png(const std::string& path, const EncodedImage& img) {
    validate(img);
    detail::FileCloser file{std::fopen(path.c_str(), "wb")};
    if (!file.fp)
        throw IoError("cannot open for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                              detail::png_on_error, detail::png_on_warning);
    if (!png)
        throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png_create_info_struct failed");
    }

    std::vector<unsigned char> raw;
    std::vector<png_bytep> rows;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed to encode PNG: " + path);
    }

    png_init_io(png, file.fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), img.bit_depth, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (img.bit_depth == 16 && std::endian::native == std::endian::little)
        png_set_swap(png);

    const std::size_t rowbytes =
        static_cast<std::size_t>(img.width) * kChannels * (img.bit_depth / 8);
    raw.resize(rowbytes * img.height);
    if (img.bit_depth == 8) {
        for (std::size_t i = 0; i < img.data.size(); ++i)
            raw[i] = static_cast<unsigned char>(img.data[i]);
    } else {
        std::memcpy(raw.data(), img.data.data(), img.data.size() * sizeof(std::uint16_t));
    }
    rows.resize(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = raw.data() + static_cast<std::size_t>(y) * rowbytes;

    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace promist
