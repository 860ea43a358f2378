/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: core/src/image_io.cpp
 *
 * Copyright 2026 The fa3d authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "fa3d/io.hpp"

#include <png.h>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace fa3d {

namespace {

Image load_pgm(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw validation_error("load_image: cannot open " + path.string());

    std::string magic;
    in >> magic;
    if (magic != "P5" && magic != "P2")
        throw validation_error("load_image: not a P2/P5 PGM file: " + path.string());

    auto next_token = [&in, &path]() {
        std::string tok;
        while (in >> tok)
        {
            if (tok[0] == '#')
            {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            return tok;
        }
        throw validation_error("load_image: truncated PGM header in " + path.string());
    };

    const int w = std::stoi(next_token());
    const int h = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
        throw validation_error("load_image: unsupported PGM geometry in " + path.string());

    Image img(w, h);
    if (magic == "P5")
    {
        in.get(); // single whitespace after maxval
        std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (in.gcount() != static_cast<std::streamsize>(raw.size()))
            throw validation_error("load_image: truncated PGM payload in " + path.string());
        for (std::size_t i = 0; i < raw.size(); ++i)
            img.pixels[i] = static_cast<double>(raw[i]) / maxval;
    }
    else
    {
        for (auto& px : img.pixels)
        {
            int v;
            if (!(in >> v))
                throw validation_error("load_image: truncated PGM payload in " + path.string());
            px = static_cast<double>(v) / maxval;
        }
    }
    return img;
}

Image load_png(const std::filesystem::path& path)
{
    std::FILE* fp = std::fopen(path.string().c_str(), "rb");
    if (!fp)
        throw validation_error("load_image: cannot open " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info || setjmp(png_jmpbuf(png)))
    {
        if (png)
            png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        std::fclose(fp);
        throw validation_error("load_image: failed to decode PNG " + path.string());
    }

    png_init_io(png, fp);
    png_read_info(png, info);

    // Normalize everything to 8-bit grayscale.
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (png_get_color_type(png, info) & PNG_COLOR_MASK_COLOR)
        png_set_rgb_to_gray(png, 1, -1.0, -1.0);
    if (png_get_bit_depth(png, info) < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    png_read_update_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    Image img(w, h);
    std::vector<unsigned char> row(static_cast<std::size_t>(png_get_rowbytes(png, info)));
    for (int y = 0; y < h; ++y)
    {
        png_read_row(png, row.data(), nullptr);
        for (int x = 0; x < w; ++x)
            img(x, y) = static_cast<double>(row[static_cast<std::size_t>(x)]) / 255.0;
    }
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return img;
}

} // namespace

Image load_image(const std::filesystem::path& path)
{
    const std::string ext = path.extension().string();
    if (ext == ".png" || ext == ".PNG")
        return load_png(path);
    return load_pgm(path);
}

void save_pgm(const std::filesystem::path& path, const Image& img)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw validation_error("save_pgm: cannot write " + path.string());
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> raw(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        raw[i] = static_cast<unsigned char>(std::lround(std::clamp(img.pixels[i], 0.0, 1.0) * 255.0));
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

} // namespace fa3d
