/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: core/include/fa3d/types.hpp
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
#pragma once

#ifndef FA3D_TYPES_HPP
#define FA3D_TYPES_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fa3d {

/// Homogeneous 3D landmark matrix, 4xN (last row all ones).
using Shape3D = Eigen::Matrix<double, 4, Eigen::Dynamic>;

/// 2D landmark matrix, 2xN, in pixels.
using Landmarks2D = Eigen::Matrix<double, 2, Eigen::Dynamic>;

/// Raised for malformed inputs, files or dimension mismatches (CLI exit code 2).
class validation_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Raised for degenerate or singular numerical configurations (CLI exit code 3).
class numerical_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Axis-aligned face bounding box in pixels.
struct BoundingBox
{
    double x = 0.0;
    double y = 0.0;
    double width = 0.0;
    double height = 0.0;

    bool valid() const { return width > 0.0 && height > 0.0; }

    /// sqrt(width*height); the normalizer d of the NME metric and the
    /// length unit of bbox-normalized feature offsets.
    double side() const { return std::sqrt(width * height); }

    double center_x() const { return x + 0.5 * width; }
    double center_y() const { return y + 0.5 * height; }
};

/// Grayscale image with intensities in [0,1], row-major.
struct Image
{
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    Image() = default;
    Image(int w, int h, double fill = 0.0) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    double& operator()(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    double operator()(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

    /// Pixel access with edge clamping.
    double at_clamped(int x, int y) const
    {
        x = std::clamp(x, 0, width - 1);
        y = std::clamp(y, 0, height - 1);
        return (*this)(x, y);
    }

    /// Bilinear sample with edge clamping; total over the whole plane.
    double sample(double x, double y) const
    {
        const double fx = std::floor(x);
        const double fy = std::floor(y);
        const int x0 = static_cast<int>(fx);
        const int y0 = static_cast<int>(fy);
        const double ax = x - fx;
        const double ay = y - fy;
        const double i00 = at_clamped(x0, y0);
        const double i10 = at_clamped(x0 + 1, y0);
        const double i01 = at_clamped(x0, y0 + 1);
        const double i11 = at_clamped(x0 + 1, y0 + 1);
        return (1.0 - ay) * ((1.0 - ax) * i00 + ax * i10) + ay * ((1.0 - ax) * i01 + ax * i11);
    }
};

/// Deterministic xoshiro256** generator. Used everywhere instead of the
/// standard <random> distributions so that fixed seeds give identical
/// streams independent of the standard library implementation.
class Rng
{
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
    {
        // splitmix64 seeding, mixing in the stream index for derived
        // per-sample generators.
        std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
        for (auto& si : s_)
        {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            si = z ^ (z >> 31);
        }
    }

    std::uint64_t next_u64()
    {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0,1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

    /// Standard normal via Box-Muller (uncached; two uniforms per draw).
    double normal()
    {
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

} // namespace fa3d

#endif /* FA3D_TYPES_HPP */
