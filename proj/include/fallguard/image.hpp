#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "fallguard/errors.hpp"

namespace fallguard {

// 8-bit interleaved RGB raster, row-major.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // 3 bytes per pixel

    static RgbImage filled(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b);

    bool empty() const { return width <= 0 || height <= 0; }

    std::uint8_t* at(int x, int y) { return pixels.data() + 3 * (std::size_t(y) * width + x); }
    const std::uint8_t* at(int x, int y) const {
        return pixels.data() + 3 * (std::size_t(y) * width + x);
    }
};

// Per-pixel depth in meters. Values <= 0 or non-finite mean "no reading".
struct DepthImage {
    int width = 0;
    int height = 0;
    std::vector<float> meters;

    static DepthImage invalid_filled(int w, int h);

    float at(int x, int y) const { return meters[std::size_t(y) * width + x]; }
    float& at(int x, int y) { return meters[std::size_t(y) * width + x]; }

    bool valid_at(int x, int y) const {
        const float d = at(x, y);
        return d > 0.0f && std::isfinite(d);
    }
};

struct MaskImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> on;

    static MaskImage blank(int w, int h);

    bool at(int x, int y) const { return on[std::size_t(y) * width + x] != 0; }
    void set(int x, int y, bool v) { on[std::size_t(y) * width + x] = v ? 1 : 0; }
    int count() const;
};

// Ratio |a AND b| / |a OR b|; 1.0 when both masks are empty.
double mask_iou(const MaskImage& a, const MaskImage& b);

// 16-bit single-channel raster as stored on disk (depth in millimeters, 0 = invalid).
struct Raster16 {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> values;
};

// Binary PPM (P6, maxval 255) and PGM (P5, maxval 65535, big-endian samples).
// Readers throw LoadError naming the file on any malformed input.
void write_ppm(const RgbImage& img, const std::filesystem::path& path);
RgbImage read_ppm(const std::filesystem::path& path);
void write_pgm16(const Raster16& img, const std::filesystem::path& path);
Raster16 read_pgm16(const std::filesystem::path& path);

}  // namespace fallguard
