#include "fallguard/overlay.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

namespace fallguard {

namespace {

// 5x7 raster glyphs, one byte per row, low 5 bits used (MSB left).
struct Glyph {
    char ch;
    std::array<std::uint8_t, 7> rows;
};

constexpr Glyph kFont[] = {
    {' ', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}},
    {'-', {0x00, 0x00, 0x00, 0x1f, 0x00, 0x00, 0x00}},
    {'_', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1f}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0c, 0x0c}},
    {':', {0x00, 0x0c, 0x0c, 0x00, 0x0c, 0x0c, 0x00}},
    {'(', {0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02}},
    {')', {0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08}},
    {'/', {0x01, 0x02, 0x04, 0x04, 0x08, 0x10, 0x00}},
    {'=', {0x00, 0x00, 0x1f, 0x00, 0x1f, 0x00, 0x00}},
    {'0', {0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e}},
    {'1', {0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e}},
    {'2', {0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f}},
    {'3', {0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e}},
    {'4', {0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02}},
    {'5', {0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e}},
    {'6', {0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e}},
    {'7', {0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e}},
    {'9', {0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c}},
    {'A', {0x0e, 0x11, 0x11, 0x1f, 0x11, 0x11, 0x11}},
    {'B', {0x1e, 0x11, 0x11, 0x1e, 0x11, 0x11, 0x1e}},
    {'C', {0x0e, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0e}},
    {'D', {0x1c, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1c}},
    {'E', {0x1f, 0x10, 0x10, 0x1e, 0x10, 0x10, 0x1f}},
    {'F', {0x1f, 0x10, 0x10, 0x1e, 0x10, 0x10, 0x10}},
    {'G', {0x0e, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0f}},
    {'H', {0x11, 0x11, 0x11, 0x1f, 0x11, 0x11, 0x11}},
    {'I', {0x0e, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0e}},
    {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0c}},
    {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}},
    {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1f}},
    {'M', {0x11, 0x1b, 0x15, 0x15, 0x11, 0x11, 0x11}},
    {'N', {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11}},
    {'O', {0x0e, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0e}},
    {'P', {0x1e, 0x11, 0x11, 0x1e, 0x10, 0x10, 0x10}},
    {'Q', {0x0e, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0d}},
    {'R', {0x1e, 0x11, 0x11, 0x1e, 0x14, 0x12, 0x11}},
    {'S', {0x0f, 0x10, 0x10, 0x0e, 0x01, 0x01, 0x1e}},
    {'T', {0x1f, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
    {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0e}},
    {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0a, 0x04}},
    {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0a}},
    {'X', {0x11, 0x11, 0x0a, 0x04, 0x0a, 0x11, 0x11}},
    {'Y', {0x11, 0x11, 0x0a, 0x04, 0x04, 0x04, 0x04}},
    {'Z', {0x1f, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1f}},
};

const Glyph* find_glyph(char c) {
    const char up = char(std::toupper(static_cast<unsigned char>(c)));
    for (const auto& g : kFont)
        if (g.ch == up) return &g;
    return nullptr;
}

void put_pixel(RgbImage& img, int x, int y, OverlayColor c) {
    if (x < 0 || x >= img.width || y < 0 || y >= img.height) return;
    std::uint8_t* px = img.at(x, y);
    px[0] = c.r;
    px[1] = c.g;
    px[2] = c.b;
}

}  // namespace

OverlayColor severity_color(Severity s) {
    switch (s) {
        case Severity::none: return {130, 130, 130};
        case Severity::moderate: return {255, 170, 0};
        case Severity::high: return {220, 40, 40};
    }
    return {255, 255, 255};
}

void draw_box(RgbImage& img, const BBox& box, OverlayColor color, int thickness) {
    const int x0 = int(std::lround(box.x_min));
    const int y0 = int(std::lround(box.y_min));
    const int x1 = int(std::lround(box.x_max)) - 1;
    const int y1 = int(std::lround(box.y_max)) - 1;

    for (int t = 0; t < thickness; ++t) {
        for (int x = x0; x <= x1; ++x) {
            put_pixel(img, x, y0 + t, color);
            put_pixel(img, x, y1 - t, color);
        }
        for (int y = y0; y <= y1; ++y) {
            put_pixel(img, x0 + t, y, color);
            put_pixel(img, x1 - t, y, color);
        }
    }
}

void draw_text(RgbImage& img, int x, int y, const std::string& text, OverlayColor color,
               int scale) {
    int pen_x = x;
    for (const char c : text) {
        const Glyph* glyph = find_glyph(c);
        if (glyph) {
            for (int row = 0; row < 7; ++row)
                for (int col = 0; col < 5; ++col) {
                    if (!(glyph->rows[std::size_t(row)] & (0x10 >> col))) continue;
                    for (int sy = 0; sy < scale; ++sy)
                        for (int sx = 0; sx < scale; ++sx)
                            put_pixel(img, pen_x + col * scale + sx, y + row * scale + sy,
                                      color);
                }
        }
        pen_x += 6 * scale;
    }
}

RgbImage render_overlay(const FrameBundle& bundle, const HazardReport& report) {
    RgbImage out = bundle.rgb;
    for (const auto& entry : report.entries) {
        const OverlayColor color = severity_color(entry.severity);
        draw_box(out, entry.object.bbox, color);

        std::string label = entry.object.raw_labels.empty()
                                ? to_string(entry.object.category)
                                : entry.object.raw_labels.front().label;
        label += " " + to_string(entry.severity);

        int text_y = int(std::lround(entry.object.bbox.y_min)) - 9;
        if (text_y < 0) text_y = int(std::lround(entry.object.bbox.y_min)) + 3;
        draw_text(out, int(std::lround(entry.object.bbox.x_min)), text_y, label, color);
    }
    return out;
}

}  // namespace fallguard
