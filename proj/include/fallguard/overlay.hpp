#pragma once

#include <cstdint>
#include <string>

#include "fallguard/backends.hpp"
#include "fallguard/frame.hpp"
#include "fallguard/hazard.hpp"
#include "fallguard/image.hpp"

namespace fallguard {

struct OverlayColor {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
};

// Severity color coding used by the overlay: none gray, moderate amber,
// high red.
OverlayColor severity_color(Severity s);

void draw_box(RgbImage& img, const BBox& box, OverlayColor color, int thickness = 2);
void draw_text(RgbImage& img, int x, int y, const std::string& text, OverlayColor color,
               int scale = 1);

// Copy of the bundle's RGB image with one color-coded box and label per
// report entry. An empty report returns the image unchanged.
RgbImage render_overlay(const FrameBundle& bundle, const HazardReport& report);

}  // namespace fallguard
