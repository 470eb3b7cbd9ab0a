#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace bannerscope::css {

struct ColorRgba {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    double a = 1.0;

    static constexpr ColorRgba black() { return {0, 0, 0, 1.0}; }
    static constexpr ColorRgba white() { return {255, 255, 255, 1.0}; }
    static constexpr ColorRgba transparent() { return {0, 0, 0, 0.0}; }

    bool same_rgb(const ColorRgba& o) const noexcept { return r == o.r && g == o.g && b == o.b; }
    friend bool operator==(const ColorRgba&, const ColorRgba&) = default;
};

/// Hex notations, rgb()/rgba(), "transparent" and a table of named colors.
/// Throws UnknownColor for anything else.
ColorRgba parse_color(std::string_view text);

/// "#rrggbb" or "rgba(r,g,b,a)" when not opaque.
std::string to_css(const ColorRgba& c);

/// WCAG 2.1 relative luminance in [0, 1]; alpha is ignored.
double relative_luminance(const ColorRgba& c);

/// WCAG contrast ratio in [1, 21]; symmetric.
double contrast_ratio(const ColorRgba& a, const ColorRgba& b);

struct Lab {
    double l = 0;
    double a = 0;
    double b = 0;
};

/// sRGB (D65) to CIELAB.
Lab to_lab(const ColorRgba& c);

/// CIE76 color difference.
double delta_e(const ColorRgba& a, const ColorRgba& b);

} // namespace bannerscope::css
