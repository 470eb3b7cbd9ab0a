#include "bannerscope/color.hpp"

#include "bannerscope/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <utility>
#include <vector>

namespace bannerscope::css {

namespace {

struct NamedColor {
    std::string_view name;
    std::uint32_t rgb;
};

// The 16 basic keywords, 20 common extended ones, and the "grey" spellings.
constexpr std::array<NamedColor, 39> kNamedColors{{
    {"black", 0x000000},     {"silver", 0xc0c0c0},      {"gray", 0x808080},      {"white", 0xffffff},
    {"maroon", 0x800000},    {"red", 0xff0000},         {"purple", 0x800080},    {"fuchsia", 0xff00ff},
    {"green", 0x008000},     {"lime", 0x00ff00},        {"olive", 0x808000},     {"yellow", 0xffff00},
    {"navy", 0x000080},      {"blue", 0x0000ff},        {"teal", 0x008080},      {"aqua", 0x00ffff},
    {"orange", 0xffa500},    {"darkorange", 0xff8c00},  {"gold", 0xffd700},      {"crimson", 0xdc143c},
    {"tomato", 0xff6347},    {"coral", 0xff7f50},       {"orangered", 0xff4500}, {"darkred", 0x8b0000},
    {"darkgreen", 0x006400}, {"forestgreen", 0x228b22}, {"limegreen", 0x32cd32}, {"darkblue", 0x00008b},
    {"royalblue", 0x4169e1}, {"dodgerblue", 0x1e90ff},  {"steelblue", 0x4682b4}, {"lightgray", 0xd3d3d3},
    {"darkgray", 0xa9a9a9},  {"gainsboro", 0xdcdcdc},   {"whitesmoke", 0xf5f5f5}, {"pink", 0xffc0cb},
    {"grey", 0x808080},      {"lightgrey", 0xd3d3d3},   {"darkgrey", 0xa9a9a9},
}};

std::string lower_trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

std::optional<double> parse_number(std::string_view s) {
    double value = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::optional<std::uint8_t> parse_channel(std::string_view s) {
    double v = 0;
    if (!s.empty() && s.back() == '%') {
        const auto pct = parse_number(s.substr(0, s.size() - 1));
        if (!pct) return std::nullopt;
        v = std::clamp(*pct, 0.0, 100.0) * 255.0 / 100.0;
    } else {
        const auto num = parse_number(s);
        if (!num) return std::nullopt;
        v = std::clamp(*num, 0.0, 255.0);
    }
    return static_cast<std::uint8_t>(std::lround(v));
}

std::optional<double> parse_alpha(std::string_view s) {
    if (!s.empty() && s.back() == '%') {
        const auto pct = parse_number(s.substr(0, s.size() - 1));
        if (!pct) return std::nullopt;
        return std::clamp(*pct / 100.0, 0.0, 1.0);
    }
    const auto num = parse_number(s);
    if (!num) return std::nullopt;
    return std::clamp(*num, 0.0, 1.0);
}

std::optional<ColorRgba> parse_hex(std::string_view hex) {
    std::vector<int> d;
    for (char c : hex) {
        const int v = hex_digit(c);
        if (v < 0) return std::nullopt;
        d.push_back(v);
    }
    ColorRgba c;
    switch (d.size()) {
    case 3:
    case 4:
        c.r = static_cast<std::uint8_t>(d[0] * 17);
        c.g = static_cast<std::uint8_t>(d[1] * 17);
        c.b = static_cast<std::uint8_t>(d[2] * 17);
        if (d.size() == 4) c.a = d[3] * 17 / 255.0;
        return c;
    case 6:
    case 8:
        c.r = static_cast<std::uint8_t>(d[0] * 16 + d[1]);
        c.g = static_cast<std::uint8_t>(d[2] * 16 + d[3]);
        c.b = static_cast<std::uint8_t>(d[4] * 16 + d[5]);
        if (d.size() == 8) c.a = (d[6] * 16 + d[7]) / 255.0;
        return c;
    default:
        return std::nullopt;
    }
}

// Accepts both the legacy comma syntax and the space/slash syntax.
std::optional<ColorRgba> parse_rgb_function(std::string_view args) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : args) {
        if (ch == ',' || ch == '/' || std::isspace(static_cast<unsigned char>(ch))) {
            if (!cur.empty()) parts.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) parts.push_back(std::move(cur));
    if (parts.size() != 3 && parts.size() != 4) return std::nullopt;
    ColorRgba c;
    const auto r = parse_channel(parts[0]);
    const auto g = parse_channel(parts[1]);
    const auto b = parse_channel(parts[2]);
    if (!r || !g || !b) return std::nullopt;
    c.r = *r;
    c.g = *g;
    c.b = *b;
    if (parts.size() == 4) {
        const auto a = parse_alpha(parts[3]);
        if (!a) return std::nullopt;
        c.a = *a;
    }
    return c;
}

double linearize_wcag(std::uint8_t channel) {
    const double c = channel / 255.0;
    return c <= 0.03928 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double linearize_srgb(std::uint8_t channel) {
    const double c = channel / 255.0;
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    constexpr double delta = 6.0 / 29.0;
    return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

} // namespace

ColorRgba parse_color(std::string_view text) {
    const std::string s = lower_trim(text);
    if (s == "transparent") return ColorRgba::transparent();
    if (!s.empty() && s[0] == '#') {
        if (auto c = parse_hex(std::string_view(s).substr(1))) return *c;
        throw UnknownColor(std::string(text));
    }
    for (const auto& named : kNamedColors) {
        if (named.name == s) {
            return ColorRgba{static_cast<std::uint8_t>(named.rgb >> 16), static_cast<std::uint8_t>((named.rgb >> 8) & 0xff),
                             static_cast<std::uint8_t>(named.rgb & 0xff), 1.0};
        }
    }
    for (std::string_view fn : {"rgba(", "rgb("}) {
        if (s.starts_with(fn) && s.back() == ')') {
            if (auto c = parse_rgb_function(std::string_view(s).substr(fn.size(), s.size() - fn.size() - 1))) {
                return *c;
            }
            break;
        }
    }
    throw UnknownColor(std::string(text));
}

std::string to_css(const ColorRgba& c) {
    char buf[48];
    if (c.a >= 1.0) {
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
    } else {
        std::snprintf(buf, sizeof buf, "rgba(%d,%d,%d,%.3g)", c.r, c.g, c.b, c.a);
    }
    return buf;
}

double relative_luminance(const ColorRgba& c) {
    return 0.2126 * linearize_wcag(c.r) + 0.7152 * linearize_wcag(c.g) + 0.0722 * linearize_wcag(c.b);
}

double contrast_ratio(const ColorRgba& a, const ColorRgba& b) {
    const double la = relative_luminance(a);
    const double lb = relative_luminance(b);
    const auto [lo, hi] = std::minmax(la, lb);
    return (hi + 0.05) / (lo + 0.05);
}

Lab to_lab(const ColorRgba& c) {
    const double r = linearize_srgb(c.r);
    const double g = linearize_srgb(c.g);
    const double b = linearize_srgb(c.b);
    const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    // D65 reference white
    const double fx = lab_f(x / 0.95047);
    const double fy = lab_f(y / 1.00000);
    const double fz = lab_f(z / 1.08883);
    return Lab{116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

double delta_e(const ColorRgba& a, const ColorRgba& b) {
    const Lab p = to_lab(a);
    const Lab q = to_lab(b);
    return std::sqrt((p.l - q.l) * (p.l - q.l) + (p.a - q.a) * (p.a - q.a) + (p.b - q.b) * (p.b - q.b));
}

} // namespace bannerscope::css
