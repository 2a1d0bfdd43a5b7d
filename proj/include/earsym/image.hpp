#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "earsym/error.hpp"

namespace earsym {

/// Sub-pixel location in raster coordinates. Rows grow downward.
struct Point {
    double row = 0.0;
    double col = 0.0;
};

/// Axis-aligned rectangle in raster coordinates.
struct Rect {
    int row = 0;
    int col = 0;
    int height = 0;
    int width = 0;
};

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major

    GrayImage() = default;
    GrayImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, 0) {}

    bool empty() const { return width <= 0 || height <= 0; }
    std::uint8_t at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * width + c]; }
    std::uint8_t& at(int r, int c) { return pixels[static_cast<std::size_t>(r) * width + c]; }
};

/// Binary occupancy raster: 1 = foreground pixel.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // row-major, 0/1

    Mask() = default;
    Mask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

    bool empty() const { return width <= 0 || height <= 0; }
    bool test(int r, int c) const { return bits[static_cast<std::size_t>(r) * width + c] != 0; }
    void set(int r, int c, bool v = true) { bits[static_cast<std::size_t>(r) * width + c] = v ? 1 : 0; }

    std::size_t count_set() const {
        std::size_t n = 0;
        for (std::uint8_t b : bits) n += b != 0;
        return n;
    }
};

inline GrayImage mirror_horizontal(const GrayImage& img) {
    GrayImage out(img.width, img.height);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c)
            out.at(r, c) = img.at(r, img.width - 1 - c);
    return out;
}

inline Mask mirror_horizontal(const Mask& mask) {
    Mask out(mask.width, mask.height);
    for (int r = 0; r < mask.height; ++r)
        for (int c = 0; c < mask.width; ++c)
            out.set(r, c, mask.test(r, mask.width - 1 - c));
    return out;
}

namespace detail {

// Pixel-center bilinear sample; outside the frame reads as 0.
inline double sample_bilinear(const GrayImage& img, double r, double c) {
    int r0 = static_cast<int>(std::floor(r));
    int c0 = static_cast<int>(std::floor(c));
    double fr = r - r0;
    double fc = c - c0;
    auto px = [&](int rr, int cc) -> double {
        if (rr < 0 || cc < 0 || rr >= img.height || cc >= img.width) return 0.0;
        return img.at(rr, cc);
    };
    double v0 = px(r0, c0) + fc * (px(r0, c0 + 1) - px(r0, c0));
    double v1 = px(r0 + 1, c0) + fc * (px(r0 + 1, c0 + 1) - px(r0 + 1, c0));
    return v0 + fr * (v1 - v0);
}

inline bool sample_nearest(const Mask& mask, double r, double c) {
    int ri = static_cast<int>(std::lround(r));
    int ci = static_cast<int>(std::lround(c));
    if (ri < 0 || ci < 0 || ri >= mask.height || ci >= mask.width) return false;
    return mask.test(ri, ci);
}

inline std::uint8_t clamp_u8(double v) {
    return static_cast<std::uint8_t>(std::min(255.0, std::max(0.0, std::round(v))));
}

}  // namespace detail

inline GrayImage resize_bilinear(const GrayImage& img, int new_w, int new_h) {
    if (img.empty()) throw EmptyImage("cannot resize an empty image");
    GrayImage out(new_w, new_h);
    double sr = static_cast<double>(img.height) / new_h;
    double sc = static_cast<double>(img.width) / new_w;
    for (int r = 0; r < new_h; ++r) {
        double src_r = std::clamp((r + 0.5) * sr - 0.5, 0.0, img.height - 1.0);
        for (int c = 0; c < new_w; ++c) {
            double src_c = std::clamp((c + 0.5) * sc - 0.5, 0.0, img.width - 1.0);
            out.at(r, c) = detail::clamp_u8(detail::sample_bilinear(img, src_r, src_c));
        }
    }
    return out;
}

inline Mask resize_nearest(const Mask& mask, int new_w, int new_h) {
    if (mask.empty()) throw EmptyMask("cannot resize an empty mask");
    Mask out(new_w, new_h);
    double sr = static_cast<double>(mask.height) / new_h;
    double sc = static_cast<double>(mask.width) / new_w;
    for (int r = 0; r < new_h; ++r) {
        int src_r = std::clamp(static_cast<int>((r + 0.5) * sr), 0, mask.height - 1);
        for (int c = 0; c < new_w; ++c) {
            int src_c = std::clamp(static_cast<int>((c + 0.5) * sc), 0, mask.width - 1);
            out.set(r, c, mask.test(src_r, src_c));
        }
    }
    return out;
}

/// Target dimensions that set the smaller side to `target` while preserving
/// the aspect ratio. The larger side never rounds below `target`.
inline std::pair<int, int> dims_for_min_side(int width, int height, int target) {
    if (width <= height) {
        int h = static_cast<int>(std::llround(static_cast<double>(height) * target / width));
        return {target, std::max(h, target)};
    }
    int w = static_cast<int>(std::llround(static_cast<double>(width) * target / height));
    return {std::max(w, target), target};
}

// Rotation convention: positive angles turn the displayed image counter-clockwise.
// With rows growing downward the forward map of an offset (dr, dc) is
//   (dr', dc') = (cos a * dr - sin a * dc, sin a * dr + cos a * dc).

inline GrayImage rotate_bilinear(const GrayImage& img, double angle_deg, Point center) {
    GrayImage out(img.width, img.height);
    double a = -angle_deg * std::numbers::pi / 180.0;  // inverse map
    double ca = std::cos(a), sa = std::sin(a);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            double dr = r - center.row;
            double dc = c - center.col;
            double src_r = ca * dr - sa * dc + center.row;
            double src_c = sa * dr + ca * dc + center.col;
            out.at(r, c) = detail::clamp_u8(detail::sample_bilinear(img, src_r, src_c));
        }
    }
    return out;
}

inline Mask rotate_nearest(const Mask& mask, double angle_deg, Point center) {
    Mask out(mask.width, mask.height);
    double a = -angle_deg * std::numbers::pi / 180.0;
    double ca = std::cos(a), sa = std::sin(a);
    for (int r = 0; r < mask.height; ++r) {
        for (int c = 0; c < mask.width; ++c) {
            double dr = r - center.row;
            double dc = c - center.col;
            double src_r = ca * dr - sa * dc + center.row;
            double src_c = sa * dr + ca * dc + center.col;
            out.set(r, c, detail::sample_nearest(mask, src_r, src_c));
        }
    }
    return out;
}

inline Point centroid(const Mask& mask) {
    double sum_r = 0.0, sum_c = 0.0;
    std::size_t n = 0;
    for (int r = 0; r < mask.height; ++r)
        for (int c = 0; c < mask.width; ++c)
            if (mask.test(r, c)) {
                sum_r += r;
                sum_c += c;
                ++n;
            }
    if (n == 0) throw EmptyMask("centroid of an all-zero mask");
    return {sum_r / n, sum_c / n};
}

inline std::optional<Rect> bounding_box(const Mask& mask) {
    int min_r = mask.height, min_c = mask.width, max_r = -1, max_c = -1;
    for (int r = 0; r < mask.height; ++r)
        for (int c = 0; c < mask.width; ++c)
            if (mask.test(r, c)) {
                min_r = std::min(min_r, r);
                min_c = std::min(min_c, c);
                max_r = std::max(max_r, r);
                max_c = std::max(max_c, c);
            }
    if (max_r < 0) return std::nullopt;
    return Rect{min_r, min_c, max_r - min_r + 1, max_c - min_c + 1};
}

inline GrayImage crop(const GrayImage& img, const Rect& rect) {
    GrayImage out(rect.width, rect.height);
    for (int r = 0; r < rect.height; ++r)
        for (int c = 0; c < rect.width; ++c)
            out.at(r, c) = img.at(rect.row + r, rect.col + c);
    return out;
}

inline Mask crop(const Mask& mask, const Rect& rect) {
    Mask out(rect.width, rect.height);
    for (int r = 0; r < rect.height; ++r)
        for (int c = 0; c < rect.width; ++c)
            out.set(r, c, mask.test(rect.row + r, rect.col + c));
    return out;
}

}  // namespace earsym
