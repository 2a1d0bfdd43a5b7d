#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <queue>
#include <vector>

#include "earsym/error.hpp"
#include "earsym/image.hpp"

namespace earsym {

inline constexpr int kDefaultChordCount = 50;
inline constexpr int kAlignMinSide = 80;

struct PixelCoord {
    int row = 0;
    int col = 0;
    friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// Straight segment between two boundary pixels. `top` is the endpoint with
/// the smaller row (ties broken by smaller column).
struct Chord {
    PixelCoord top;
    PixelCoord bot;
    double length = 0.0;
};

/// Estimated principal axis: mean top and mean bottom endpoint of a chord set.
struct Axis {
    Point top;
    Point bot;
};

struct AlignmentResult {
    double angle_deg = 0.0;  // rotation applied, counter-clockwise positive
    Point axis_top;          // in the resized, pre-rotation frame
    Point axis_bot;
    Rect crop;               // in the rotated frame
};

struct AlignOutput {
    GrayImage image;
    Mask mask;
    AlignmentResult info;
};

/// Boundary of the largest 4-connected foreground component: its pixels that
/// touch the image border or have at least one unset 4-neighbor. Row-major order.
inline std::vector<PixelCoord> extract_boundary(const Mask& mask) {
    const int w = mask.width, h = mask.height;
    std::vector<std::int32_t> label(static_cast<std::size_t>(w) * h, -1);
    std::int32_t n_labels = 0;
    std::size_t best_size = 0;
    std::int32_t best_label = -1;

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!mask.test(r, c) || label[static_cast<std::size_t>(r) * w + c] >= 0) continue;
            std::int32_t cur = n_labels++;
            std::size_t size = 0;
            std::queue<PixelCoord> queue;
            queue.push({r, c});
            label[static_cast<std::size_t>(r) * w + c] = cur;
            while (!queue.empty()) {
                PixelCoord p = queue.front();
                queue.pop();
                ++size;
                const int dr[4] = {-1, 1, 0, 0};
                const int dc[4] = {0, 0, -1, 1};
                for (int k = 0; k < 4; ++k) {
                    int nr = p.row + dr[k], nc = p.col + dc[k];
                    if (nr < 0 || nc < 0 || nr >= h || nc >= w) continue;
                    std::size_t idx = static_cast<std::size_t>(nr) * w + nc;
                    if (mask.bits[idx] && label[idx] < 0) {
                        label[idx] = cur;
                        queue.push({nr, nc});
                    }
                }
            }
            if (size > best_size) {  // ties keep the first component in scan order
                best_size = size;
                best_label = cur;
            }
        }
    }
    if (best_label < 0) throw EmptyMask("extract_boundary: mask has no set pixels");

    std::vector<PixelCoord> boundary;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (label[static_cast<std::size_t>(r) * w + c] != best_label) continue;
            bool edge = r == 0 || c == 0 || r == h - 1 || c == w - 1 || !mask.test(r - 1, c) ||
                        !mask.test(r + 1, c) || !mask.test(r, c - 1) || !mask.test(r, c + 1);
            if (edge) boundary.push_back({r, c});
        }
    }
    return boundary;
}

/// The k longest chords over all unordered boundary-pixel pairs, sorted by
/// descending length; equal lengths ordered lexicographically on (top, bot).
/// Returns all pairs when fewer than k exist.
inline std::vector<Chord> longest_chords(const Mask& mask, int k) {
    if (k < 1) throw InvalidConfig("longest_chords: k must be >= 1");
    std::vector<PixelCoord> boundary = extract_boundary(mask);
    const std::size_t b = boundary.size();
    if (b < 2) throw DegenerateMask("longest_chords: boundary has fewer than 2 pixels");

    struct Candidate {
        std::int64_t sq_len;
        std::uint32_t i, j;
    };
    std::vector<Candidate> cands;
    cands.reserve(b * (b - 1) / 2);
    for (std::uint32_t i = 0; i + 1 < b; ++i) {
        for (std::uint32_t j = i + 1; j < b; ++j) {
            std::int64_t dr = boundary[j].row - boundary[i].row;
            std::int64_t dc = boundary[j].col - boundary[i].col;
            cands.push_back({dr * dr + dc * dc, i, j});
        }
    }
    // Boundary pixels come in row-major order, so index order on (i, j) is
    // exactly lexicographic order on (top, bot). Squared lengths are integers,
    // making the tie comparison exact.
    auto before = [](const Candidate& a, const Candidate& b2) {
        if (a.sq_len != b2.sq_len) return a.sq_len > b2.sq_len;
        if (a.i != b2.i) return a.i < b2.i;
        return a.j < b2.j;
    };
    std::size_t take = std::min<std::size_t>(k, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + take, cands.end(), before);

    std::vector<Chord> chords;
    chords.reserve(take);
    for (std::size_t t = 0; t < take; ++t) {
        const Candidate& cand = cands[t];
        chords.push_back({boundary[cand.i], boundary[cand.j], std::sqrt(static_cast<double>(cand.sq_len))});
    }
    return chords;
}

inline Axis estimate_axis(const std::vector<Chord>& chords) {
    if (chords.empty()) throw EmptyChordList("estimate_axis: no chords");
    Point top{0.0, 0.0}, bot{0.0, 0.0};
    for (const Chord& ch : chords) {
        top.row += ch.top.row;
        top.col += ch.top.col;
        bot.row += ch.bot.row;
        bot.col += ch.bot.col;
    }
    const double n = static_cast<double>(chords.size());
    return {{top.row / n, top.col / n}, {bot.row / n, bot.col / n}};
}

/// Angle (degrees, counter-clockwise positive) that makes the axis vertical
/// with `top` above `bot`.
inline double axis_to_vertical_deg(const Axis& axis) {
    double dr = axis.bot.row - axis.top.row;
    double dc = axis.bot.col - axis.top.col;
    if (dr == 0.0 && dc == 0.0) return 0.0;
    return std::atan2(-dc, dr) * 180.0 / std::numbers::pi;
}

/// Full alignment pipeline: normalize the smaller side to 80 px, estimate the
/// principal axis from the top-k longest chords, rotate both rasters about the
/// mask centroid so the axis is vertical, and crop to the rotated mask's tight
/// bounding box.
inline AlignOutput align(const GrayImage& image, const Mask& mask, int k = kDefaultChordCount) {
    if (image.width != mask.width || image.height != mask.height)
        throw NonMatchingDimensions("align: image and mask dimensions differ");
    if (image.empty()) throw EmptyImage("align: empty image");

    auto [new_w, new_h] = dims_for_min_side(image.width, image.height, kAlignMinSide);
    GrayImage img = resize_bilinear(image, new_w, new_h);
    Mask msk = resize_nearest(mask, new_w, new_h);

    Axis axis = estimate_axis(longest_chords(msk, k));
    double angle = axis_to_vertical_deg(axis);

    Point center = centroid(msk);
    GrayImage rot_img = rotate_bilinear(img, angle, center);
    Mask rot_msk = rotate_nearest(msk, angle, center);

    auto box = bounding_box(rot_msk);
    if (!box) throw DegenerateMask("align: mask vanished after rotation");

    return {crop(rot_img, *box), crop(rot_msk, *box), {angle, axis.top, axis.bot, *box}};
}

}  // namespace earsym
