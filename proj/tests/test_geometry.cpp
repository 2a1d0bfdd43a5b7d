#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "earsym/earsym.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace earsym;

namespace {

bool same_chords(const std::vector<Chord>& a, const std::vector<Chord>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i].top == b[i].top && a[i].bot == b[i].bot && a[i].length == b[i].length)) return false;
    return true;
}

}  // namespace

TEST_CASE("boundary of trivial masks", "[geometry]") {
    Mask single(1, 1);
    single.set(0, 0);
    auto b = extract_boundary(single);
    REQUIRE(b.size() == 1);
    REQUIRE(b[0] == PixelCoord{0, 0});

    Mask full(3, 3);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) full.set(r, c);
    auto perim = extract_boundary(full);
    REQUIRE(perim.size() == 8);  // center pixel has all 4-neighbors set
    for (const auto& p : perim) REQUIRE_FALSE(p == PixelCoord{1, 1});

    REQUIRE_THROWS_AS(extract_boundary(Mask(4, 4)), EmptyMask);
}

TEST_CASE("boundary keeps only the largest component", "[geometry]") {
    Mask mask(9, 5);
    // 5-pixel plus-shape component
    mask.set(1, 1);
    mask.set(0, 1);
    mask.set(2, 1);
    mask.set(1, 0);
    mask.set(1, 2);
    // 2-pixel component far away
    mask.set(4, 7);
    mask.set(4, 8);
    auto b = extract_boundary(mask);
    REQUIRE(b.size() == 5);  // all plus pixels are boundary
    for (const auto& p : b) REQUIRE(p.col <= 2);
    REQUIRE(same_chords(longest_chords(mask, 3), oracle::exhaustive_longest_chords(mask, 3)));

    auto oracle_b = oracle::boundary_by_union_find(mask);
    REQUIRE(b.size() == oracle_b.size());
    for (std::size_t i = 0; i < b.size(); ++i) REQUIRE(b[i] == oracle_b[i]);
}

TEST_CASE("longest chord of simple shapes", "[geometry]") {
    Mask strip(1, 3);
    strip.set(0, 0);
    strip.set(1, 0);
    strip.set(2, 0);
    auto chords = longest_chords(strip, 1);
    REQUIRE(chords.size() == 1);
    REQUIRE(chords[0].top == PixelCoord{0, 0});
    REQUIRE(chords[0].bot == PixelCoord{2, 0});
    REQUIRE(chords[0].length == 2.0);

    Mask rect(10, 4);  // 4 rows x 10 cols
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 10; ++c) rect.set(r, c);
    auto diag = longest_chords(rect, 1);
    REQUIRE(diag[0].length == std::sqrt(90.0));
    // two diagonals tie; lexicographic order picks the one starting at (0,0)
    REQUIRE(diag[0].top == PixelCoord{0, 0});
    REQUIRE(diag[0].bot == PixelCoord{3, 9});

    Mask lone(5, 5);
    lone.set(2, 2);
    REQUIRE_THROWS_AS(longest_chords(lone, 1), DegenerateMask);
    REQUIRE_THROWS_AS(longest_chords(rect, 0), InvalidConfig);
}

TEST_CASE("chord selection equals exhaustive enumeration", "[geometry]") {
    Rng rng(10);
    int tested = 0;
    while (tested < 60) {
        Mask mask = testutil::random_mask(rng, 24);
        std::vector<PixelCoord> boundary;
        try {
            boundary = extract_boundary(mask);
        } catch (const EmptyMask&) {
            continue;
        }
        if (boundary.size() < 2) continue;
        int k = 1 + static_cast<int>(rng.index(80));
        REQUIRE(same_chords(longest_chords(mask, k), oracle::exhaustive_longest_chords(mask, k)));
        ++tested;
    }
}

TEST_CASE("ties on a disk are resolved deterministically", "[geometry]") {
    Mask disk = render_ellipse(41, 20.0, 20.0, 15.0, 15.0, 0.0);
    REQUIRE(same_chords(longest_chords(disk, 50), oracle::exhaustive_longest_chords(disk, 50)));
    AlignOutput a = align(mask_as_image(disk), disk, 50);
    AlignOutput b = align(mask_as_image(disk), disk, 50);
    REQUIRE(a.info.angle_deg == b.info.angle_deg);
    REQUIRE(a.mask.bits == b.mask.bits);
    REQUIRE(a.image.pixels == b.image.pixels);
}

TEST_CASE("axis estimation", "[geometry]") {
    std::vector<Chord> same(5, Chord{{0, 0}, {4, 0}, 4.0});
    Axis axis = estimate_axis(same);
    REQUIRE(axis.top.row == 0.0);
    REQUIRE(axis.top.col == 0.0);
    REQUIRE(axis.bot.row == 4.0);
    REQUIRE(axis.bot.col == 0.0);

    std::vector<Chord> pair = {{{0, 0}, {4, 0}, 4.0}, {{0, 2}, {4, 2}, 4.0}};
    Axis mid = estimate_axis(pair);
    REQUIRE(mid.top.col == 1.0);
    REQUIRE(mid.bot.col == 1.0);

    REQUIRE_THROWS_AS(estimate_axis({}), EmptyChordList);
}

TEST_CASE("top-50 chord axis matches the ellipse major axis", "[geometry]") {
    for (double theta : {0.0, 12.0, -25.0}) {
        Mask ellipse = render_ellipse(161, 80.0, 80.0, 62.0, 33.0, theta);
        Axis axis = estimate_axis(longest_chords(ellipse, 50));
        double dr = axis.bot.row - axis.top.row;
        double dc = axis.bot.col - axis.top.col;
        double angle = std::atan2(dc, dr) * 180.0 / std::numbers::pi;  // 0 = straight down
        REQUIRE(std::abs(angle - theta) < 1.0);
    }
}

TEST_CASE("align recovers a known ellipse rotation", "[geometry]") {
    Mask upright = render_ellipse(161, 80.0, 80.0, 60.0, 33.0, 0.0);
    AlignOutput a = align(mask_as_image(upright), upright, 50);
    REQUIRE(std::abs(a.info.angle_deg) < 0.5);
    auto box = bounding_box(a.mask);
    REQUIRE(box->row == 0);
    REQUIRE(box->col == 0);
    REQUIRE(box->height == a.mask.height);
    REQUIRE(box->width == a.mask.width);

    Mask rotated = render_ellipse(161, 80.0, 80.0, 60.0, 33.0, 30.0);
    AlignOutput b = align(mask_as_image(rotated), rotated, 50);
    REQUIRE(std::abs(b.info.angle_deg - (-30.0)) < 2.0);
}

TEST_CASE("align validates its inputs", "[geometry]") {
    Mask mask(8, 8);
    mask.set(4, 4);
    REQUIRE_THROWS_AS(align(GrayImage(9, 8), mask, 50), NonMatchingDimensions);
    REQUIRE_THROWS_AS(align(GrayImage(8, 8), mask, 50), DegenerateMask);
}

TEST_CASE("alignment result invariants", "[geometry]") {
    Rng rng(21);
    for (int i = 0; i < 8; ++i) {
        double theta = rng.uniform(-40.0, 40.0);
        Mask mask = render_ellipse(140, 69.5, 69.5, 52.0, 29.0, theta);
        AlignOutput out = align(mask_as_image(mask), mask, 50);

        // applying `angle` to the recorded axis makes it vertical
        double a = out.info.angle_deg * std::numbers::pi / 180.0;
        double dr = out.info.axis_bot.row - out.info.axis_top.row;
        double dc = out.info.axis_bot.col - out.info.axis_top.col;
        double rot_dc = std::sin(a) * dr + std::cos(a) * dc;
        REQUIRE(std::abs(std::atan2(rot_dc, std::cos(a) * dr - std::sin(a) * dc)) < 1e-6);

        // rotation consistency: re-estimating on the aligned mask is ~0
        Axis again = estimate_axis(longest_chords(out.mask, 50));
        REQUIRE(std::abs(axis_to_vertical_deg(again)) < 1.0);

        // crop tightness: the cropped mask touches all four edges
        auto box = bounding_box(out.mask);
        REQUIRE(box->row == 0);
        REQUIRE(box->col == 0);
        REQUIRE(box->height == out.mask.height);
        REQUIRE(box->width == out.mask.width);
        REQUIRE(out.image.width == out.mask.width);
        REQUIRE(out.image.height == out.mask.height);
    }
}

TEST_CASE("mirror equivariance of the recovered angle", "[geometry]") {
    Rng rng(22);
    for (int i = 0; i < 6; ++i) {
        double theta = rng.uniform(-35.0, 35.0);
        auto [mask, truth] = gen_mask(i % 2 ? Side::left : Side::right, theta, 128, 900 + i);
        GrayImage img = mask_as_image(mask);
        double angle = align(img, mask, 50).info.angle_deg;
        double mirrored = align(mirror_horizontal(img), mirror_horizontal(mask), 50).info.angle_deg;
        REQUIRE(std::abs(mirrored + angle) < 1.0);
    }
}

TEST_CASE("angle estimate survives the 80px normalization", "[geometry]") {
    Rng rng(23);
    for (int i = 0; i < 6; ++i) {
        double theta = rng.uniform(-30.0, 30.0);
        Mask full = render_ellipse(220, 109.5, 109.5, 82.0, 45.0, theta);
        double full_res = axis_to_vertical_deg(estimate_axis(longest_chords(full, 50)));
        double normalized = align(mask_as_image(full), full, 50).info.angle_deg;
        REQUIRE(std::abs(full_res - normalized) < 2.0);
    }
}
