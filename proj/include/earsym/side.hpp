#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>

#include "earsym/error.hpp"
#include "earsym/image.hpp"

namespace earsym {

enum class Side { left, right };
enum class SideSource { metadata, external, geometric };

struct SideLabel {
    Side value = Side::left;
    SideSource source = SideSource::geometric;
};

inline char side_to_char(Side s) { return s == Side::left ? 'L' : 'R'; }

inline const char* side_source_name(SideSource s) {
    switch (s) {
        case SideSource::metadata: return "metadata";
        case SideSource::external: return "external";
        case SideSource::geometric: return "geometric";
    }
    return "?";
}

namespace detail {

// Sign of the third central moment of the set-pixel column distribution,
// evaluated in exact integer arithmetic:
//   sign(sum (c - mean)^3) = sign(n^2*S3 - 3*n*S1*S2 + 2*S1^3),  Sk = sum c^k.
// Columns are shifted to start at the mask's leftmost set column, which keeps
// intermediates in __int128 range and makes translation invariance exact.
inline int column_third_moment_sign(const Mask& mask) {
    int min_c = mask.width;
    for (int r = 0; r < mask.height; ++r)
        for (int c = 0; c < mask.width; ++c)
            if (mask.test(r, c)) min_c = std::min(min_c, c);

    __int128 n = 0, s1 = 0, s2 = 0, s3 = 0;
    for (int r = 0; r < mask.height; ++r)
        for (int c = 0; c < mask.width; ++c)
            if (mask.test(r, c)) {
                __int128 x = c - min_c;
                n += 1;
                s1 += x;
                s2 += x * x;
                s3 += x * x * x;
            }
    __int128 m = n * n * s3 - 3 * n * s1 * s2 + 2 * s1 * s1 * s1;
    return m > 0 ? 1 : (m < 0 ? -1 : 0);
}

}  // namespace detail

/// Standardized skewness of the set-pixel column coordinates (0 when the
/// column variance vanishes).
inline double column_skewness(const Mask& mask) {
    double n = 0.0, sum = 0.0;
    for (int r = 0; r < mask.height; ++r)
        for (int c = 0; c < mask.width; ++c)
            if (mask.test(r, c)) {
                n += 1.0;
                sum += c;
            }
    if (n == 0.0) throw EmptyMask("column_skewness: mask has no set pixels");
    double mean = sum / n;
    double m2 = 0.0, m3 = 0.0;
    for (int r = 0; r < mask.height; ++r)
        for (int c = 0; c < mask.width; ++c)
            if (mask.test(r, c)) {
                double d = c - mean;
                m2 += d * d;
                m3 += d * d * d;
            }
    m2 /= n;
    m3 /= n;
    if (m2 == 0.0) return 0.0;
    return m3 / std::pow(m2, 1.5);
}

/// Deterministic geometric side baseline: positive column skewness reads as a
/// RIGHT ear, negative as LEFT, exact zero as LEFT. The sign test runs in
/// exact integer arithmetic so mirroring flips the label whenever the third
/// moment is nonzero.
inline SideLabel classify_side_geometric(const Mask& mask) {
    if (mask.count_set() < 3) throw DegenerateMask("classify_side_geometric: fewer than 3 set pixels");
    int sign = detail::column_third_moment_sign(mask);
    return {sign > 0 ? Side::right : Side::left, SideSource::geometric};
}

/// Geometric labels for a set of masks. Degenerate masks are skipped (the
/// caller treats them as "no geometric source"). `invert` flips the convention.
inline std::map<std::string, Side> geometric_labels(const std::map<std::string, Mask>& masks,
                                                    bool invert = false) {
    std::map<std::string, Side> out;
    for (const auto& [id, mask] : masks) {
        if (mask.count_set() < 3) continue;
        Side s = classify_side_geometric(mask).value;
        if (invert) s = s == Side::left ? Side::right : Side::left;
        out.emplace(id, s);
    }
    return out;
}

}  // namespace earsym
