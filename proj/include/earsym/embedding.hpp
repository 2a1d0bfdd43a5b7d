#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "earsym/error.hpp"
#include "earsym/geometry.hpp"
#include "earsym/image.hpp"
#include "earsym/rng.hpp"

namespace earsym {

using Embedding = std::vector<double>;

struct EmbedderSpec {
    enum class Kind { toy, file };
    Kind kind = Kind::toy;
    std::uint64_t seed = 0;
    int dim = 512;
};

inline double l2_norm(const Embedding& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

/// Normalized sum of the features of an image and its horizontal mirror.
/// Exactly opposed inputs are an error: a zero embedding would poison every
/// downstream cosine.
inline Embedding fuse_flip(const Embedding& feat_raw, const Embedding& feat_flipped) {
    if (feat_raw.size() != feat_flipped.size())
        throw NonMatchingDimensions("fuse_flip: embedding dimensions differ");
    Embedding sum(feat_raw.size());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = feat_raw[i] + feat_flipped[i];
    double norm = l2_norm(sum);
    if (norm < 1e-12) throw ZeroVector("fuse_flip: raw and flipped features cancel");
    for (double& x : sum) x /= norm;
    return sum;
}

/// Cosine similarity, clamped to [-1, 1] against rounding overshoot.
inline double cosine(const Embedding& u, const Embedding& v) {
    if (u.size() != v.size()) throw NonMatchingDimensions("cosine: embedding dimensions differ");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) throw ZeroVector("cosine: zero-norm embedding");
    return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

/// Deterministic stand-in for a learned feature extractor: the image is
/// bilinearly resized to 16x16, scaled to [0,1], pushed through a seeded
/// Gaussian random projection and L2-normalized. The projection matrix is a
/// pure function of (seed, dim) and may be shared read-only across threads.
class ToyEmbedder {
public:
    static constexpr int kPatchSide = 16;
    static constexpr int kInputDim = kPatchSide * kPatchSide;

    ToyEmbedder(std::uint64_t seed, int dim) : seed_(seed), dim_(dim) {
        if (dim < 2) throw InvalidConfig("ToyEmbedder: dim must be >= 2");
        projection_.resize(static_cast<std::size_t>(kInputDim) * dim);
        Rng rng(seed);
        for (double& v : projection_) v = rng.gaussian();
    }

    explicit ToyEmbedder(const EmbedderSpec& spec) : ToyEmbedder(spec.seed, spec.dim) {
        if (spec.kind != EmbedderSpec::Kind::toy)
            throw InvalidConfig("ToyEmbedder: spec kind is not 'toy'");
    }

    int dim() const { return dim_; }
    std::uint64_t seed() const { return seed_; }

    Embedding embed(const GrayImage& image) const {
        if (image.empty()) throw EmptyImage("toy_embed: empty image");
        GrayImage patch = resize_bilinear(image, kPatchSide, kPatchSide);
        Embedding out(dim_, 0.0);
        for (int i = 0; i < kInputDim; ++i) {
            double x = patch.pixels[i] / 255.0;
            if (x == 0.0) continue;
            const double* row = &projection_[static_cast<std::size_t>(i) * dim_];
            for (int j = 0; j < dim_; ++j) out[j] += x * row[j];
        }
        double norm = l2_norm(out);
        if (norm == 0.0) throw ZeroVector("toy_embed: projection output is exactly zero");
        for (double& v : out) v /= norm;
        return out;
    }

private:
    std::uint64_t seed_;
    int dim_;
    std::vector<double> projection_;  // kInputDim x dim, row-major
};

inline Embedding toy_embed(const GrayImage& image, const EmbedderSpec& spec) {
    return ToyEmbedder(spec).embed(image);
}

/// Flip-fused embedding of one image: embed the image and its horizontal
/// mirror, then fuse. With `use_alignment` the image is aligned first (a mask
/// is required). Mirroring commutes with the fusion sum, so the result is
/// invariant under mirroring of the input.
inline Embedding embed_image(const GrayImage& image, const Mask* mask, const ToyEmbedder& embedder,
                             bool use_alignment, int chord_count = kDefaultChordCount) {
    const GrayImage* input = &image;
    GrayImage aligned;
    if (use_alignment) {
        if (!mask) throw InvalidConfig("embed_image: alignment requested without a mask");
        aligned = align(image, *mask, chord_count).image;
        input = &aligned;
    }
    Embedding raw = embedder.embed(*input);
    Embedding flipped = embedder.embed(mirror_horizontal(*input));
    return fuse_flip(raw, flipped);
}

}  // namespace earsym
