#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "earsym/csv.hpp"
#include "earsym/error.hpp"
#include "earsym/image.hpp"
#include "earsym/manifest.hpp"
#include "earsym/metrics.hpp"
#include "earsym/protocol.hpp"
#include "earsym/rng.hpp"
#include "earsym/side.hpp"
#include "earsym/store.hpp"

namespace earsym {

// ---------------------------------------------------------------------------
// Seeded embedding generator with a controllable bilateral asymmetry.
//
// Per subject s: identity direction u_s uniform on the sphere, asymmetry
// direction m_s drawn likewise and orthogonalized against u_s. Side prototypes
//   R_s = normalize(u_s + delta * m_s),   L_s = normalize(u_s - delta * m_s),
// so with epsilon = 0 every opposite-side genuine cosine is exactly
// (1 - delta^2) / (1 + delta^2). Image embeddings perturb the prototype with a
// Gaussian vector of expected norm epsilon (per-component sigma epsilon/sqrt(dim),
// so the noise magnitude is dimension-independent) and renormalize.
// ---------------------------------------------------------------------------

struct SynthConfig {
    int n_subjects = 2;
    int imgs_per_side = 1;
    int dim = 512;
    double delta = 0.0;    // asymmetry magnitude
    double epsilon = 0.0;  // noise magnitude
    std::uint64_t seed = 0;

    void validate() const {
        if (n_subjects < 2) throw InvalidConfig("synth: n_subjects must be >= 2");
        if (n_subjects > 9999) throw InvalidConfig("synth: n_subjects must be <= 9999");
        if (imgs_per_side < 1) throw InvalidConfig("synth: imgs_per_side must be >= 1");
        if (imgs_per_side > 999) throw InvalidConfig("synth: imgs_per_side must be <= 999");
        if (dim < 2) throw InvalidConfig("synth: dim must be >= 2");
        if (delta < 0.0) throw InvalidConfig("synth: delta must be >= 0");
        if (epsilon < 0.0) throw InvalidConfig("synth: epsilon must be >= 0");
    }
};

struct SynthDataset {
    Manifest manifest;     // all entries TEST; side and pose_deg filled in
    EmbeddingStore store;  // full double precision until saved or quantized
};

namespace detail {

inline void normalize_in_place(Embedding& v) {
    double n = l2_norm(v);
    for (double& x : v) x /= n;
}

inline Embedding random_unit(Rng& rng, int dim) {
    Embedding v(dim);
    while (true) {
        for (double& x : v) x = rng.gaussian();
        if (l2_norm(v) > 1e-9) break;
    }
    normalize_in_place(v);
    return v;
}

// Mask rotation streams sit far away from the per-subject embedding streams.
inline constexpr std::uint64_t kMaskStream = 0x100000000ull;

}  // namespace detail

inline std::string synth_subject_name(int s) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "s%04d", s);
    return buf;
}

inline std::string synth_image_id(int s, Side side, int img) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "s%04d_%c_%03d", s, side_to_char(side), img);
    return buf;
}

/// Per-image mask rotation in degrees, drawn from its own seeded stream so
/// skipping mask rendering never perturbs the embeddings.
inline double synth_rotation_deg(std::uint64_t seed, std::size_t image_index) {
    Rng rng(substream_seed(seed, detail::kMaskStream + 2 * image_index));
    return rng.uniform(-30.0, 30.0);
}

/// Seed for the shape jitter of one image's mask, independent of its rotation.
inline std::uint64_t synth_mask_seed(std::uint64_t seed, std::size_t image_index) {
    return substream_seed(seed, detail::kMaskStream + 2 * image_index + 1);
}

inline SynthDataset gen_subjects(const SynthConfig& cfg) {
    cfg.validate();
    SynthDataset ds;
    ds.store.dim = cfg.dim;
    std::size_t image_index = 0;

    for (int s = 0; s < cfg.n_subjects; ++s) {
        Rng rng(substream_seed(cfg.seed, static_cast<std::uint64_t>(s)));
        Embedding identity = detail::random_unit(rng, cfg.dim);
        Embedding asym;
        while (true) {
            asym = detail::random_unit(rng, cfg.dim);
            double proj = 0.0;
            for (int i = 0; i < cfg.dim; ++i) proj += asym[i] * identity[i];
            for (int i = 0; i < cfg.dim; ++i) asym[i] -= proj * identity[i];
            if (l2_norm(asym) > 1e-9) break;
        }
        detail::normalize_in_place(asym);

        for (Side side : {Side::left, Side::right}) {
            double sign = side == Side::left ? -1.0 : 1.0;
            Embedding prototype(cfg.dim);
            for (int i = 0; i < cfg.dim; ++i) prototype[i] = identity[i] + sign * cfg.delta * asym[i];
            detail::normalize_in_place(prototype);

            double noise_sigma = cfg.epsilon / std::sqrt(static_cast<double>(cfg.dim));
            for (int img = 0; img < cfg.imgs_per_side; ++img) {
                Embedding e(cfg.dim);
                for (int i = 0; i < cfg.dim; ++i) e[i] = prototype[i] + noise_sigma * rng.gaussian();
                detail::normalize_in_place(e);

                ManifestEntry entry;
                entry.id = synth_image_id(s, side, img);
                entry.subject = synth_subject_name(s);
                entry.side = side;
                entry.split = Split::test;
                entry.pose_deg = csv_round(synth_rotation_deg(cfg.seed, image_index));
                ds.manifest.entries.push_back(entry);
                ds.store.add(entry.id, e);
                ++image_index;
            }
        }
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Parametric ear-shaped masks
// ---------------------------------------------------------------------------

inline Mask render_ellipse(int canvas, double center_r, double center_c, double semi_major,
                           double semi_minor, double angle_deg) {
    Mask mask(canvas, canvas);
    double a = -angle_deg * std::numbers::pi / 180.0;  // rotate query into canonical frame
    double ca = std::cos(a), sa = std::sin(a);
    for (int r = 0; r < canvas; ++r) {
        for (int c = 0; c < canvas; ++c) {
            double dr = r - center_r, dc = c - center_c;
            double qr = ca * dr - sa * dc;
            double qc = sa * dr + ca * dc;
            double e = (qr / semi_major) * (qr / semi_major) + (qc / semi_minor) * (qc / semi_minor);
            if (e <= 1.0) mask.set(r, c);
        }
    }
    return mask;
}

struct MaskTruth {
    Side side = Side::left;
    double rotation_deg = 0.0;
    Point axis_top;
    Point axis_bot;
};

/// Vertically elongated ellipse (aspect ~1.8) with a concha-like bite on the
/// face-ward flank, rotated by `rotation_deg`. The bite sits on the column-
/// skew-positive flank for RIGHT masks, so classify_side_geometric agrees with
/// the ground truth by construction. The seed jitters the shape parameters.
inline std::pair<Mask, MaskTruth> gen_mask(Side side, double rotation_deg, int canvas, std::uint64_t seed) {
    if (std::abs(rotation_deg) > 60.0) throw InvalidRotation("gen_mask: |rotation| must be <= 60 degrees");
    if (canvas < 64) throw InvalidConfig("gen_mask: canvas must be >= 64 pixels");

    Rng rng(seed);
    double semi_major = 0.38 * canvas * rng.uniform(0.94, 1.06);
    double aspect = rng.uniform(1.7, 1.9);
    double semi_minor = semi_major / aspect;
    double notch_radius = semi_minor * rng.uniform(0.55, 0.70);
    double notch_row_offset = semi_major * rng.uniform(-0.08, 0.08);

    // Canonical frame before rotation: ellipse centered at the canvas center,
    // major axis vertical. Biting into one horizontal flank shifts the column
    // mean away from that flank while the flank's surviving rim stays put,
    // which skews the column distribution toward the bite. RIGHT masks carry
    // the bite on their right flank, giving positive skew.
    double notch_col_offset = (side == Side::right ? 1.0 : -1.0) * semi_minor;

    double center = (canvas - 1) / 2.0;  // mirror-symmetric pixel center
    double a = -rotation_deg * std::numbers::pi / 180.0;
    double ca = std::cos(a), sa = std::sin(a);

    Mask mask(canvas, canvas);
    for (int r = 0; r < canvas; ++r) {
        for (int c = 0; c < canvas; ++c) {
            double dr = r - center, dc = c - center;
            double qr = ca * dr - sa * dc;
            double qc = sa * dr + ca * dc;
            double e = (qr / semi_major) * (qr / semi_major) + (qc / semi_minor) * (qc / semi_minor);
            if (e > 1.0) continue;
            double nr = qr - notch_row_offset, nc = qc - notch_col_offset;
            if (nr * nr + nc * nc <= notch_radius * notch_radius) continue;
            mask.set(r, c);
        }
    }

    MaskTruth truth;
    truth.side = side;
    truth.rotation_deg = rotation_deg;
    double dir_r = std::cos(rotation_deg * std::numbers::pi / 180.0);
    double dir_c = std::sin(rotation_deg * std::numbers::pi / 180.0);
    truth.axis_top = {center - semi_major * dir_r, center - semi_major * dir_c};
    truth.axis_bot = {center + semi_major * dir_r, center + semi_major * dir_c};
    return {mask, truth};
}

// ---------------------------------------------------------------------------
// End-to-end symmetry experiment
// ---------------------------------------------------------------------------

struct SymmetryReport {
    MetricReport same_side;
    MetricReport opposite_side;
    double genuine_mean_same = 0.0;
    double genuine_mean_opposite = 0.0;
    double impostor_mean_same = 0.0;
    double impostor_mean_opposite = 0.0;
    double dprime_gap = 0.0;  // d'_same - d'_opposite
    ScoreSet scores_same;
    ScoreSet scores_opposite;
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace detail

/// Generates a synthetic dataset and evaluates the same-side and opposite-side
/// verification protocols on it. Embeddings are rounded through f32 and scores
/// through their 9-digit CSV form, so running the staged pipeline
/// (synth -> pairs -> score -> metrics) on the same seed produces byte-identical
/// numbers.
inline SymmetryReport run_symmetry_experiment(const SynthConfig& cfg, double fmr_target = 0.01,
                                              const std::optional<BootstrapParams>& bootstrap = std::nullopt) {
    SynthDataset ds = gen_subjects(cfg);
    ds.store.quantize_f32();
    auto embeddings = ds.store.to_map();

    SymmetryReport rep;
    auto evaluate = [&](Protocol protocol, MetricReport& out, ScoreSet& scores_out) {
        PairSet pairs = generate_pairs(ds.manifest, protocol);
        ScoreSet scores = score_pairs(pairs, embeddings);
        for (auto& row : scores.rows) row.score = csv_round(row.score);
        out = compute_metric_report(scores.genuine_scores(), scores.impostor_scores(), fmr_target, bootstrap);
        scores_out = std::move(scores);
    };
    evaluate(Protocol::same_side, rep.same_side, rep.scores_same);
    evaluate(Protocol::opposite_side, rep.opposite_side, rep.scores_opposite);

    rep.genuine_mean_same = detail::mean_of(rep.scores_same.genuine_scores());
    rep.genuine_mean_opposite = detail::mean_of(rep.scores_opposite.genuine_scores());
    rep.impostor_mean_same = detail::mean_of(rep.scores_same.impostor_scores());
    rep.impostor_mean_opposite = detail::mean_of(rep.scores_opposite.impostor_scores());
    rep.dprime_gap = rep.same_side.dprime - rep.opposite_side.dprime;
    return rep;
}

}  // namespace earsym
