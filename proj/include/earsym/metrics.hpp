#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "earsym/embedding.hpp"
#include "earsym/error.hpp"
#include "earsym/rng.hpp"

namespace earsym {

// ---------------------------------------------------------------------------
// Verification metrics. Decision rule throughout: "match iff score >= t".
//   FMR(t)  = fraction of impostor scores >= t
//   FNMR(t) = fraction of genuine scores  < t
// Operating points are step functions over the empirical scores; nothing is
// interpolated, so every value is reproducible by an exhaustive sweep.
// ---------------------------------------------------------------------------

/// Mann-Whitney statistic: over all genuine x impostor pairs, the fraction
/// with genuine > impostor, ties counted 1/2. Equals the trapezoidal ROC area.
inline double auc(const std::vector<double>& genuine, const std::vector<double>& impostor) {
    if (genuine.empty() || impostor.empty()) throw EmptyScoreList("auc: empty score list");
    struct Tagged {
        double score;
        bool genuine;
    };
    std::vector<Tagged> pool;
    pool.reserve(genuine.size() + impostor.size());
    for (double s : genuine) pool.push_back({s, true});
    for (double s : impostor) pool.push_back({s, false});
    std::sort(pool.begin(), pool.end(), [](const Tagged& a, const Tagged& b) { return a.score < b.score; });

    // Average ranks over ties; rank sums stay exact in double (half-integers).
    double genuine_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < pool.size()) {
        std::size_t j = i;
        while (j < pool.size() && pool[j].score == pool[i].score) ++j;
        double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
        for (std::size_t t = i; t < j; ++t)
            if (pool[t].genuine) genuine_rank_sum += avg_rank;
        i = j;
    }
    double ng = static_cast<double>(genuine.size());
    double ni = static_cast<double>(impostor.size());
    return (genuine_rank_sum - ng * (ng + 1.0) / 2.0) / (ng * ni);
}

struct OperatingPoint {
    double rate = 0.0;       // FNMR for fnmr_at_fmr, (FMR+FNMR)/2 for eer
    double threshold = 0.0;  // +inf when no threshold meets the FMR budget
};

/// FNMR at the smallest threshold whose FMR does not exceed `fmr_target`.
/// Candidate thresholds are the impostor scores plus a +inf sentinel, so the
/// FMR budget is never exceeded.
inline OperatingPoint fnmr_at_fmr(const std::vector<double>& genuine, const std::vector<double>& impostor,
                                  double fmr_target = 0.01) {
    if (genuine.empty() || impostor.empty()) throw EmptyScoreList("fnmr_at_fmr: empty score list");
    if (!(fmr_target > 0.0 && fmr_target < 1.0)) throw InvalidConfig("fnmr_at_fmr: fmr_target must be in (0, 1)");

    std::vector<double> imp = impostor;
    std::sort(imp.begin(), imp.end());
    const double ni = static_cast<double>(imp.size());

    double threshold = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < imp.size(); ++i) {
        if (i > 0 && imp[i] == imp[i - 1]) continue;  // distinct values, ascending
        double fmr = static_cast<double>(imp.size() - i) / ni;
        if (fmr <= fmr_target) {
            threshold = imp[i];
            break;
        }
    }
    std::size_t non_matches = 0;
    for (double s : genuine) non_matches += s < threshold;
    return {static_cast<double>(non_matches) / static_cast<double>(genuine.size()), threshold};
}

/// Threshold minimizing |FMR - FNMR| over all distinct scores plus +-inf
/// sentinels (ties keep the smaller threshold); the rate is their mean there.
inline OperatingPoint eer(const std::vector<double>& genuine, const std::vector<double>& impostor) {
    if (genuine.empty() || impostor.empty()) throw EmptyScoreList("eer: empty score list");
    std::vector<double> gen = genuine, imp = impostor;
    std::sort(gen.begin(), gen.end());
    std::sort(imp.begin(), imp.end());

    std::vector<double> candidates;
    candidates.reserve(gen.size() + imp.size() + 2);
    candidates.push_back(-std::numeric_limits<double>::infinity());
    candidates.insert(candidates.end(), gen.begin(), gen.end());
    candidates.insert(candidates.end(), imp.begin(), imp.end());
    std::sort(candidates.begin() + 1, candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    candidates.push_back(std::numeric_limits<double>::infinity());

    double best_gap = std::numeric_limits<double>::infinity();
    OperatingPoint best;
    for (double t : candidates) {
        double fmr = static_cast<double>(imp.end() - std::lower_bound(imp.begin(), imp.end(), t)) /
                     static_cast<double>(imp.size());
        double fnmr = static_cast<double>(std::lower_bound(gen.begin(), gen.end(), t) - gen.begin()) /
                      static_cast<double>(gen.size());
        double gap = std::abs(fmr - fnmr);
        if (gap < best_gap) {  // strict: ties keep the smaller threshold
            best_gap = gap;
            best = {(fmr + fnmr) / 2.0, t};
        }
    }
    return best;
}

/// Standardized separation (mu_g - mu_i) / sqrt((s_g^2 + s_i^2) / 2) with
/// unbiased sample variances. Two degenerate constant lists give 0 when the
/// means agree and +-inf ("infinite separation") when they differ.
inline double dprime(const std::vector<double>& genuine, const std::vector<double>& impostor) {
    if (genuine.size() < 2 || impostor.size() < 2)
        throw TooFewScores("dprime: both lists need at least 2 scores");
    auto mean_var = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::pair<double, double>{mean, ss / static_cast<double>(v.size() - 1)};
    };
    auto [mg, vg] = mean_var(genuine);
    auto [mi, vi] = mean_var(impostor);
    double pooled = (vg + vi) / 2.0;
    if (pooled == 0.0) {
        if (mg == mi) return 0.0;
        return mg > mi ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    }
    return (mg - mi) / std::sqrt(pooled);
}

// ---------------------------------------------------------------------------
// Closed-set identification
// ---------------------------------------------------------------------------

struct IdentifySet {
    std::vector<std::string> ids;
    std::vector<std::string> subjects;
    std::vector<Embedding> embeddings;

    std::size_t size() const { return ids.size(); }
    void add(std::string id, std::string subject, Embedding e) {
        ids.push_back(std::move(id));
        subjects.push_back(std::move(subject));
        embeddings.push_back(std::move(e));
    }
};

/// Fraction of probes whose top-k gallery entries (by descending cosine,
/// score ties broken by ascending gallery id) contain a same-subject entry.
inline double rank_k(const IdentifySet& gallery, const IdentifySet& probes, int k) {
    if (gallery.size() == 0) throw EmptyGallery("rank_k: empty gallery");
    if (probes.size() == 0) throw InvalidConfig("rank_k: no probes");
    if (k < 1) throw InvalidConfig("rank_k: k must be >= 1");

    std::set<std::string> gallery_subjects(gallery.subjects.begin(), gallery.subjects.end());
    std::size_t hits = 0;
    std::vector<std::size_t> order(gallery.size());
    for (std::size_t p = 0; p < probes.size(); ++p) {
        if (!gallery_subjects.count(probes.subjects[p]))
            throw SubjectNotInGallery("rank_k: probe subject '" + probes.subjects[p] + "' not in gallery");
        std::vector<double> scores(gallery.size());
        for (std::size_t g = 0; g < gallery.size(); ++g)
            scores[g] = cosine(probes.embeddings[p], gallery.embeddings[g]);
        for (std::size_t g = 0; g < order.size(); ++g) order[g] = g;
        std::size_t take = std::min<std::size_t>(k, gallery.size());
        std::partial_sort(order.begin(), order.begin() + take, order.end(), [&](std::size_t a, std::size_t b) {
            if (scores[a] != scores[b]) return scores[a] > scores[b];
            return gallery.ids[a] < gallery.ids[b];
        });
        for (std::size_t t = 0; t < take; ++t)
            if (gallery.subjects[order[t]] == probes.subjects[p]) {
                ++hits;
                break;
            }
    }
    return static_cast<double>(hits) / static_cast<double>(probes.size());
}

// ---------------------------------------------------------------------------
// Bootstrap confidence intervals
// ---------------------------------------------------------------------------

using MetricFn = std::function<double(const std::vector<double>&, const std::vector<double>&)>;

struct BootstrapParams {
    int B = 1000;
    double level = 0.95;
    std::uint64_t seed = 0;
};

struct CiEntry {
    double lo = 0.0;
    double hi = 0.0;
    double level = 0.95;
    int B = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline double percentile(const std::vector<double>& sorted, double p) {
    double h = p * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

/// One resampling law shared by all requested metrics: replicate b draws its
/// indices from a generator seeded with seed + b, independently resampling the
/// genuine and impostor lists with replacement.
inline std::vector<CiEntry> bootstrap_many(const std::vector<MetricFn>& metrics,
                                           const std::vector<double>& genuine,
                                           const std::vector<double>& impostor, const BootstrapParams& params) {
    if (genuine.empty() || impostor.empty()) throw EmptyScoreList("bootstrap: empty score list");
    if (params.B < 100) throw InvalidConfig("bootstrap: B must be >= 100");
    if (!(params.level > 0.0 && params.level < 1.0)) throw InvalidConfig("bootstrap: level must be in (0, 1)");

    std::vector<std::vector<double>> stats(metrics.size(), std::vector<double>(params.B));
    std::vector<double> gb(genuine.size()), ib(impostor.size());
    for (int b = 0; b < params.B; ++b) {
        Rng rng(params.seed + static_cast<std::uint64_t>(b));
        for (auto& x : gb) x = genuine[rng.index(genuine.size())];
        for (auto& x : ib) x = impostor[rng.index(impostor.size())];
        for (std::size_t m = 0; m < metrics.size(); ++m) stats[m][b] = metrics[m](gb, ib);
    }
    std::vector<CiEntry> out;
    out.reserve(metrics.size());
    double alpha = 1.0 - params.level;
    for (auto& s : stats) {
        std::sort(s.begin(), s.end());
        out.push_back({percentile(s, alpha / 2.0), percentile(s, 1.0 - alpha / 2.0), params.level, params.B,
                       params.seed});
    }
    return out;
}

}  // namespace detail

/// Percentile bootstrap interval for one metric. Deterministic given the seed.
inline CiEntry bootstrap_ci(const MetricFn& metric, const std::vector<double>& genuine,
                            const std::vector<double>& impostor, const BootstrapParams& params) {
    return detail::bootstrap_many({metric}, genuine, impostor, params)[0];
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct MetricReport {
    double auc = 0.0;
    double fnmr_at_fmr = 0.0;
    double fmr_target = 0.01;
    double eer = 0.0;
    double dprime = 0.0;
    double threshold_used = 0.0;  // FNMR@FMR operating threshold
    std::size_t n_genuine = 0;
    std::size_t n_impostor = 0;
    std::optional<CiEntry> auc_ci, fnmr_ci, eer_ci, dprime_ci;
};

inline MetricReport compute_metric_report(const std::vector<double>& genuine,
                                          const std::vector<double>& impostor, double fmr_target = 0.01,
                                          const std::optional<BootstrapParams>& bootstrap = std::nullopt) {
    MetricReport rep;
    rep.auc = auc(genuine, impostor);
    OperatingPoint fnmr_pt = fnmr_at_fmr(genuine, impostor, fmr_target);
    rep.fnmr_at_fmr = fnmr_pt.rate;
    rep.threshold_used = fnmr_pt.threshold;
    rep.fmr_target = fmr_target;
    rep.eer = eer(genuine, impostor).rate;
    rep.dprime = dprime(genuine, impostor);
    rep.n_genuine = genuine.size();
    rep.n_impostor = impostor.size();

    if (bootstrap) {
        std::vector<MetricFn> fns = {
            [](const std::vector<double>& g, const std::vector<double>& i) { return auc(g, i); },
            [fmr_target](const std::vector<double>& g, const std::vector<double>& i) {
                return fnmr_at_fmr(g, i, fmr_target).rate;
            },
            [](const std::vector<double>& g, const std::vector<double>& i) { return eer(g, i).rate; },
            [](const std::vector<double>& g, const std::vector<double>& i) { return dprime(g, i); },
        };
        std::vector<CiEntry> cis = detail::bootstrap_many(fns, genuine, impostor, *bootstrap);
        rep.auc_ci = cis[0];
        rep.fnmr_ci = cis[1];
        rep.eer_ci = cis[2];
        rep.dprime_ci = cis[3];
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Score histograms (50 uniform bins over [-1, 1] by default)
// ---------------------------------------------------------------------------

struct Histogram {
    double lo = -1.0;
    double hi = 1.0;
    int bins = 50;
    std::vector<long long> genuine_count;
    std::vector<long long> impostor_count;
};

inline Histogram build_histogram(const std::vector<double>& genuine, const std::vector<double>& impostor,
                                 int bins = 50, double lo = -1.0, double hi = 1.0) {
    Histogram h;
    h.lo = lo;
    h.hi = hi;
    h.bins = bins;
    h.genuine_count.assign(bins, 0);
    h.impostor_count.assign(bins, 0);
    auto bin_of = [&](double s) {
        int b = static_cast<int>(std::floor((s - lo) / (hi - lo) * bins));
        return std::clamp(b, 0, bins - 1);
    };
    for (double s : genuine) ++h.genuine_count[bin_of(s)];
    for (double s : impostor) ++h.impostor_count[bin_of(s)];
    return h;
}

}  // namespace earsym
