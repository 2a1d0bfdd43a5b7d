#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "earsym/earsym.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace earsym;

TEST_CASE("auc on analytic score sets", "[metrics]") {
    REQUIRE(auc({0.9}, {0.1}) == 1.0);
    REQUIRE(auc({0.5}, {0.5}) == 0.5);
    REQUIRE(auc({0.9, 0.4}, {0.5, 0.1}) == 0.75);  // 3 wins out of 4 pairs
    REQUIRE_THROWS_AS(auc({}, {0.1}), EmptyScoreList);
}

TEST_CASE("auc equals brute-force pair counting", "[metrics]") {
    Rng rng(70);
    for (int trial = 0; trial < 300; ++trial) {
        bool grid = rng.uniform() < 0.5;
        auto g = testutil::random_scores(rng, 1 + rng.index(60), grid);
        auto i = testutil::random_scores(rng, 1 + rng.index(60), grid);
        REQUIRE(std::abs(auc(g, i) - oracle::brute_force_auc(g, i)) <= 1e-12);
        REQUIRE(auc(i, g) == 1.0 - auc(g, i));  // complement, exact under the half rule
    }
}

TEST_CASE("fnmr at fmr on the documented example", "[metrics]") {
    std::vector<double> impostor;
    for (int i = 0; i < 100; ++i) impostor.push_back(i / 100.0);
    std::vector<double> genuine{0.995, 0.5};
    OperatingPoint pt = fnmr_at_fmr(genuine, impostor, 0.01);
    REQUIRE(pt.threshold == 0.99);  // exactly 1/100 impostors at or above
    REQUIRE(pt.rate == 0.5);
}

TEST_CASE("fnmr extremes", "[metrics]") {
    std::vector<double> impostor;
    for (int i = 0; i < 200; ++i) impostor.push_back(i / 1000.0);
    REQUIRE(fnmr_at_fmr({0.9, 0.95}, impostor, 0.01).rate == 0.0);

    std::vector<double> high;
    for (int i = 0; i < 200; ++i) high.push_back(0.5 + i / 1000.0);
    REQUIRE(fnmr_at_fmr({0.1, 0.2}, high, 0.01).rate == 1.0);

    // too few impostors to meet the budget: threshold escalates to +inf
    OperatingPoint strict = fnmr_at_fmr({0.9}, {0.1, 0.2}, 0.01);
    REQUIRE(std::isinf(strict.threshold));
    REQUIRE(strict.rate == 1.0);

    REQUIRE_THROWS_AS(fnmr_at_fmr({0.5}, {0.1}, 0.0), InvalidConfig);
}

TEST_CASE("fnmr and eer equal exhaustive threshold sweeps", "[metrics]") {
    Rng rng(71);
    for (int trial = 0; trial < 200; ++trial) {
        bool grid = rng.uniform() < 0.5;
        auto g = testutil::random_scores(rng, 1 + rng.index(50), grid);
        auto i = testutil::random_scores(rng, 1 + rng.index(50), grid);

        OperatingPoint fast = fnmr_at_fmr(g, i, 0.01);
        oracle::SweepPoint slow = oracle::sweep_fnmr_at_fmr(g, i, 0.01);
        REQUIRE(fast.rate == slow.rate);
        REQUIRE((fast.threshold == slow.threshold ||
                 (std::isinf(fast.threshold) && std::isinf(slow.threshold))));

        OperatingPoint e = eer(g, i);
        oracle::SweepPoint es = oracle::sweep_eer(g, i);
        REQUIRE(e.rate == es.rate);
        REQUIRE((e.threshold == es.threshold || (std::isinf(e.threshold) && std::isinf(es.threshold))));
    }
}

TEST_CASE("eer on analytic cases", "[metrics]") {
    REQUIRE(eer({0.8, 0.9}, {0.1, 0.2}).rate == 0.0);
    REQUIRE(eer({0.6}, {0.4}).rate == 0.0);

    std::vector<double> ten;
    for (int i = 0; i < 10; ++i) ten.push_back(i / 10.0);
    REQUIRE(std::abs(eer(ten, ten).rate - 0.5) <= 0.05);
}

TEST_CASE("rank metrics are invariant under monotone score transforms", "[metrics]") {
    Rng rng(72);
    auto cube = [](double x) { return x * x * x; };
    auto expm = [](double x) { return std::exp(x); };
    for (int trial = 0; trial < 40; ++trial) {
        auto g = testutil::random_scores(rng, 2 + rng.index(40), trial % 2 == 0);
        auto i = testutil::random_scores(rng, 2 + rng.index(40), trial % 2 == 0);
        for (auto f : {+cube, +expm}) {
            auto tg = g, ti = i;
            for (auto& x : tg) x = f(x);
            for (auto& x : ti) x = f(x);
            REQUIRE(auc(tg, ti) == Catch::Approx(auc(g, i)).margin(1e-12));
            REQUIRE(fnmr_at_fmr(tg, ti, 0.05).rate == fnmr_at_fmr(g, i, 0.05).rate);
            REQUIRE(eer(tg, ti).rate == eer(g, i).rate);
        }
    }
}

TEST_CASE("adding a genuine score above all impostors never raises fnmr", "[metrics]") {
    Rng rng(73);
    for (int trial = 0; trial < 50; ++trial) {
        auto g = testutil::random_scores(rng, 1 + rng.index(40), false);
        auto i = testutil::random_scores(rng, 1 + rng.index(40), false);
        double before = fnmr_at_fmr(g, i, 0.05).rate;
        auto g2 = g;
        g2.push_back(2.0);  // above every impostor score
        REQUIRE(fnmr_at_fmr(g2, i, 0.05).rate <= before);
    }
}

TEST_CASE("dprime on analytic inputs", "[metrics]") {
    // variances are both 0.02, means 0.9 and 0.1
    REQUIRE(dprime({0.8, 1.0}, {0.0, 0.2}) == Catch::Approx(0.8 / std::sqrt(0.02)).epsilon(1e-12));
    REQUIRE(dprime({0.8, 1.0}, {0.0, 0.2}) == -dprime({0.0, 0.2}, {0.8, 1.0}));

    REQUIRE(dprime({0.5, 0.5}, {0.5, 0.5}) == 0.0);
    REQUIRE(std::isinf(dprime({0.7, 0.7}, {0.2, 0.2})));
    REQUIRE(dprime({0.7, 0.7}, {0.2, 0.2}) > 0.0);
    REQUIRE(dprime({0.2, 0.2}, {0.7, 0.7}) < 0.0);
    REQUIRE_THROWS_AS(dprime({0.5}, {0.1, 0.2}), TooFewScores);
}

TEST_CASE("dprime of identically drawn samples is near zero", "[metrics]") {
    Rng rng(74);
    std::vector<double> g(1000), i(1000);
    for (auto& x : g) x = rng.gaussian();
    for (auto& x : i) x = rng.gaussian();
    REQUIRE(std::abs(dprime(g, i)) < 0.2);
}

TEST_CASE("rank_k identification", "[metrics]") {
    IdentifySet gallery;
    gallery.add("g0", "s0", {1.0, 0.0, 0.0, 0.0});
    gallery.add("g1", "s1", {0.0, 1.0, 0.0, 0.0});
    gallery.add("g2", "s2", {0.0, 0.0, 1.0, 0.0});
    gallery.add("g3", "s3", {0.0, 0.0, 0.0, 1.0});

    IdentifySet probes;
    probes.add("p0", "s2", {0.0, 0.0, 1.0, 0.0});  // identical to gallery mate
    REQUIRE(rank_k(gallery, probes, 1) == 1.0);

    probes.add("p1", "s0", {0.1, 0.0, 0.99, 0.0});  // nearest is wrong subject
    REQUIRE(rank_k(gallery, probes, 1) == 0.5);
    REQUIRE(rank_k(gallery, probes, 2) == 1.0);

    // non-decreasing in k, and 1.0 once k covers the gallery
    double prev = 0.0;
    for (int k = 1; k <= 4; ++k) {
        double r = rank_k(gallery, probes, k);
        REQUIRE(r >= prev);
        prev = r;
    }
    REQUIRE(prev == 1.0);

    IdentifySet stranger;
    stranger.add("p", "unknown", {1.0, 0.0, 0.0, 0.0});
    REQUIRE_THROWS_AS(rank_k(gallery, stranger, 1), SubjectNotInGallery);
    REQUIRE_THROWS_AS(rank_k(IdentifySet{}, probes, 1), EmptyGallery);
    REQUIRE_THROWS_AS(rank_k(gallery, probes, 0), InvalidConfig);
}

TEST_CASE("rank_k breaks score ties by gallery id", "[metrics]") {
    IdentifySet gallery;
    gallery.add("a", "sX", {1.0, 0.0});
    gallery.add("b", "sY", {1.0, 0.0});  // same embedding, later id
    IdentifySet probes;
    probes.add("p", "sY", {1.0, 0.0});
    REQUIRE(rank_k(gallery, probes, 1) == 0.0);  // tie goes to id "a" (subject sX)
    REQUIRE(rank_k(gallery, probes, 2) == 1.0);
}

TEST_CASE("rank_k on a separated synthetic set", "[metrics]") {
    SynthConfig cfg{20, 2, 64, 0.0, 0.1, 99};
    SynthDataset ds = gen_subjects(cfg);
    IdentifySet gallery, probes;
    for (std::size_t i = 0; i < ds.store.count(); ++i) {
        const auto& e = ds.manifest.entries[i];
        bool first_image = e.id.ends_with("_000") && e.side == Side::left;
        (first_image ? gallery : probes).add(e.id, e.subject, ds.store.row(i));
    }
    REQUIRE(rank_k(gallery, probes, 1) == 1.0);
}

TEST_CASE("bootstrap basics", "[metrics]") {
    MetricFn auc_fn = [](const std::vector<double>& g, const std::vector<double>& i) { return auc(g, i); };
    std::vector<double> g(20, 0.8), i(30, 0.2);

    CiEntry ci = bootstrap_ci(auc_fn, g, i, {200, 0.95, 1});
    REQUIRE(ci.lo == 1.0);  // constant lists: every replicate equals the point estimate
    REQUIRE(ci.hi == 1.0);

    Rng rng(75);
    auto gr = testutil::random_scores(rng, 40, false);
    auto ir = testutil::random_scores(rng, 40, false);
    CiEntry a = bootstrap_ci(auc_fn, gr, ir, {300, 0.95, 7});
    CiEntry b = bootstrap_ci(auc_fn, gr, ir, {300, 0.95, 7});
    REQUIRE(a.lo == b.lo);
    REQUIRE(a.hi == b.hi);
    CiEntry c = bootstrap_ci(auc_fn, gr, ir, {300, 0.95, 8});
    REQUIRE((a.lo != c.lo || a.hi != c.hi));
    REQUIRE(a.lo <= a.hi);

    REQUIRE_THROWS_AS(bootstrap_ci(auc_fn, gr, ir, {50, 0.95, 1}), InvalidConfig);
}

TEST_CASE("bootstrap in the metric report matches the standalone interval", "[metrics]") {
    Rng rng(76);
    auto g = testutil::random_scores(rng, 60, false);
    auto i = testutil::random_scores(rng, 80, false);
    BootstrapParams params{150, 0.9, 11};
    MetricReport rep = compute_metric_report(g, i, 0.01, params);
    MetricFn auc_fn = [](const std::vector<double>& a, const std::vector<double>& b) { return auc(a, b); };
    CiEntry alone = bootstrap_ci(auc_fn, g, i, params);
    REQUIRE(rep.auc_ci.has_value());
    REQUIRE(rep.auc_ci->lo == alone.lo);
    REQUIRE(rep.auc_ci->hi == alone.hi);
    REQUIRE(rep.fnmr_ci.has_value());
    REQUIRE(rep.eer_ci.has_value());
    REQUIRE(rep.dprime_ci.has_value());
}

TEST_CASE("bootstrap auc interval covers the null value", "[metrics]") {
    // genuine and impostor drawn from the same distribution: true AUC is 0.5
    int covered = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Rng rng(1000 + trial);
        std::vector<double> g(80), i(80);
        for (auto& x : g) x = rng.gaussian();
        for (auto& x : i) x = rng.gaussian();
        MetricFn auc_fn = [](const std::vector<double>& a, const std::vector<double>& b) {
            return auc(a, b);
        };
        CiEntry ci = bootstrap_ci(auc_fn, g, i, {200, 0.95, 4242 + static_cast<std::uint64_t>(trial)});
        if (ci.lo <= 0.5 && 0.5 <= ci.hi) ++covered;
    }
    REQUIRE(covered >= 90);
}

TEST_CASE("histogram counts are conserved", "[metrics]") {
    Rng rng(77);
    auto g = testutil::random_scores(rng, 10, false);
    auto i = testutil::random_scores(rng, 20, false);
    g.push_back(1.0);   // boundary values land in the edge bins
    i.push_back(-1.0);
    Histogram h = build_histogram(g, i);
    long long gs = 0, is = 0;
    for (int b = 0; b < h.bins; ++b) {
        gs += h.genuine_count[b];
        is += h.impostor_count[b];
    }
    REQUIRE(gs == static_cast<long long>(g.size()));
    REQUIRE(is == static_cast<long long>(i.size()));
    REQUIRE(h.genuine_count[49] >= 1);
    REQUIRE(h.impostor_count[0] >= 1);
}
