// Command-line surface of the ear-symmetry evaluation toolkit. Every
// subcommand is a pure function of its inputs, flags and seed; each run writes
// a run.json echoing the fully resolved options, and `earsym rerun run.json`
// reproduces the outputs byte for byte.

#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "earsym/earsym.hpp"

namespace fs = std::filesystem;
using earsym::json;

namespace {

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

std::vector<std::string> list_pgm_ids(const std::string& dir) {
    if (!fs::is_directory(dir)) throw earsym::IoError("not a directory: " + dir);
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".pgm")
            ids.push_back(entry.path().stem().string());
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void write_run_json(const std::string& out_dir, const std::string& subcommand, const json& options) {
    earsym::write_text_file(join(out_dir, "run.json"),
                            earsym::json_dump({{"subcommand", subcommand}, {"options", options}}));
}

std::string resolved_index_path(const std::string& store_path, const std::string& index_flag) {
    return index_flag.empty() ? earsym::default_index_path(store_path) : index_flag;
}

json side_or_null(const std::optional<earsym::Side>& s) {
    if (!s) return nullptr;
    return std::string(1, earsym::side_to_char(*s));
}

// Applies `metadata > external` precedence directly onto manifest entries;
// used where only the pair protocols need sides, not a full conflict report.
earsym::Manifest merge_external_sides(const earsym::Manifest& manifest,
                                      const std::map<std::string, earsym::Side>& external) {
    earsym::Manifest out = manifest;
    for (auto& e : out.entries) {
        if (e.side) continue;
        auto it = external.find(e.id);
        if (it != external.end()) e.side = it->second;
    }
    return out;
}

// ---------------------------------------------------------------------------
// align
// ---------------------------------------------------------------------------

struct AlignOpts {
    std::string images, masks, out;
    int k = earsym::kDefaultChordCount;
};

json to_json(const AlignOpts& o) {
    return {{"images", o.images}, {"masks", o.masks}, {"out", o.out}, {"k", o.k}};
}

AlignOpts align_from_json(const json& j) {
    return {j.at("images"), j.at("masks"), j.at("out"), j.at("k")};
}

void run_align(const AlignOpts& o) {
    fs::create_directories(join(o.out, "images"));
    fs::create_directories(join(o.out, "masks"));
    json results = json::array();
    for (const std::string& id : list_pgm_ids(o.masks)) {
        earsym::Mask mask = earsym::read_mask_pgm(join(o.masks, id + ".pgm"));
        earsym::GrayImage image = earsym::read_pgm(join(o.images, id + ".pgm"));
        earsym::AlignOutput aligned = earsym::align(image, mask, o.k);
        earsym::write_pgm(join(o.out, "images/" + id + ".pgm"), aligned.image);
        earsym::write_mask_pgm(join(o.out, "masks/" + id + ".pgm"), aligned.mask);
        const earsym::AlignmentResult& r = aligned.info;
        results.push_back({{"id", id},
                           {"angle_deg", r.angle_deg},
                           {"axis_top", {r.axis_top.row, r.axis_top.col}},
                           {"axis_bot", {r.axis_bot.row, r.axis_bot.col}},
                           {"crop", {r.crop.row, r.crop.col, r.crop.height, r.crop.width}}});
    }
    earsym::write_text_file(join(o.out, "alignment.json"), earsym::json_dump(results));
    write_run_json(o.out, "align", to_json(o));
}

// ---------------------------------------------------------------------------
// side
// ---------------------------------------------------------------------------

struct SideOpts {
    std::string manifest, masks, external, out;
    bool invert_geometric = false;
};

json to_json(const SideOpts& o) {
    return {{"manifest", o.manifest},
            {"masks", o.masks},
            {"external", o.external},
            {"out", o.out},
            {"invert_geometric", o.invert_geometric}};
}

SideOpts side_from_json(const json& j) {
    SideOpts o;
    o.manifest = j.at("manifest");
    o.masks = j.at("masks");
    o.external = j.at("external");
    o.out = j.at("out");
    o.invert_geometric = j.at("invert_geometric");
    return o;
}

void run_side(const SideOpts& o) {
    fs::create_directories(o.out);
    earsym::Manifest manifest = earsym::load_manifest(o.manifest);

    std::map<std::string, earsym::Side> external, geometric;
    if (!o.external.empty()) external = earsym::load_side_csv(o.external);
    if (!o.masks.empty()) {
        std::map<std::string, earsym::Mask> masks;
        for (const auto& e : manifest.entries) {
            std::string path = join(o.masks, e.id + ".pgm");
            if (fs::exists(path)) masks.emplace(e.id, earsym::read_mask_pgm(path));
        }
        geometric = earsym::geometric_labels(masks, o.invert_geometric);
    }

    earsym::SideResolution res = earsym::resolve_sides(manifest, o.external.empty() ? nullptr : &external,
                                                       o.masks.empty() ? nullptr : &geometric);

    std::ostringstream labels;
    labels << "id,side,source\n";
    for (const auto& [id, label] : res.labels)
        labels << id << ',' << earsym::side_to_char(label.value) << ','
               << earsym::side_source_name(label.source) << '\n';
    earsym::write_text_file(join(o.out, "labels.csv"), labels.str());

    json conflicts = json::array();
    for (const auto& c : res.conflicts)
        conflicts.push_back({{"id", c.id},
                             {"metadata", side_or_null(c.metadata)},
                             {"external", side_or_null(c.external)},
                             {"geometric", side_or_null(c.geometric)}});
    earsym::write_text_file(join(o.out, "conflicts.json"), earsym::json_dump(conflicts));
    write_run_json(o.out, "side", to_json(o));
}

// ---------------------------------------------------------------------------
// embed
// ---------------------------------------------------------------------------

struct EmbedOpts {
    std::string images, out;
    std::string embedder = "toy";
    std::uint64_t seed = 0;
    int dim = 512;
    std::string store, index;  // file embedder inputs
    bool align = false;
    std::string masks;
    int k = earsym::kDefaultChordCount;
};

json to_json(const EmbedOpts& o) {
    return {{"images", o.images}, {"out", o.out},   {"embedder", o.embedder}, {"seed", o.seed},
            {"dim", o.dim},       {"store", o.store}, {"index", o.index},     {"align", o.align},
            {"masks", o.masks},   {"k", o.k}};
}

EmbedOpts embed_from_json(const json& j) {
    EmbedOpts o;
    o.images = j.at("images");
    o.out = j.at("out");
    o.embedder = j.at("embedder");
    o.seed = j.at("seed");
    o.dim = j.at("dim");
    o.store = j.at("store");
    o.index = j.at("index");
    o.align = j.at("align");
    o.masks = j.at("masks");
    o.k = j.at("k");
    return o;
}

void run_embed(const EmbedOpts& o) {
    fs::create_directories(o.out);
    earsym::EmbeddingStore store;
    if (o.embedder == "toy") {
        earsym::ToyEmbedder embedder(o.seed, o.dim);
        for (const std::string& id : list_pgm_ids(o.images)) {
            earsym::GrayImage image = earsym::read_pgm(join(o.images, id + ".pgm"));
            if (o.align) {
                earsym::Mask mask = earsym::read_mask_pgm(join(o.masks, id + ".pgm"));
                store.add(id, earsym::embed_image(image, &mask, embedder, true, o.k));
            } else {
                store.add(id, earsym::embed_image(image, nullptr, embedder, false));
            }
        }
    } else if (o.embedder == "file") {
        if (o.store.empty()) throw earsym::InvalidConfig("embed: --embedder file requires --store");
        store = earsym::load_store(o.store, resolved_index_path(o.store, o.index));
    } else {
        throw earsym::InvalidConfig("embed: unknown embedder '" + o.embedder + "'");
    }
    earsym::save_store(store, join(o.out, "embeddings.earb"), join(o.out, "index.csv"));
    write_run_json(o.out, "embed", to_json(o));
}

// ---------------------------------------------------------------------------
// pairs
// ---------------------------------------------------------------------------

struct PairsOpts {
    std::string manifest, out;
    std::string protocol = "all";
    std::string sides;
};

json to_json(const PairsOpts& o) {
    return {{"manifest", o.manifest}, {"out", o.out}, {"protocol", o.protocol}, {"sides", o.sides}};
}

PairsOpts pairs_from_json(const json& j) {
    return {j.at("manifest"), j.at("out"), j.at("protocol"), j.at("sides")};
}

earsym::Protocol parse_protocol(const std::string& name) {
    if (name == "same-side") return earsym::Protocol::same_side;
    if (name == "opposite-side") return earsym::Protocol::opposite_side;
    if (name == "all") return earsym::Protocol::all;
    throw earsym::InvalidConfig("unknown protocol '" + name + "'");
}

void run_pairs(const PairsOpts& o) {
    fs::create_directories(o.out);
    earsym::Manifest manifest = earsym::load_manifest(o.manifest);
    if (!o.sides.empty()) manifest = merge_external_sides(manifest, earsym::load_side_csv(o.sides));
    earsym::PairSet set = earsym::generate_pairs(manifest, parse_protocol(o.protocol));
    earsym::save_pairs(join(o.out, "pairs.csv"), set);
    write_run_json(o.out, "pairs", to_json(o));
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

struct ScoreOpts {
    std::string pairs, store, index, out;
};

json to_json(const ScoreOpts& o) {
    return {{"pairs", o.pairs}, {"store", o.store}, {"index", o.index}, {"out", o.out}};
}

ScoreOpts score_from_json(const json& j) {
    return {j.at("pairs"), j.at("store"), j.at("index"), j.at("out")};
}

void run_score(const ScoreOpts& o) {
    fs::create_directories(o.out);
    earsym::PairSet pairs = earsym::load_pairs(o.pairs);
    earsym::EmbeddingStore store = earsym::load_store(o.store, resolved_index_path(o.store, o.index));
    earsym::ScoreSet scores = earsym::score_pairs(pairs, store.to_map());
    earsym::save_scores(join(o.out, "scores.csv"), scores);
    write_run_json(o.out, "score", to_json(o));
}

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

struct MetricsOpts {
    std::string scores, out;
    double fmr = 0.01;
    int bootstrap = 0;  // replicate count; 0 disables
    double level = 0.95;
    std::uint64_t seed = 0;
    bool svg = false;
};

json to_json(const MetricsOpts& o) {
    return {{"scores", o.scores}, {"out", o.out},   {"fmr", o.fmr}, {"bootstrap", o.bootstrap},
            {"level", o.level},   {"seed", o.seed}, {"svg", o.svg}};
}

MetricsOpts metrics_from_json(const json& j) {
    MetricsOpts o;
    o.scores = j.at("scores");
    o.out = j.at("out");
    o.fmr = j.at("fmr");
    o.bootstrap = j.at("bootstrap");
    o.level = j.at("level");
    o.seed = j.at("seed");
    o.svg = j.at("svg");
    return o;
}

double histogram_dprime(const earsym::ScoreSet& scores, earsym::SideRelation relation) {
    std::vector<double> g, i;
    for (const auto& r : scores.rows)
        if (r.relation == relation) (r.genuine ? g : i).push_back(r.score);
    if (g.size() < 2 || i.size() < 2) return 0.0;
    return earsym::dprime(g, i);
}

void run_metrics(const MetricsOpts& o) {
    fs::create_directories(o.out);
    earsym::ScoreSet scores = earsym::load_scores(o.scores);
    std::optional<earsym::BootstrapParams> bootstrap;
    if (o.bootstrap > 0) bootstrap = earsym::BootstrapParams{o.bootstrap, o.level, o.seed};
    earsym::MetricReport report =
        earsym::compute_metric_report(scores.genuine_scores(), scores.impostor_scores(), o.fmr, bootstrap);
    earsym::write_text_file(join(o.out, "metrics.json"), earsym::json_dump(earsym::metric_report_to_json(report)));

    auto [hist_same, hist_opposite] = earsym::split_histograms(scores);
    earsym::write_histogram_csv(join(o.out, "hist_same.csv"), hist_same);
    earsym::write_histogram_csv(join(o.out, "hist_opposite.csv"), hist_opposite);
    if (o.svg)
        earsym::write_symmetry_svg(join(o.out, "fig5.svg"), hist_same, hist_opposite,
                                   histogram_dprime(scores, earsym::SideRelation::same),
                                   histogram_dprime(scores, earsym::SideRelation::opposite));
    write_run_json(o.out, "metrics", to_json(o));
}

// ---------------------------------------------------------------------------
// arrange
// ---------------------------------------------------------------------------

struct ArrangeOpts {
    std::string manifest, out;
    std::string mode = "single";
};

json to_json(const ArrangeOpts& o) {
    return {{"manifest", o.manifest}, {"out", o.out}, {"mode", o.mode}};
}

ArrangeOpts arrange_from_json(const json& j) {
    return {j.at("manifest"), j.at("out"), j.at("mode")};
}

void run_arrange(const ArrangeOpts& o) {
    fs::create_directories(o.out);
    earsym::Manifest manifest = earsym::load_manifest(o.manifest);
    earsym::ClassMode mode;
    if (o.mode == "single") mode = earsym::ClassMode::single;
    else if (o.mode == "split") mode = earsym::ClassMode::split;
    else throw earsym::InvalidConfig("arrange: unknown mode '" + o.mode + "'");
    earsym::ClassArrangement arr = earsym::arrange_classes(manifest, mode);
    earsym::save_class_mapping(join(o.out, "classes.csv"), arr);
    earsym::write_text_file(join(o.out, "arrangement.json"),
                            earsym::json_dump({{"mode", o.mode}, {"num_classes", arr.num_classes}}));
    write_run_json(o.out, "arrange", to_json(o));
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthOpts {
    int subjects = 10;
    int imgs_per_side = 10;
    int dim = 512;
    double delta = 0.0;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    int canvas = 128;
    bool masks = true;
    std::string out;
};

json to_json(const SynthOpts& o) {
    return {{"subjects", o.subjects}, {"imgs_per_side", o.imgs_per_side},
            {"dim", o.dim},           {"delta", o.delta},
            {"epsilon", o.epsilon},   {"seed", o.seed},
            {"canvas", o.canvas},     {"masks", o.masks},
            {"out", o.out}};
}

SynthOpts synth_from_json(const json& j) {
    SynthOpts o;
    o.subjects = j.at("subjects");
    o.imgs_per_side = j.at("imgs_per_side");
    o.dim = j.at("dim");
    o.delta = j.at("delta");
    o.epsilon = j.at("epsilon");
    o.seed = j.at("seed");
    o.canvas = j.at("canvas");
    o.masks = j.at("masks");
    o.out = j.at("out");
    return o;
}

void run_synth(const SynthOpts& o) {
    fs::create_directories(o.out);
    earsym::SynthConfig cfg{o.subjects, o.imgs_per_side, o.dim, o.delta, o.epsilon, o.seed};
    earsym::SynthDataset ds = earsym::gen_subjects(cfg);

    earsym::save_manifest(join(o.out, "manifest.csv"), ds.manifest);
    earsym::save_store(ds.store, join(o.out, "embeddings.earb"), join(o.out, "index.csv"));

    std::ostringstream truth;
    truth << "id,subject,side,rotation_deg\n";
    for (const auto& e : ds.manifest.entries)
        truth << e.id << ',' << e.subject << ',' << earsym::side_to_char(*e.side) << ','
              << earsym::format_double(*e.pose_deg, 9) << '\n';
    earsym::write_text_file(join(o.out, "ground_truth.csv"), truth.str());

    if (o.masks) {
        fs::create_directories(join(o.out, "masks"));
        for (std::size_t i = 0; i < ds.manifest.entries.size(); ++i) {
            const auto& e = ds.manifest.entries[i];
            auto [mask, truth_rec] =
                earsym::gen_mask(*e.side, *e.pose_deg, o.canvas, earsym::synth_mask_seed(o.seed, i));
            earsym::write_mask_pgm(join(o.out, "masks/" + e.id + ".pgm"), mask);
        }
    }
    write_run_json(o.out, "synth", to_json(o));
}

// ---------------------------------------------------------------------------
// experiment symmetry
// ---------------------------------------------------------------------------

struct ExperimentOpts {
    int subjects = 200;
    int imgs_per_side = 10;
    int dim = 64;
    double delta = 0.0;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    double fmr = 0.01;
    int bootstrap = 0;
    double level = 0.95;
    bool svg = false;
    std::string out;
};

json to_json(const ExperimentOpts& o) {
    return {{"subjects", o.subjects}, {"imgs_per_side", o.imgs_per_side},
            {"dim", o.dim},           {"delta", o.delta},
            {"epsilon", o.epsilon},   {"seed", o.seed},
            {"fmr", o.fmr},           {"bootstrap", o.bootstrap},
            {"level", o.level},       {"svg", o.svg},
            {"out", o.out}};
}

ExperimentOpts experiment_from_json(const json& j) {
    ExperimentOpts o;
    o.subjects = j.at("subjects");
    o.imgs_per_side = j.at("imgs_per_side");
    o.dim = j.at("dim");
    o.delta = j.at("delta");
    o.epsilon = j.at("epsilon");
    o.seed = j.at("seed");
    o.fmr = j.at("fmr");
    o.bootstrap = j.at("bootstrap");
    o.level = j.at("level");
    o.svg = j.at("svg");
    o.out = j.at("out");
    return o;
}

void run_experiment(const ExperimentOpts& o) {
    fs::create_directories(o.out);
    earsym::SynthConfig cfg{o.subjects, o.imgs_per_side, o.dim, o.delta, o.epsilon, o.seed};
    std::optional<earsym::BootstrapParams> bootstrap;
    if (o.bootstrap > 0) bootstrap = earsym::BootstrapParams{o.bootstrap, o.level, o.seed};
    earsym::SymmetryReport rep = earsym::run_symmetry_experiment(cfg, o.fmr, bootstrap);

    earsym::write_text_file(join(o.out, "metrics.json"),
                            earsym::json_dump(earsym::symmetry_report_to_json(rep)));
    earsym::Histogram hist_same = earsym::split_histograms(rep.scores_same).first;
    earsym::Histogram hist_opposite = earsym::split_histograms(rep.scores_opposite).second;
    earsym::write_histogram_csv(join(o.out, "hist_same.csv"), hist_same);
    earsym::write_histogram_csv(join(o.out, "hist_opposite.csv"), hist_opposite);
    if (o.svg)
        earsym::write_symmetry_svg(join(o.out, "fig5.svg"), hist_same, hist_opposite, rep.same_side.dprime,
                                   rep.opposite_side.dprime);
    write_run_json(o.out, "experiment symmetry", to_json(o));
}

// ---------------------------------------------------------------------------
// identify
// ---------------------------------------------------------------------------

struct IdentifyOpts {
    std::string manifest, gallery, gallery_index, probes, probe_index, out;
    int k = 1;
};

json to_json(const IdentifyOpts& o) {
    return {{"manifest", o.manifest},   {"gallery", o.gallery}, {"gallery_index", o.gallery_index},
            {"probes", o.probes},       {"probe_index", o.probe_index},
            {"k", o.k},                 {"out", o.out}};
}

IdentifyOpts identify_from_json(const json& j) {
    IdentifyOpts o;
    o.manifest = j.at("manifest");
    o.gallery = j.at("gallery");
    o.gallery_index = j.at("gallery_index");
    o.probes = j.at("probes");
    o.probe_index = j.at("probe_index");
    o.k = j.at("k");
    o.out = j.at("out");
    return o;
}

void run_identify(const IdentifyOpts& o) {
    fs::create_directories(o.out);
    earsym::Manifest manifest = earsym::load_manifest(o.manifest);
    std::map<std::string, std::string> subject_of;
    for (const auto& e : manifest.entries) subject_of.emplace(e.id, e.subject);

    auto load_set = [&](const std::string& store_path, const std::string& index_flag) {
        earsym::EmbeddingStore store = earsym::load_store(store_path, resolved_index_path(store_path, index_flag));
        earsym::IdentifySet set;
        for (std::size_t i = 0; i < store.count(); ++i) {
            auto it = subject_of.find(store.ids[i]);
            if (it == subject_of.end())
                throw earsym::InvalidConfig("identify: id '" + store.ids[i] + "' not in manifest");
            set.add(store.ids[i], it->second, store.row(i));
        }
        return set;
    };
    earsym::IdentifySet gallery = load_set(o.gallery, o.gallery_index);
    earsym::IdentifySet probes = load_set(o.probes, o.probe_index);
    double fraction = earsym::rank_k(gallery, probes, o.k);

    earsym::write_text_file(join(o.out, "identify.json"),
                            earsym::json_dump({{"k", o.k},
                                               {"rank_k", fraction},
                                               {"n_gallery", gallery.size()},
                                               {"n_probes", probes.size()}}));
    write_run_json(o.out, "identify", to_json(o));
}

// ---------------------------------------------------------------------------
// rerun
// ---------------------------------------------------------------------------

void dispatch_run(const std::string& subcommand, const json& options) {
    if (subcommand == "align") run_align(align_from_json(options));
    else if (subcommand == "side") run_side(side_from_json(options));
    else if (subcommand == "embed") run_embed(embed_from_json(options));
    else if (subcommand == "pairs") run_pairs(pairs_from_json(options));
    else if (subcommand == "score") run_score(score_from_json(options));
    else if (subcommand == "metrics") run_metrics(metrics_from_json(options));
    else if (subcommand == "arrange") run_arrange(arrange_from_json(options));
    else if (subcommand == "synth") run_synth(synth_from_json(options));
    else if (subcommand == "experiment symmetry") run_experiment(experiment_from_json(options));
    else if (subcommand == "identify") run_identify(identify_from_json(options));
    else throw earsym::InvalidConfig("rerun: unknown subcommand '" + subcommand + "'");
}

void run_rerun(const std::string& run_json_path) {
    json run;
    try {
        run = json::parse(earsym::read_text_file(run_json_path));
    } catch (const json::parse_error& e) {
        throw earsym::ParseError(run_json_path + ": " + e.what());
    }
    dispatch_run(run.at("subcommand"), run.at("options"));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ear recognition symmetry evaluation toolkit"};
    app.require_subcommand(1);
    std::function<void()> task;

    AlignOpts align_opts;
    auto* align_cmd = app.add_subcommand("align", "align images to the mask principal axis and crop");
    align_cmd->add_option("--images", align_opts.images, "directory of grayscale PGM images")->required();
    align_cmd->add_option("--masks", align_opts.masks, "directory of binary PGM masks")->required();
    align_cmd->add_option("--out", align_opts.out, "output directory")->required();
    align_cmd->add_option("--k", align_opts.k, "number of longest chords for the axis estimate");
    align_cmd->callback([&] { task = [&] { run_align(align_opts); }; });

    SideOpts side_opts;
    auto* side_cmd = app.add_subcommand("side", "resolve per-image side labels and report conflicts");
    side_cmd->add_option("--manifest", side_opts.manifest, "manifest CSV")->required();
    side_cmd->add_option("--masks", side_opts.masks, "mask directory for the geometric baseline");
    side_cmd->add_option("--external", side_opts.external, "external prediction CSV (id,side)");
    side_cmd->add_flag("--invert-geometric", side_opts.invert_geometric,
                       "flip the geometric skewness-sign convention");
    side_cmd->add_option("--out", side_opts.out, "output directory")->required();
    side_cmd->callback([&] { task = [&] { run_side(side_opts); }; });

    EmbedOpts embed_opts;
    auto* embed_cmd = app.add_subcommand("embed", "compute flip-fused embeddings into an EARB store");
    embed_cmd->add_option("--images", embed_opts.images, "directory of grayscale PGM images");
    embed_cmd->add_option("--out", embed_opts.out, "output directory")->required();
    embed_cmd->add_option("--embedder", embed_opts.embedder, "toy | file");
    embed_cmd->add_option("--seed", embed_opts.seed, "toy embedder seed");
    embed_cmd->add_option("--dim", embed_opts.dim, "embedding dimension");
    embed_cmd->add_option("--store", embed_opts.store, "existing EARB store (file embedder)");
    embed_cmd->add_option("--index", embed_opts.index, "index CSV for --store (default: sibling index.csv)");
    embed_cmd->add_flag("--align", embed_opts.align, "align images before embedding (requires --masks)");
    embed_cmd->add_option("--masks", embed_opts.masks, "mask directory used with --align");
    embed_cmd->add_option("--k", embed_opts.k, "chord count for alignment");
    embed_cmd->callback([&] { task = [&] { run_embed(embed_opts); }; });

    PairsOpts pairs_opts;
    auto* pairs_cmd = app.add_subcommand("pairs", "generate verification pairs from a manifest");
    pairs_cmd->add_option("--manifest", pairs_opts.manifest, "manifest CSV")->required();
    pairs_cmd->add_option("--protocol", pairs_opts.protocol, "same-side | opposite-side | all");
    pairs_cmd->add_option("--sides", pairs_opts.sides, "side labels CSV filling entries without metadata");
    pairs_cmd->add_option("--out", pairs_opts.out, "output directory")->required();
    pairs_cmd->callback([&] { task = [&] { run_pairs(pairs_opts); }; });

    ScoreOpts score_opts;
    auto* score_cmd = app.add_subcommand("score", "cosine-score a pair list against an embedding store");
    score_cmd->add_option("--pairs", score_opts.pairs, "pairs CSV")->required();
    score_cmd->add_option("--store", score_opts.store, "EARB embedding store")->required();
    score_cmd->add_option("--index", score_opts.index, "index CSV (default: sibling index.csv)");
    score_cmd->add_option("--out", score_opts.out, "output directory")->required();
    score_cmd->callback([&] { task = [&] { run_score(score_opts); }; });

    MetricsOpts metrics_opts;
    auto* metrics_cmd = app.add_subcommand("metrics", "verification metrics from a score CSV");
    metrics_cmd->add_option("--scores", metrics_opts.scores, "scores CSV")->required();
    metrics_cmd->add_option("--out", metrics_opts.out, "output directory")->required();
    metrics_cmd->add_option("--fmr", metrics_opts.fmr, "FMR target for the FNMR operating point");
    metrics_cmd->add_option("--bootstrap", metrics_opts.bootstrap, "bootstrap replicates (0 = off)");
    metrics_cmd->add_option("--level", metrics_opts.level, "bootstrap confidence level");
    metrics_cmd->add_option("--seed", metrics_opts.seed, "bootstrap seed");
    metrics_cmd->add_flag("--svg", metrics_opts.svg, "emit fig5.svg histogram figure");
    metrics_cmd->callback([&] { task = [&] { run_metrics(metrics_opts); }; });

    ArrangeOpts arrange_opts;
    auto* arrange_cmd = app.add_subcommand("arrange", "training class arrangement from a manifest");
    arrange_cmd->add_option("--manifest", arrange_opts.manifest, "manifest CSV")->required();
    arrange_cmd->add_option("--mode", arrange_opts.mode, "single | split");
    arrange_cmd->add_option("--out", arrange_opts.out, "output directory")->required();
    arrange_cmd->callback([&] { task = [&] { run_arrange(arrange_opts); }; });

    SynthOpts synth_opts;
    auto* synth_cmd = app.add_subcommand("synth", "generate a seeded synthetic benchmark");
    synth_cmd->add_option("--subjects", synth_opts.subjects, "number of subjects")->required();
    synth_cmd->add_option("--imgs-per-side", synth_opts.imgs_per_side, "images per subject and side");
    synth_cmd->add_option("--dim", synth_opts.dim, "embedding dimension");
    synth_cmd->add_option("--delta", synth_opts.delta, "bilateral asymmetry magnitude");
    synth_cmd->add_option("--epsilon", synth_opts.epsilon, "within-class noise magnitude");
    synth_cmd->add_option("--seed", synth_opts.seed, "master seed");
    synth_cmd->add_option("--canvas", synth_opts.canvas, "mask canvas size in pixels");
    synth_cmd->add_flag("--masks,!--no-masks", synth_opts.masks, "render mask PGMs (default on)");
    synth_cmd->add_option("--out", synth_opts.out, "output directory")->required();
    synth_cmd->callback([&] { task = [&] { run_synth(synth_opts); }; });

    ExperimentOpts exp_opts;
    auto* exp_cmd = app.add_subcommand("experiment", "one-shot experiments");
    exp_cmd->require_subcommand(1);
    auto* sym_cmd = exp_cmd->add_subcommand("symmetry", "same-side vs opposite-side verification study");
    sym_cmd->add_option("--subjects", exp_opts.subjects, "number of subjects");
    sym_cmd->add_option("--imgs-per-side", exp_opts.imgs_per_side, "images per subject and side");
    sym_cmd->add_option("--dim", exp_opts.dim, "embedding dimension");
    sym_cmd->add_option("--delta", exp_opts.delta, "bilateral asymmetry magnitude");
    sym_cmd->add_option("--epsilon", exp_opts.epsilon, "within-class noise magnitude");
    sym_cmd->add_option("--seed", exp_opts.seed, "master seed");
    sym_cmd->add_option("--fmr", exp_opts.fmr, "FMR target");
    sym_cmd->add_option("--bootstrap", exp_opts.bootstrap, "bootstrap replicates (0 = off)");
    sym_cmd->add_option("--level", exp_opts.level, "bootstrap confidence level");
    sym_cmd->add_flag("--svg", exp_opts.svg, "emit fig5.svg");
    sym_cmd->add_option("--out", exp_opts.out, "output directory")->required();
    sym_cmd->callback([&] { task = [&] { run_experiment(exp_opts); }; });

    IdentifyOpts identify_opts;
    auto* identify_cmd = app.add_subcommand("identify", "closed-set rank-k identification");
    identify_cmd->add_option("--manifest", identify_opts.manifest, "manifest CSV with subject labels")->required();
    identify_cmd->add_option("--gallery", identify_opts.gallery, "gallery EARB store")->required();
    identify_cmd->add_option("--gallery-index", identify_opts.gallery_index, "gallery index CSV");
    identify_cmd->add_option("--probes", identify_opts.probes, "probe EARB store")->required();
    identify_cmd->add_option("--probe-index", identify_opts.probe_index, "probe index CSV");
    identify_cmd->add_option("--k", identify_opts.k, "rank depth");
    identify_cmd->add_option("--out", identify_opts.out, "output directory")->required();
    identify_cmd->callback([&] { task = [&] { run_identify(identify_opts); }; });

    std::string rerun_path;
    auto* rerun_cmd = app.add_subcommand("rerun", "re-execute a recorded run.json");
    rerun_cmd->add_option("run_json", rerun_path, "path to a run.json")->required();
    rerun_cmd->callback([&] { task = [&] { run_rerun(rerun_path); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        task();
    } catch (const earsym::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.category() == earsym::ErrorCategory::input ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
