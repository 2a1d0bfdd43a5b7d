#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "earsym/csv.hpp"
#include "earsym/embedding.hpp"
#include "earsym/error.hpp"
#include "earsym/manifest.hpp"

namespace earsym {

// ---------------------------------------------------------------------------
// Class arrangements
// ---------------------------------------------------------------------------

/// SINGLE groups a subject's two ears into one class; SPLIT gives one class
/// per occupied (subject, side) combination.
enum class ClassMode { single, split };

struct ClassArrangement {
    ClassMode mode = ClassMode::single;
    std::map<std::string, int> mapping;  // TRAIN image id -> class index
    int num_classes = 0;
};

inline ClassArrangement arrange_classes(const Manifest& manifest, ClassMode mode) {
    std::vector<const ManifestEntry*> train;
    for (const auto& e : manifest.entries)
        if (e.split == Split::train) train.push_back(&e);
    if (train.empty()) throw TooFewImages("arrange_classes: manifest has no TRAIN entries");

    // Class keys sorted lexicographically; in SPLIT mode L orders before R.
    std::set<std::pair<std::string, int>> keys;
    for (const auto* e : train) {
        if (mode == ClassMode::split) {
            if (!e->side) throw MissingSideLabel("arrange_classes: TRAIN entry '" + e->id + "' has no side label");
            keys.emplace(e->subject, e->side == Side::left ? 0 : 1);
        } else {
            keys.emplace(e->subject, 0);
        }
    }
    std::map<std::pair<std::string, int>, int> index;
    int next = 0;
    for (const auto& k : keys) index.emplace(k, next++);

    ClassArrangement arr;
    arr.mode = mode;
    arr.num_classes = next;
    for (const auto* e : train) {
        int side_key = mode == ClassMode::split ? (e->side == Side::left ? 0 : 1) : 0;
        arr.mapping.emplace(e->id, index.at({e->subject, side_key}));
    }
    return arr;
}

// ---------------------------------------------------------------------------
// Pair sets
// ---------------------------------------------------------------------------

enum class Protocol { same_side, opposite_side, all };
enum class SideRelation { same, opposite, unknown };

inline const char* protocol_name(Protocol p) {
    switch (p) {
        case Protocol::same_side: return "same-side";
        case Protocol::opposite_side: return "opposite-side";
        case Protocol::all: return "all";
    }
    return "?";
}

inline const char* relation_name(SideRelation r) {
    switch (r) {
        case SideRelation::same: return "same";
        case SideRelation::opposite: return "opposite";
        case SideRelation::unknown: return "unknown";
    }
    return "?";
}

struct Pair {
    std::string id_a;  // id_a < id_b, canonical order
    std::string id_b;
    bool genuine = false;  // same subject
    SideRelation relation = SideRelation::unknown;
};

struct PairSet {
    Protocol protocol = Protocol::all;
    std::vector<Pair> pairs;
};

/// Exhaustive unordered pairs over the TEST split. Side-restricted protocols
/// require a resolved side on every TEST entry; ALL does not, and tags pairs
/// with an unknown relation where a side is missing.
inline PairSet generate_pairs(const Manifest& manifest, Protocol protocol) {
    std::vector<const ManifestEntry*> test;
    for (const auto& e : manifest.entries)
        if (e.split == Split::test) test.push_back(&e);
    if (test.size() < 2) throw TooFewImages("generate_pairs: fewer than 2 TEST entries");

    std::sort(test.begin(), test.end(),
              [](const ManifestEntry* a, const ManifestEntry* b) { return a->id < b->id; });
    if (protocol != Protocol::all)
        for (const auto* e : test)
            if (!e->side) throw MissingSideLabel("generate_pairs: TEST entry '" + e->id + "' has no side label");

    std::size_t n_left = 0, n_right = 0;
    for (const auto* e : test) {
        if (e->side == Side::left) ++n_left;
        else if (e->side == Side::right) ++n_right;
    }
    PairSet out;
    out.protocol = protocol;
    std::size_t n = test.size();
    out.pairs.reserve(protocol == Protocol::same_side ? n_left * (n_left - 1) / 2 + n_right * (n_right - 1) / 2
                      : protocol == Protocol::opposite_side ? n_left * n_right
                                                            : n * (n - 1) / 2);
    for (std::size_t i = 0; i + 1 < test.size(); ++i) {
        for (std::size_t j = i + 1; j < test.size(); ++j) {
            SideRelation rel = SideRelation::unknown;
            if (test[i]->side && test[j]->side)
                rel = *test[i]->side == *test[j]->side ? SideRelation::same : SideRelation::opposite;
            if (protocol == Protocol::same_side && rel != SideRelation::same) continue;
            if (protocol == Protocol::opposite_side && rel != SideRelation::opposite) continue;
            out.pairs.push_back({test[i]->id, test[j]->id, test[i]->subject == test[j]->subject, rel});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Score sets
// ---------------------------------------------------------------------------

struct ScoreRow {
    double score = 0.0;
    bool genuine = false;
    SideRelation relation = SideRelation::unknown;
};

struct ScoreSet {
    Protocol protocol = Protocol::all;
    std::vector<ScoreRow> rows;  // in pair order

    std::vector<double> genuine_scores() const {
        std::vector<double> v;
        for (const auto& r : rows)
            if (r.genuine) v.push_back(r.score);
        return v;
    }
    std::vector<double> impostor_scores() const {
        std::vector<double> v;
        for (const auto& r : rows)
            if (!r.genuine) v.push_back(r.score);
        return v;
    }
};

inline ScoreSet score_pairs(const PairSet& pairs, const std::unordered_map<std::string, Embedding>& embeddings) {
    ScoreSet out;
    out.protocol = pairs.protocol;
    out.rows.reserve(pairs.pairs.size());
    auto lookup = [&](const std::string& id) -> const Embedding& {
        auto it = embeddings.find(id);
        if (it == embeddings.end()) throw MissingEmbedding("no embedding for image '" + id + "'");
        return it->second;
    };
    for (const auto& p : pairs.pairs)
        out.rows.push_back({cosine(lookup(p.id_a), lookup(p.id_b)), p.genuine, p.relation});
    return out;
}

// ---------------------------------------------------------------------------
// CSV formats
// ---------------------------------------------------------------------------

inline void save_pairs(const std::string& path, const PairSet& set) {
    std::ostringstream out;
    out << "id_a,id_b,genuine,side_relation\n";
    for (const auto& p : set.pairs)
        out << p.id_a << ',' << p.id_b << ',' << (p.genuine ? 1 : 0) << ',' << relation_name(p.relation) << '\n';
    write_text_file(path, out.str());
}

inline SideRelation parse_relation(const std::string& raw, const std::string& path, std::size_t line_no) {
    if (raw == "same") return SideRelation::same;
    if (raw == "opposite") return SideRelation::opposite;
    if (raw == "unknown") return SideRelation::unknown;
    throw ParseError(path + ":" + std::to_string(line_no) + ": invalid side relation '" + raw + "'");
}

inline PairSet load_pairs(const std::string& path) {
    std::vector<std::string> lines = read_lines(path);
    if (lines.empty() || lines[0] != "id_a,id_b,genuine,side_relation")
        throw ParseError(path + ":1: expected header 'id_a,id_b,genuine,side_relation'");
    PairSet set;
    bool any_same = false, any_opposite = false;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        std::vector<std::string> f = split_csv_line(lines[i]);
        if (f.size() != 4) throw ParseError(path + ":" + std::to_string(i + 1) + ": expected 4 fields");
        Pair p;
        p.id_a = f[0];
        p.id_b = f[1];
        p.genuine = parse_int_field(f[2], path, i + 1) != 0;
        p.relation = parse_relation(f[3], path, i + 1);
        any_same |= p.relation == SideRelation::same;
        any_opposite |= p.relation != SideRelation::same;
        set.pairs.push_back(std::move(p));
    }
    set.protocol = any_same && !any_opposite ? Protocol::same_side
                 : any_opposite && !any_same ? Protocol::opposite_side
                                             : Protocol::all;
    return set;
}

inline void save_scores(const std::string& path, const ScoreSet& set) {
    std::ostringstream out;
    out << "score,genuine,side_relation\n";
    for (const auto& r : set.rows)
        out << format_double(r.score, 9) << ',' << (r.genuine ? 1 : 0) << ',' << relation_name(r.relation) << '\n';
    write_text_file(path, out.str());
}

inline ScoreSet load_scores(const std::string& path) {
    std::vector<std::string> lines = read_lines(path);
    if (lines.empty() || lines[0] != "score,genuine,side_relation")
        throw ParseError(path + ":1: expected header 'score,genuine,side_relation'");
    ScoreSet set;
    bool any_same = false, any_opposite = false;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        std::vector<std::string> f = split_csv_line(lines[i]);
        if (f.size() != 3) throw ParseError(path + ":" + std::to_string(i + 1) + ": expected 3 fields");
        ScoreRow r;
        r.score = parse_double_field(f[0], path, i + 1);
        r.genuine = parse_int_field(f[1], path, i + 1) != 0;
        r.relation = parse_relation(f[2], path, i + 1);
        any_same |= r.relation == SideRelation::same;
        any_opposite |= r.relation != SideRelation::same;
        set.rows.push_back(r);
    }
    set.protocol = any_same && !any_opposite ? Protocol::same_side
                 : any_opposite && !any_same ? Protocol::opposite_side
                                             : Protocol::all;
    return set;
}

inline void save_class_mapping(const std::string& path, const ClassArrangement& arr) {
    std::ostringstream out;
    out << "id,class_index\n";
    for (const auto& [id, cls] : arr.mapping) out << id << ',' << cls << '\n';
    write_text_file(path, out.str());
}

}  // namespace earsym
