#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "earsym/csv.hpp"
#include "earsym/error.hpp"
#include "earsym/side.hpp"

namespace earsym {

enum class Split { train, test };

struct ManifestEntry {
    std::string id;
    std::string subject;
    std::optional<Side> side;
    Split split = Split::test;
    std::optional<double> pose_deg;
};

/// Dataset index: one row per image, ids unique.
struct Manifest {
    std::vector<ManifestEntry> entries;

    const ManifestEntry* find(const std::string& id) const {
        for (const auto& e : entries)
            if (e.id == id) return &e;
        return nullptr;
    }
};

inline std::optional<Side> parse_side_value(const std::string& raw, const std::string& path, std::size_t line_no) {
    if (raw.empty()) return std::nullopt;
    std::string v;
    for (char c : raw) v.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (v == "l" || v == "left") return Side::left;
    if (v == "r" || v == "right") return Side::right;
    throw ParseError(path + ":" + std::to_string(line_no) + ": invalid side value '" + raw + "'");
}

inline Manifest load_manifest(const std::string& path) {
    std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) throw ParseError(path + ": empty manifest");
    if (lines[0] != "id,subject,side,split,pose_deg")
        throw ParseError(path + ":1: expected header 'id,subject,side,split,pose_deg'");

    Manifest manifest;
    std::map<std::string, std::size_t> first_line;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        std::size_t line_no = i + 1;
        std::vector<std::string> f = split_csv_line(lines[i]);
        if (f.size() != 5)
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected 5 fields, got " + std::to_string(f.size()));
        ManifestEntry e;
        e.id = f[0];
        e.subject = f[1];
        if (e.id.empty()) throw ParseError(path + ":" + std::to_string(line_no) + ": empty id");
        if (e.subject.empty()) throw ParseError(path + ":" + std::to_string(line_no) + ": empty subject");
        auto [it, inserted] = first_line.emplace(e.id, line_no);
        if (!inserted)
            throw DuplicateId(path + ": duplicate id '" + e.id + "' at line " + std::to_string(line_no) +
                              " (first seen at line " + std::to_string(it->second) + ")");
        e.side = parse_side_value(f[2], path, line_no);
        std::string split;
        for (char c : f[3]) split.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        if (split == "train") e.split = Split::train;
        else if (split == "test") e.split = Split::test;
        else throw ParseError(path + ":" + std::to_string(line_no) + ": invalid split '" + f[3] + "'");
        if (!f[4].empty()) e.pose_deg = parse_double_field(f[4], path, line_no);
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

inline void save_manifest(const std::string& path, const Manifest& manifest) {
    std::ostringstream out;
    out << "id,subject,side,split,pose_deg\n";
    for (const auto& e : manifest.entries) {
        out << e.id << ',' << e.subject << ',';
        if (e.side) out << side_to_char(*e.side);
        out << ',' << (e.split == Split::train ? "TRAIN" : "TEST") << ',';
        if (e.pose_deg) out << format_double(*e.pose_deg, 9);
        out << '\n';
    }
    write_text_file(path, out.str());
}

/// External prediction file: CSV with header `id,side`, side in {L,R}.
/// A trailing `source` column (as written by the `side` subcommand) is ignored.
inline std::map<std::string, Side> load_side_csv(const std::string& path) {
    std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) throw ParseError(path + ": empty side file");
    std::vector<std::string> header = split_csv_line(lines[0]);
    if (header.size() < 2 || header[0] != "id" || header[1] != "side")
        throw ParseError(path + ":1: expected header 'id,side'");
    std::map<std::string, Side> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        std::size_t line_no = i + 1;
        std::vector<std::string> f = split_csv_line(lines[i]);
        if (f.size() < 2) throw ParseError(path + ":" + std::to_string(line_no) + ": expected at least 2 fields");
        std::optional<Side> s = parse_side_value(f[1], path, line_no);
        if (!s) throw ParseError(path + ":" + std::to_string(line_no) + ": empty side value");
        if (!out.emplace(f[0], *s).second)
            throw DuplicateId(path + ": duplicate id '" + f[0] + "' at line " + std::to_string(line_no));
    }
    return out;
}

struct SideConflict {
    std::string id;
    std::optional<Side> metadata;
    std::optional<Side> external;
    std::optional<Side> geometric;
};

struct SideResolution {
    std::map<std::string, SideLabel> labels;
    std::vector<SideConflict> conflicts;  // sorted by id
};

/// Assigns one side per manifest entry with precedence
/// metadata > external > geometric. Disagreements between available sources
/// are reported, not fatal; an entry with no source at all is an error.
inline SideResolution resolve_sides(const Manifest& manifest,
                                    const std::map<std::string, Side>* external = nullptr,
                                    const std::map<std::string, Side>* geometric = nullptr) {
    SideResolution res;
    for (const auto& e : manifest.entries) {
        std::optional<Side> meta = e.side;
        std::optional<Side> ext, geo;
        if (external) {
            auto it = external->find(e.id);
            if (it != external->end()) ext = it->second;
        }
        if (geometric) {
            auto it = geometric->find(e.id);
            if (it != geometric->end()) geo = it->second;
        }

        SideLabel label;
        if (meta) label = {*meta, SideSource::metadata};
        else if (ext) label = {*ext, SideSource::external};
        else if (geo) label = {*geo, SideSource::geometric};
        else throw UnlabelableImage("no side source available for image '" + e.id + "'");
        res.labels.emplace(e.id, label);

        bool disagree = (meta && ext && *meta != *ext) || (meta && geo && *meta != *geo) ||
                        (ext && geo && *ext != *geo);
        if (disagree) res.conflicts.push_back({e.id, meta, ext, geo});
    }
    std::sort(res.conflicts.begin(), res.conflicts.end(),
              [](const SideConflict& a, const SideConflict& b) { return a.id < b.id; });
    return res;
}

/// Copy of the manifest with every entry's side replaced by its resolved label.
inline Manifest apply_side_labels(const Manifest& manifest, const std::map<std::string, SideLabel>& labels) {
    Manifest out = manifest;
    for (auto& e : out.entries) {
        auto it = labels.find(e.id);
        if (it != labels.end()) e.side = it->second.value;
    }
    return out;
}

}  // namespace earsym
