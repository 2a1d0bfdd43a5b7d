#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include <json.hpp>

#include "earsym/csv.hpp"
#include "earsym/metrics.hpp"
#include "earsym/protocol.hpp"
#include "earsym/synth.hpp"

namespace earsym {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Deterministic JSON emission: keys in sorted order (nlohmann's default map),
// doubles with 17 significant digits so every value round-trips exactly.
// Non-finite doubles must be stringified (see json_real) before emission.
// ---------------------------------------------------------------------------

/// JSON value for a possibly non-finite double: numbers stay numbers,
/// +-infinity becomes the strings "inf" / "-inf".
inline json json_real(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return nullptr;
    return v;
}

namespace detail {

inline void dump_json_17g(const json& j, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    const std::string pad_in(static_cast<std::size_t>(depth + 1) * 2, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            std::size_t i = 0;
            for (const auto& [key, value] : j.items()) {
                out += pad_in + json(key).dump() + ": ";
                dump_json_17g(value, out, depth + 1);
                if (++i < j.size()) out += ',';
                out += '\n';
            }
            out += pad + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ", ";
                dump_json_17g(j[i], out, depth + 1);
            }
            out += "]";
            return;
        }
        case json::value_t::number_float:
            out += format_double(j.get<double>(), 17);
            return;
        default:
            out += j.dump();
            return;
    }
}

}  // namespace detail

inline std::string json_dump(const json& j) {
    std::string out;
    detail::dump_json_17g(j, out, 0);
    out += '\n';
    return out;
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline json ci_to_json(const CiEntry& ci) {
    return {{"lo", json_real(ci.lo)}, {"hi", json_real(ci.hi)}, {"level", ci.level},
            {"B", ci.B},             {"seed", ci.seed}};
}

inline json metric_report_to_json(const MetricReport& rep) {
    json j{{"auc", rep.auc},
           {"fnmr_at_fmr", rep.fnmr_at_fmr},
           {"fmr_target", rep.fmr_target},
           {"eer", rep.eer},
           {"dprime", json_real(rep.dprime)},
           {"threshold_used", json_real(rep.threshold_used)},
           {"n_genuine", rep.n_genuine},
           {"n_impostor", rep.n_impostor}};
    if (rep.auc_ci) {
        j["ci"] = {{"auc", ci_to_json(*rep.auc_ci)},
                   {"fnmr_at_fmr", ci_to_json(*rep.fnmr_ci)},
                   {"eer", ci_to_json(*rep.eer_ci)},
                   {"dprime", ci_to_json(*rep.dprime_ci)}};
    }
    return j;
}

inline json symmetry_report_to_json(const SymmetryReport& rep) {
    return {{"same_side", metric_report_to_json(rep.same_side)},
            {"opposite_side", metric_report_to_json(rep.opposite_side)},
            {"means",
             {{"genuine_same", rep.genuine_mean_same},
              {"genuine_opposite", rep.genuine_mean_opposite},
              {"impostor_same", rep.impostor_mean_same},
              {"impostor_opposite", rep.impostor_mean_opposite}}},
            {"dprime_gap", json_real(rep.dprime_gap)}};
}

inline void write_histogram_csv(const std::string& path, const Histogram& h) {
    std::ostringstream out;
    out << "bin_lo,bin_hi,genuine_count,impostor_count\n";
    double step = (h.hi - h.lo) / h.bins;
    for (int b = 0; b < h.bins; ++b) {
        out << format_double(h.lo + b * step, 9) << ',' << format_double(h.lo + (b + 1) * step, 9) << ','
            << h.genuine_count[b] << ',' << h.impostor_count[b] << '\n';
    }
    write_text_file(path, out.str());
}

// ---------------------------------------------------------------------------
// Static SVG: two cells (same-side, opposite-side), genuine in red over
// impostor in blue, d-prime annotated top right.
// ---------------------------------------------------------------------------

namespace detail {

inline void svg_panel(std::ostringstream& out, const Histogram& h, double x0, double y0, double w, double hgt,
                      const std::string& title, double dprime_value) {
    long long max_count = 1;
    for (int b = 0; b < h.bins; ++b) {
        max_count = std::max(max_count, h.genuine_count[b]);
        max_count = std::max(max_count, h.impostor_count[b]);
    }
    out << "  <rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << w << "\" height=\"" << hgt
        << "\" fill=\"white\" stroke=\"black\"/>\n";
    double bar_w = w / h.bins;
    auto bars = [&](const std::vector<long long>& counts, const char* color) {
        for (int b = 0; b < h.bins; ++b) {
            if (counts[b] == 0) continue;
            double bh = hgt * static_cast<double>(counts[b]) / static_cast<double>(max_count);
            out << "  <rect x=\"" << format_double(x0 + b * bar_w, 9) << "\" y=\""
                << format_double(y0 + hgt - bh, 9) << "\" width=\"" << format_double(bar_w, 9)
                << "\" height=\"" << format_double(bh, 9) << "\" fill=\"" << color
                << "\" fill-opacity=\"0.5\"/>\n";
        }
    };
    bars(h.impostor_count, "blue");
    bars(h.genuine_count, "red");
    out << "  <text x=\"" << x0 + 8 << "\" y=\"" << y0 + 18 << "\" font-size=\"14\">" << title << "</text>\n";
    out << "  <text x=\"" << x0 + w - 8 << "\" y=\"" << y0 + 18
        << "\" font-size=\"14\" text-anchor=\"end\">d' = " << format_double(dprime_value, 4) << "</text>\n";
}

}  // namespace detail

inline void write_symmetry_svg(const std::string& path, const Histogram& same, const Histogram& opposite,
                               double dprime_same, double dprime_opposite) {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"860\" height=\"300\" "
           "viewBox=\"0 0 860 300\">\n";
    detail::svg_panel(out, same, 20, 20, 390, 240, "same-side", dprime_same);
    detail::svg_panel(out, opposite, 450, 20, 390, 240, "opposite-side", dprime_opposite);
    out << "  <text x=\"430\" y=\"290\" font-size=\"12\" text-anchor=\"middle\">genuine (red) / impostor "
           "(blue), 50 bins over [-1, 1]</text>\n";
    out << "</svg>\n";
    write_text_file(path, out.str());
}

/// Histograms of a score set split by the side relation of each row.
inline std::pair<Histogram, Histogram> split_histograms(const ScoreSet& scores) {
    std::vector<double> g_same, i_same, g_opp, i_opp;
    for (const auto& r : scores.rows) {
        if (r.relation == SideRelation::same) (r.genuine ? g_same : i_same).push_back(r.score);
        else if (r.relation == SideRelation::opposite) (r.genuine ? g_opp : i_opp).push_back(r.score);
    }
    return {build_histogram(g_same, i_same), build_histogram(g_opp, i_opp)};
}

}  // namespace earsym
