#pragma once

// Frame serialisation: the versioned JSON document and a static SVG drawing.

#include <cstdio>
#include <limits>
#include <locale>
#include <map>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "citnet/layout.hpp"

namespace citnet {

inline constexpr int kFrameVersion = 1;

inline nlohmann::json frame_to_json(const LayoutFrame& f) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : f.nodes) {
        nodes.push_back({{"id", n.id},
                         {"label", n.label},
                         {"year", n.year},
                         {"layer", n.layer},
                         {"grid", n.grid},
                         {"x", n.x},
                         {"marked", n.marked},
                         {"selected", n.selected},
                         {"group", n.group == 0 ? nlohmann::json(nullptr) : nlohmann::json(n.group)},
                         {"score", n.score}});
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : f.edges) edges.push_back({{"citing", e.citing}, {"cited", e.cited}, {"essential", e.essential}});
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t i = 0; i < f.layer_year.size(); ++i) layers.push_back({{"layer", i}, {"year", f.layer_year[i]}});
    return {{"version", kFrameVersion},
            {"grid_points", f.grid_points},
            {"transitive_reduction", f.transitive_reduction},
            {"energy", f.energy},
            {"layers", std::move(layers)},
            {"nodes", std::move(nodes)},
            {"edges", std::move(edges)}};
}

namespace detail {

inline std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline const char* group_colour(std::uint32_t g) {
    static const char* const palette[] = {"#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#ff7f0e", "#17becf",
                                          "#8c564b", "#e377c2", "#bcbd22", "#7f7f7f"};
    return g == 0 ? "#b0b0b0" : palette[(g - 1) % 10];
}

} // namespace detail

/// Layers from top (oldest) to bottom, years on the left margin. Marked
/// publications are squares, selected ones get a red outline.
inline std::string frame_to_svg(const LayoutFrame& f, double width = 1000.0, double layer_height = 60.0) {
    const double margin_left = 70.0, margin = 30.0;
    const double height = margin * 2 + layer_height * static_cast<double>(std::max<std::size_t>(f.layer_year.size(), 1));
    auto px = [&](double x) { return margin_left + x * (width - margin_left - margin); };
    auto py = [&](std::uint32_t layer) { return margin + layer_height * (static_cast<double>(layer) + 0.5); };
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::fixed(width) << "\" height=\""
        << detail::fixed(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    int last_year = std::numeric_limits<int>::min();
    for (std::size_t l = 0; l < f.layer_year.size(); ++l) {
        if (f.layer_year[l] == last_year) continue;
        last_year = f.layer_year[l];
        out << "<text x=\"8\" y=\"" << detail::fixed(py(static_cast<std::uint32_t>(l)) + 4) << "\">" << last_year << "</text>\n";
    }
    std::map<std::string, const FrameNode*> by_id;
    for (const auto& n : f.nodes) by_id[n.id] = &n;
    for (const auto& e : f.edges) {
        const auto* a = by_id.at(e.citing);
        const auto* b = by_id.at(e.cited);
        const double x1 = px(a->x), y1 = py(a->layer), x2 = px(b->x), y2 = py(b->layer);
        const double bow = 0.15 * (y1 - y2);
        out << "<path d=\"M" << detail::fixed(x1) << "," << detail::fixed(y1) << " Q"
            << detail::fixed((x1 + x2) / 2 + bow) << "," << detail::fixed((y1 + y2) / 2) << " " << detail::fixed(x2)
            << "," << detail::fixed(y2) << "\" fill=\"none\" stroke=\"#999\" stroke-width=\"0.8\"/>\n";
    }
    for (const auto& n : f.nodes) {
        const double x = px(n.x), y = py(n.layer), r = 6.0;
        const std::string stroke = n.selected ? "stroke=\"red\" stroke-width=\"2\"" : "stroke=\"#333\" stroke-width=\"0.5\"";
        if (n.marked) {
            out << "<rect x=\"" << detail::fixed(x - r) << "\" y=\"" << detail::fixed(y - r) << "\" width=\""
                << detail::fixed(2 * r) << "\" height=\"" << detail::fixed(2 * r) << "\" fill=\""
                << detail::group_colour(n.group) << "\" " << stroke << "/>\n";
        } else {
            out << "<circle cx=\"" << detail::fixed(x) << "\" cy=\"" << detail::fixed(y) << "\" r=\"" << detail::fixed(r)
                << "\" fill=\"" << detail::group_colour(n.group) << "\" " << stroke << "/>\n";
        }
        out << "<text x=\"" << detail::fixed(x + r + 2) << "\" y=\"" << detail::fixed(y + 4) << "\">"
            << detail::xml_escape(n.label) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace citnet
