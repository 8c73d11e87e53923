#pragma once

// Turning input files into a network: tagged exports go through citation
// matching, pair files are taken as they are.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "citnet/error.hpp"
#include "citnet/ingest.hpp"
#include "citnet/model.hpp"

namespace citnet {

struct LoadedNetwork {
    NetworkPtr network;
    std::vector<DroppedEdge> dropped;
    std::size_t records = 0; // parsed input records (tagged exports only)
    std::vector<ParseIssue> skipped;
    std::optional<MatchReport> match;
};

/// Several exports are concatenated before matching, so references may
/// cross files.
inline LoadedNetwork load_wos(const std::vector<std::string>& texts, const MatchOptions& options = {}) {
    if (texts.empty()) throw ContractError("no export given");
    std::vector<RawRecord> records;
    LoadedNetwork out;
    for (const auto& text : texts) {
        std::istringstream in(text);
        auto parsed = parse_wos_export(in);
        std::move(parsed.records.begin(), parsed.records.end(), std::back_inserter(records));
        out.skipped.insert(out.skipped.end(), parsed.skipped.begin(), parsed.skipped.end());
    }
    out.records = records.size();
    auto matched = match_citations(records, options);
    auto built = build_network(std::move(matched.publications), matched.edges);
    out.network = std::move(built.network);
    out.dropped = std::move(built.dropped);
    out.match = std::move(matched.report);
    return out;
}

inline LoadedNetwork load_pairs(const std::string& publications, const std::string& citations) {
    std::istringstream p(publications), c(citations);
    auto data = parse_pair_files(p, c);
    auto built = build_network(std::move(data.publications), data.edges);
    LoadedNetwork out;
    out.network = std::move(built.network);
    out.dropped = std::move(built.dropped);
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("cannot read '" + path + "'");
    return buf.str();
}

inline nlohmann::json load_report_json(const LoadedNetwork& loaded) {
    const auto& net = *loaded.network;
    nlohmann::json j{{"publications", net.size()}, {"citations", net.edge_count()}};
    std::size_t incomplete = 0;
    for (const auto& p : net.publications()) incomplete += !p.complete_record;
    j["incomplete_publications"] = incomplete;
    nlohmann::json dropped = nlohmann::json::object();
    for (const auto& d : loaded.dropped) {
        auto& slot = dropped[to_string(d.reason)];
        slot = slot.is_null() ? 1 : slot.get<std::size_t>() + 1;
    }
    j["dropped_citations"] = dropped;
    if (loaded.match) {
        const auto& m = *loaded.match;
        nlohmann::json skipped = nlohmann::json::array();
        for (const auto& s : loaded.skipped)
            skipped.push_back({{"first_line", s.first_line}, {"last_line", s.last_line}, {"message", s.message}});
        std::size_t unmatched = 0;
        for (const auto& o : m.outcomes)
            unmatched += o.method == MatchMethod::unmatchable || o.method == MatchMethod::below_threshold;
        j["records"] = loaded.records;
        j["skipped_records"] = skipped;
        j["records_without_year"] = m.records_without_year.size();
        j["references"] = {{"total", m.total_references},
                           {"matched_by_doi", m.matched_by_doi},
                           {"matched_by_tuple", m.matched_by_tuple},
                           {"admitted_incomplete", m.admitted_incomplete},
                           {"ambiguous", m.ambiguous},
                           {"unmatched", unmatched}};
    }
    return j;
}

} // namespace citnet
