#pragma once

// Session archives: one gzip-compressed JSON document holding the pair
// files, and the history as ordered id sets with their attributes.

#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <zlib.h>

#include "citnet/error.hpp"
#include "citnet/explore.hpp"
#include "citnet/load.hpp"
#include "citnet/ops.hpp"

namespace citnet {

inline constexpr int kArchiveVersion = 1;

inline std::string gzip_compress(std::string_view data) {
    z_stream zs{};
    // 15 window bits + 16 selects the gzip wrapper.
    if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK)
        throw IoError("cannot initialise compressor");
    std::string out(deflateBound(&zs, static_cast<uLong>(data.size())), '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = deflate(&zs, Z_FINISH);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw IoError("compression failed");
    out.resize(zs.total_out);
    return out;
}

inline std::string gzip_decompress(std::string_view data) {
    z_stream zs{};
    if (inflateInit2(&zs, 15 + 16) != Z_OK) throw IoError("cannot initialise decompressor");
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    std::string out;
    char buf[1 << 15];
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = reinterpret_cast<Bytef*>(buf);
        zs.avail_out = sizeof buf;
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw FormatError("archive is not valid gzip data");
        }
        out.append(buf, sizeof buf - zs.avail_out);
        if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
            inflateEnd(&zs);
            throw FormatError("archive is truncated");
        }
    }
    inflateEnd(&zs);
    return out;
}

namespace detail {

inline nlohmann::json snapshot_json(const NetworkView& view) {
    const auto& net = view.network();
    const auto& a = view.attributes();
    nlohmann::json j;
    j["members"] = view.is_full() ? nlohmann::json(nullptr) : id_list(net, view.members());
    j["marked"] = id_list(net, a.marked);
    j["selected"] = id_list(net, a.selected);
    nlohmann::json groups = nlohmann::json::array();
    if (a.groups) {
        for (NodeIndex v = 0; v < net.size(); ++v)
            if ((*a.groups)[v] != 0) groups.push_back({net.publication(v).id, (*a.groups)[v]});
    }
    j["groups"] = std::move(groups);
    return j;
}

inline std::vector<NodeIndex> ids_from(const CitationNetwork& net, const nlohmann::json& list) {
    if (!list.is_array()) throw FormatError("archive: id list expected");
    std::vector<NodeIndex> out;
    for (const auto& id : list) {
        if (!id.is_string()) throw FormatError("archive: ids must be strings");
        const auto found = net.find(id.get<std::string>());
        if (!found) throw FormatError("archive: unknown publication '" + id.get<std::string>() + "'");
        out.push_back(*found);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline NetworkView snapshot_from(const NetworkPtr& net, const nlohmann::json& j) {
    if (!j.is_object()) throw FormatError("archive: history entry must be an object");
    AttributeState a;
    a.marked = ids_from(*net, j.at("marked"));
    a.selected = ids_from(*net, j.at("selected"));
    const auto& groups = j.at("groups");
    if (!groups.is_array()) throw FormatError("archive: groups must be an array");
    if (!groups.empty()) {
        std::vector<std::uint32_t> g(net->size(), 0);
        for (const auto& entry : groups) {
            if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() || !entry[1].is_number_unsigned())
                throw FormatError("archive: group entries are [id, group]");
            const auto found = net->find(entry[0].get<std::string>());
            if (!found) throw FormatError("archive: unknown publication '" + entry[0].get<std::string>() + "'");
            g[*found] = entry[1].get<std::uint32_t>();
        }
        a.groups = std::make_shared<const std::vector<std::uint32_t>>(std::move(g));
    }
    const auto& members = j.at("members");
    if (members.is_null()) return NetworkView(net).with_attributes(std::move(a));
    return NetworkView(net, ids_from(*net, members), std::move(a));
}

} // namespace detail

/// Compressed archive bytes for a session.
inline std::string save_archive(const Session& s) {
    std::ostringstream pubs, cits;
    write_pair_files(pubs, cits, s.network());
    nlohmann::json history = nlohmann::json::array();
    for (std::size_t i = 0; i < s.history_size(); ++i) history.push_back(detail::snapshot_json(s.at(i)));
    const nlohmann::json doc{{"format", "citnet-session"},
                             {"version", kArchiveVersion},
                             {"publications", pubs.str()},
                             {"citations", cits.str()},
                             {"history", std::move(history)},
                             {"cursor", s.cursor()}};
    return gzip_compress(doc.dump());
}

inline Session load_archive(std::string_view bytes) {
    const auto text = gzip_decompress(bytes);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("archive: ") + e.what());
    }
    try {
        if (!doc.is_object() || doc.value("format", "") != "citnet-session") throw FormatError("not a session archive");
        if (doc.at("version") != kArchiveVersion) throw FormatError("unsupported archive version");
        auto loaded = load_pairs(doc.at("publications").get<std::string>(), doc.at("citations").get<std::string>());
        if (!loaded.dropped.empty()) throw FormatError("archive: stored network is not a valid citation network");
        std::vector<NetworkView> history;
        for (const auto& entry : doc.at("history")) history.push_back(detail::snapshot_from(loaded.network, entry));
        return Session::restore(loaded.network, std::move(history), doc.at("cursor").get<std::size_t>());
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("archive: ") + e.what());
    }
}

} // namespace citnet
