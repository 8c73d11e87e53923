#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "citnet/dag.hpp"
#include "citnet/error.hpp"
#include "citnet/graph.hpp"

namespace citnet {

struct Publication {
    std::string id;
    std::string first_author; // last name and first initial, e.g. "NEWMAN M"
    std::vector<std::string> co_authors;
    std::string title;
    std::string source;
    int year = 0;
    std::string volume;
    std::string begin_page;
    std::optional<std::string> doi;
    std::uint64_t external_citations = 0;
    bool external_citations_known = false;
    bool complete_record = true;
};

/// Last name of the first author, used as the display label.
inline std::string label_of(const Publication& p) {
    const std::string& a = p.first_author;
    const auto cut = a.find_first_of(", ");
    return a.substr(0, cut);
}

struct RawEdge {
    std::string citing;
    std::string cited;

    friend bool operator==(const RawEdge&, const RawEdge&) = default;
};

enum class DropReason {
    forward_in_time,
    cycle,
    self_citation,
    duplicate,
    incomplete_citing,
};

inline const char* to_string(DropReason r) {
    switch (r) {
    case DropReason::forward_in_time: return "forward-in-time";
    case DropReason::cycle: return "cycle";
    case DropReason::self_citation: return "self-citation";
    case DropReason::duplicate: return "duplicate";
    case DropReason::incomplete_citing: return "incomplete-citing";
    }
    return "unknown";
}

struct DroppedEdge {
    IndexEdge edge;
    DropReason reason;

    friend bool operator==(const DroppedEdge&, const DroppedEdge&) = default;
};

enum class ScoreMode { internal, external };

/// The full network: publications plus an acyclic, time-consistent citation
/// relation. Immutable after construction.
class CitationNetwork {
public:
    CitationNetwork(std::vector<Publication> publications, Digraph graph)
        : publications_(std::move(publications)), graph_(std::move(graph)) {
        index_.reserve(publications_.size());
        for (NodeIndex i = 0; i < publications_.size(); ++i) index_.emplace(publications_[i].id, i);
    }

    std::size_t size() const noexcept { return publications_.size(); }
    std::size_t edge_count() const noexcept { return graph_.edge_count(); }
    const Digraph& graph() const noexcept { return graph_; }
    const Publication& publication(NodeIndex i) const { return publications_.at(i); }
    std::span<const Publication> publications() const noexcept { return publications_; }

    std::optional<NodeIndex> find(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    NodeIndex index_of(const std::string& id) const {
        auto found = find(id);
        if (!found) throw NotFoundError("unknown publication id '" + id + "'");
        return *found;
    }

    std::uint32_t internal_citations(NodeIndex i) const {
        return static_cast<std::uint32_t>(graph_.in_degree(i));
    }

private:
    std::vector<Publication> publications_;
    Digraph graph_;
    std::unordered_map<std::string, NodeIndex> index_;
};

using NetworkPtr = std::shared_ptr<const CitationNetwork>;

struct BuildResult {
    NetworkPtr network;
    std::vector<DroppedEdge> dropped;
};

/// Order used for cycle breaking and other tie-breaks: year ascending, then id.
inline std::vector<NodeIndex> chronological_order(std::span<const Publication> pubs) {
    std::vector<NodeIndex> order(pubs.size());
    std::iota(order.begin(), order.end(), NodeIndex{0});
    std::sort(order.begin(), order.end(), [&](NodeIndex a, NodeIndex b) {
        if (pubs[a].year != pubs[b].year) return pubs[a].year < pubs[b].year;
        return pubs[a].id < pubs[b].id;
    });
    return order;
}

/// Builds the network from index-based raw edges. Edges that are self
/// citations, repeats, cite from an incomplete record, or point forward in
/// time are dropped first; remaining cycles are then broken. Dropped edges are
/// reported in input order per stage.
inline BuildResult build_network(std::vector<Publication> publications, std::span<const IndexEdge> raw_edges) {
    std::unordered_map<std::string, NodeIndex> seen;
    seen.reserve(publications.size());
    for (NodeIndex i = 0; i < publications.size(); ++i) {
        if (!seen.emplace(publications[i].id, i).second) {
            throw FormatError("duplicate publication id '" + publications[i].id + "'");
        }
    }
    seen.clear();
    const std::size_t n = publications.size();

    BuildResult result;
    std::vector<IndexEdge> temporal;
    temporal.reserve(raw_edges.size());
    {
        std::vector<std::uint64_t> keys;
        keys.reserve(raw_edges.size());
        for (const auto& e : raw_edges) {
            if (e.citing >= n || e.cited >= n) {
                throw FormatError("edge references unknown node index " + std::to_string(std::max(e.citing, e.cited)));
            }
            keys.push_back((std::uint64_t{e.citing} << 32) | e.cited);
        }
        // Stable first-occurrence detection for duplicates.
        std::vector<std::uint32_t> order(keys.size());
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return keys[a] < keys[b]; });
        std::vector<bool> repeat(keys.size(), false);
        for (std::size_t i = 1; i < order.size(); ++i) {
            if (keys[order[i]] == keys[order[i - 1]]) repeat[order[i]] = true;
        }
        for (std::size_t i = 0; i < raw_edges.size(); ++i) {
            const auto& e = raw_edges[i];
            if (e.citing == e.cited) {
                result.dropped.push_back({e, DropReason::self_citation});
            } else if (repeat[i]) {
                result.dropped.push_back({e, DropReason::duplicate});
            } else if (!publications[e.citing].complete_record) {
                result.dropped.push_back({e, DropReason::incomplete_citing});
            } else if (publications[e.citing].year < publications[e.cited].year) {
                result.dropped.push_back({e, DropReason::forward_in_time});
            } else {
                temporal.push_back(e);
            }
        }
    }

    const auto order = chronological_order(publications);
    auto broken = break_cycles(n, temporal, order);
    temporal.clear();
    temporal.shrink_to_fit();
    for (const auto& e : broken.removed) result.dropped.push_back({e, DropReason::cycle});

    Digraph graph(n, broken.kept);
    result.network = std::make_shared<const CitationNetwork>(std::move(publications), std::move(graph));
    return result;
}

/// Id-based front end. Unknown ids are rejected naming the edge.
inline BuildResult build_network(std::vector<Publication> publications, std::span<const RawEdge> raw_edges) {
    std::unordered_map<std::string, NodeIndex> index;
    index.reserve(publications.size());
    for (NodeIndex i = 0; i < publications.size(); ++i) {
        if (!index.emplace(publications[i].id, i).second) {
            throw FormatError("duplicate publication id '" + publications[i].id + "'");
        }
    }
    std::vector<IndexEdge> edges;
    edges.reserve(raw_edges.size());
    for (const auto& e : raw_edges) {
        auto a = index.find(e.citing);
        auto b = index.find(e.cited);
        if (a == index.end() || b == index.end()) {
            throw FormatError("edge " + e.citing + " -> " + e.cited + " references an unknown publication");
        }
        edges.push_back({a->second, b->second});
    }
    index.clear();
    return build_network(std::move(publications), edges);
}

inline std::uint64_t citation_score(const CitationNetwork& net, NodeIndex i, ScoreMode mode = ScoreMode::internal) {
    if (i >= net.size()) throw NotFoundError("unknown publication index " + std::to_string(i));
    return mode == ScoreMode::internal ? net.internal_citations(i) : net.publication(i).external_citations;
}

inline std::uint64_t citation_score(const CitationNetwork& net, const std::string& id,
                                    ScoreMode mode = ScoreMode::internal) {
    return citation_score(net, net.index_of(id), mode);
}

/// Per-publication marking, selection and group state of one view.
/// Groups are stored for every publication of the full network (0 = none)
/// and shared between snapshots until written.
struct AttributeState {
    std::vector<NodeIndex> marked;   // sorted
    std::vector<NodeIndex> selected; // sorted
    std::shared_ptr<const std::vector<std::uint32_t>> groups;

    std::uint32_t group(NodeIndex i) const { return groups ? (*groups)[i] : 0; }
    bool is_marked(NodeIndex i) const { return std::binary_search(marked.begin(), marked.end(), i); }
    bool is_selected(NodeIndex i) const { return std::binary_search(selected.begin(), selected.end(), i); }
};

struct AttributeChange {
    std::string id;
    std::optional<bool> marked;
    std::optional<bool> selected;
    std::optional<std::uint32_t> group; // positive
    bool clear_group = false;
};

/// A subset of the full network with its attribute state. Snapshots are
/// values; operations return new views.
class NetworkView {
public:
    NetworkView() = default;

    /// View over the whole network.
    explicit NetworkView(NetworkPtr network) : network_(std::move(network)) {
        members_.resize(network_->size());
        std::iota(members_.begin(), members_.end(), NodeIndex{0});
        is_member_.assign(network_->size(), 1);
        edge_count_ = network_->edge_count();
    }

    /// `members` need not be sorted; duplicates are removed.
    NetworkView(NetworkPtr network, std::vector<NodeIndex> members, AttributeState attributes = {})
        : network_(std::move(network)), members_(std::move(members)), attributes_(std::move(attributes)) {
        std::sort(members_.begin(), members_.end());
        members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
        is_member_.assign(network_->size(), 0);
        for (NodeIndex m : members_) {
            if (m >= network_->size()) throw ContractError("view member outside the full network");
            is_member_[m] = 1;
        }
        recount_edges();
        recount_selection();
    }

    const NetworkPtr& network_ptr() const noexcept { return network_; }
    const CitationNetwork& network() const { return *network_; }
    std::span<const NodeIndex> members() const noexcept { return members_; }
    bool contains(NodeIndex i) const noexcept { return i < is_member_.size() && is_member_[i]; }
    /// One flag per full-network publication.
    std::span<const std::uint8_t> membership() const noexcept { return is_member_; }
    const AttributeState& attributes() const noexcept { return attributes_; }

    std::size_t member_count() const noexcept { return members_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }
    std::size_t selected_count() const noexcept { return attributes_.selected.size(); }
    std::size_t selected_edge_count() const noexcept { return selected_edge_count_; }
    bool is_full() const noexcept { return network_ && members_.size() == network_->size(); }

    /// Citations received from members of this view only.
    std::uint32_t view_internal_citations(NodeIndex i) const {
        std::uint32_t count = 0;
        for (NodeIndex s : network_->graph().in(i)) count += is_member_[s];
        return count;
    }

    Subgraph subgraph() const { return induced_subgraph(network_->graph(), members_); }

    NetworkView with_attributes(AttributeState attributes) const {
        NetworkView copy = *this;
        copy.attributes_ = std::move(attributes);
        copy.recount_selection();
        return copy;
    }

private:
    void recount_edges() {
        if (members_.size() == network_->size()) {
            edge_count_ = network_->edge_count();
            return;
        }
        std::size_t count = 0;
        for (NodeIndex m : members_) {
            for (NodeIndex t : network_->graph().out(m)) count += is_member_[t];
        }
        edge_count_ = count;
    }

    void recount_selection() {
        const auto& sel = attributes_.selected;
        std::size_t count = 0;
        for (NodeIndex s : sel) {
            for (NodeIndex t : network_->graph().out(s)) count += std::binary_search(sel.begin(), sel.end(), t);
        }
        selected_edge_count_ = count;
    }

    NetworkPtr network_;
    std::vector<NodeIndex> members_;
    std::vector<std::uint8_t> is_member_;
    AttributeState attributes_;
    std::size_t edge_count_ = 0;
    std::size_t selected_edge_count_ = 0;
};

/// Applies marked/selected/group changes. Every id must be a member.
inline NetworkView update_attributes(const NetworkView& view, std::span<const AttributeChange> changes) {
    const auto& net = view.network();
    AttributeState state = view.attributes();
    std::vector<std::uint32_t> groups;
    bool groups_touched = false;
    auto set_flag = [](std::vector<NodeIndex>& set, NodeIndex i, bool on) {
        auto it = std::lower_bound(set.begin(), set.end(), i);
        const bool present = it != set.end() && *it == i;
        if (on && !present) set.insert(it, i);
        if (!on && present) set.erase(it);
    };
    for (const auto& change : changes) {
        const auto idx = net.find(change.id);
        if (!idx || !view.contains(*idx)) {
            throw PreconditionError("publication '" + change.id + "' is not a member of the current network");
        }
        if (change.marked) set_flag(state.marked, *idx, *change.marked);
        if (change.selected) set_flag(state.selected, *idx, *change.selected);
        if (change.group || change.clear_group) {
            if (change.group && *change.group == 0) throw ContractError("group numbers start at 1");
            if (!groups_touched) {
                groups = state.groups ? *state.groups : std::vector<std::uint32_t>(net.size(), 0);
                groups_touched = true;
            }
            groups[*idx] = change.clear_group ? 0 : *change.group;
        }
    }
    if (groups_touched) state.groups = std::make_shared<const std::vector<std::uint32_t>>(std::move(groups));
    return view.with_attributes(std::move(state));
}

} // namespace citnet
