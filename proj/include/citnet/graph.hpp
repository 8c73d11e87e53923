#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace citnet {

using NodeIndex = std::uint32_t;

/// Directed edge between dense node indices, running from the citing to the
/// cited publication.
struct IndexEdge {
    NodeIndex citing;
    NodeIndex cited;

    friend bool operator==(const IndexEdge&, const IndexEdge&) = default;
    friend auto operator<=>(const IndexEdge&, const IndexEdge&) = default;
};

/// Compressed adjacency in both directions. Neighbour lists are sorted by
/// index. Immutable once built.
class Digraph {
public:
    Digraph() = default;

    /// Edges must be free of duplicates; order does not matter.
    Digraph(std::size_t node_count, std::span<const IndexEdge> edges) { build(node_count, edges); }

    std::size_t node_count() const noexcept { return out_offsets_.empty() ? 0 : out_offsets_.size() - 1; }
    std::size_t edge_count() const noexcept { return out_targets_.size(); }

    std::span<const NodeIndex> out(NodeIndex v) const noexcept {
        return {out_targets_.data() + out_offsets_[v], out_targets_.data() + out_offsets_[v + 1]};
    }
    std::span<const NodeIndex> in(NodeIndex v) const noexcept {
        return {in_sources_.data() + in_offsets_[v], in_sources_.data() + in_offsets_[v + 1]};
    }
    std::size_t out_degree(NodeIndex v) const noexcept { return out_offsets_[v + 1] - out_offsets_[v]; }
    std::size_t in_degree(NodeIndex v) const noexcept { return in_offsets_[v + 1] - in_offsets_[v]; }

    bool has_edge(NodeIndex from, NodeIndex to) const noexcept {
        auto targets = out(from);
        return std::binary_search(targets.begin(), targets.end(), to);
    }

    /// All edges in (citing, cited) lexicographic order.
    std::vector<IndexEdge> edges() const {
        std::vector<IndexEdge> result;
        result.reserve(edge_count());
        for (NodeIndex v = 0; v < node_count(); ++v) {
            for (NodeIndex w : out(v)) result.push_back({v, w});
        }
        return result;
    }

    Digraph reversed() const {
        Digraph r;
        r.out_offsets_ = in_offsets_;
        r.out_targets_ = in_sources_;
        r.in_offsets_ = out_offsets_;
        r.in_sources_ = out_targets_;
        return r;
    }

private:
    void build(std::size_t n, std::span<const IndexEdge> edges) {
        out_offsets_.assign(n + 1, 0);
        in_offsets_.assign(n + 1, 0);
        for (const auto& e : edges) {
            ++out_offsets_[e.citing + 1];
            ++in_offsets_[e.cited + 1];
        }
        for (std::size_t i = 0; i < n; ++i) {
            out_offsets_[i + 1] += out_offsets_[i];
            in_offsets_[i + 1] += in_offsets_[i];
        }
        out_targets_.resize(edges.size());
        in_sources_.resize(edges.size());
        std::vector<std::uint64_t> out_pos(out_offsets_.begin(), out_offsets_.end() - 1);
        std::vector<std::uint64_t> in_pos(in_offsets_.begin(), in_offsets_.end() - 1);
        for (const auto& e : edges) {
            out_targets_[out_pos[e.citing]++] = e.cited;
            in_sources_[in_pos[e.cited]++] = e.citing;
        }
        for (std::size_t v = 0; v < n; ++v) {
            std::sort(out_targets_.begin() + static_cast<std::ptrdiff_t>(out_offsets_[v]),
                      out_targets_.begin() + static_cast<std::ptrdiff_t>(out_offsets_[v + 1]));
            std::sort(in_sources_.begin() + static_cast<std::ptrdiff_t>(in_offsets_[v]),
                      in_sources_.begin() + static_cast<std::ptrdiff_t>(in_offsets_[v + 1]));
        }
    }

    std::vector<std::uint64_t> out_offsets_;
    std::vector<NodeIndex> out_targets_;
    std::vector<std::uint64_t> in_offsets_;
    std::vector<NodeIndex> in_sources_;
};

/// Induced subgraph with local indices; `to_global[local]` maps back.
struct Subgraph {
    Digraph graph;
    std::vector<NodeIndex> to_global;
};

/// `members` must be sorted and unique.
inline Subgraph induced_subgraph(const Digraph& g, std::span<const NodeIndex> members) {
    Subgraph sub;
    sub.to_global.assign(members.begin(), members.end());
    std::vector<IndexEdge> local_edges;
    for (NodeIndex local = 0; local < members.size(); ++local) {
        for (NodeIndex target : g.out(members[local])) {
            auto it = std::lower_bound(members.begin(), members.end(), target);
            if (it != members.end() && *it == target) {
                local_edges.push_back({local, static_cast<NodeIndex>(it - members.begin())});
            }
        }
    }
    sub.graph = Digraph(members.size(), local_edges);
    return sub;
}

/// Kahn order where every edge goes from an earlier to a later position
/// (citing before cited). Returns fewer than node_count() entries on a cycle.
inline std::vector<NodeIndex> topological_order(const Digraph& g) {
    const std::size_t n = g.node_count();
    std::vector<std::uint32_t> pending(n);
    std::vector<NodeIndex> order;
    order.reserve(n);
    for (NodeIndex v = 0; v < n; ++v) {
        pending[v] = static_cast<std::uint32_t>(g.in_degree(v));
        if (pending[v] == 0) order.push_back(v);
    }
    for (std::size_t head = 0; head < order.size(); ++head) {
        for (NodeIndex w : g.out(order[head])) {
            if (--pending[w] == 0) order.push_back(w);
        }
    }
    return order;
}

inline bool is_acyclic(const Digraph& g) { return topological_order(g).size() == g.node_count(); }

} // namespace citnet
