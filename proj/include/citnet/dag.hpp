#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "citnet/error.hpp"
#include "citnet/graph.hpp"

namespace citnet {

struct CycleBreakResult {
    std::vector<IndexEdge> kept;
    std::vector<IndexEdge> removed;
};

/// Removes back edges found by a depth-first traversal that starts nodes in
/// `visit_order` and follows out-edges in the same order. Every removed edge
/// closes a cycle over the kept edges, so none can be restored individually.
/// `edges` must be duplicate free; `visit_order` must be a permutation of
/// [0, node_count). Kept and removed edges preserve the input order.
inline CycleBreakResult break_cycles(std::size_t node_count, std::span<const IndexEdge> edges,
                                     std::span<const NodeIndex> visit_order) {
    if (visit_order.size() != node_count) {
        throw ContractError("break_cycles: visit order must cover every node");
    }
    std::vector<NodeIndex> rank(node_count);
    for (NodeIndex pos = 0; pos < node_count; ++pos) rank[visit_order[pos]] = pos;

    std::vector<IndexEdge> ranked;
    ranked.reserve(edges.size());
    for (const auto& e : edges) ranked.push_back({rank[e.citing], rank[e.cited]});
    const Digraph g(node_count, ranked);
    ranked.clear();
    ranked.shrink_to_fit();

    enum : std::uint8_t { white, grey, black };
    std::vector<std::uint8_t> colour(node_count, white);
    std::vector<std::uint32_t> cursor(node_count, 0);
    std::vector<IndexEdge> back_edges;
    std::vector<NodeIndex> stack;

    for (NodeIndex root = 0; root < node_count; ++root) {
        if (colour[root] != white) continue;
        colour[root] = grey;
        stack.push_back(root);
        while (!stack.empty()) {
            const NodeIndex v = stack.back();
            auto targets = g.out(v);
            if (cursor[v] == targets.size()) {
                colour[v] = black;
                stack.pop_back();
                continue;
            }
            const NodeIndex w = targets[cursor[v]++];
            if (colour[w] == grey) {
                back_edges.push_back({v, w});
            } else if (colour[w] == white) {
                colour[w] = grey;
                stack.push_back(w);
            }
        }
    }

    std::sort(back_edges.begin(), back_edges.end());
    CycleBreakResult result;
    result.kept.reserve(edges.size() - back_edges.size());
    for (const auto& e : edges) {
        const IndexEdge ranked_edge{rank[e.citing], rank[e.cited]};
        if (std::binary_search(back_edges.begin(), back_edges.end(), ranked_edge)) {
            result.removed.push_back(e);
        } else {
            result.kept.push_back(e);
        }
    }
    return result;
}

struct EdgeSubset {
    std::vector<IndexEdge> essential;
    std::vector<IndexEdge> non_essential;
};

enum class ReductionStrategy {
    automatic,
    bitset,
    pruned_search,
};

namespace detail {

// Flags are aligned with the CSR order of g.edges(); true means essential.
// Descendant sets are bit rows over a window of `chunk_bits` targets at a
// time, so memory stays at (node_count * chunk_bits / 8) bytes.
inline std::vector<bool> reduce_with_bitsets(const Digraph& g, std::span<const NodeIndex> topo,
                                             std::size_t chunk_bits) {
    const std::size_t n = g.node_count();
    std::vector<bool> essential(g.edge_count(), true);
    if (n == 0) return essential;

    // Relabel by rank: sinks first, so every edge goes from a higher to a lower rank.
    std::vector<NodeIndex> rank(n);
    for (std::size_t pos = 0; pos < n; ++pos) rank[topo[pos]] = static_cast<NodeIndex>(n - 1 - pos);
    std::vector<std::uint64_t> offsets(n + 1, 0);
    for (NodeIndex v = 0; v < n; ++v) offsets[rank[v] + 1] = g.out_degree(v);
    for (std::size_t r = 0; r < n; ++r) offsets[r + 1] += offsets[r];
    std::vector<NodeIndex> child_rank(g.edge_count());
    std::vector<std::uint64_t> edge_slot(g.edge_count()); // position in g's CSR order
    {
        std::uint64_t csr = 0;
        for (NodeIndex v = 0; v < n; ++v) {
            std::uint64_t at = offsets[rank[v]];
            for (NodeIndex w : g.out(v)) {
                child_rank[at] = rank[w];
                edge_slot[at] = csr++;
                ++at;
            }
        }
    }

    const std::size_t words = std::max<std::size_t>(1, std::min((n + 63) / 64, chunk_bits / 64));
    const std::size_t span = words * 64;
    std::vector<std::uint64_t> rows;
    std::vector<std::uint8_t> nonempty;
    std::vector<std::uint64_t> cover(words);

    for (std::size_t lo = 0; lo < n; lo += span) {
        const std::size_t hi = std::min(n, lo + span);
        const std::size_t count = n - lo;
        rows.assign(count * words, 0);
        nonempty.assign(count, 0);
        for (std::size_t x = lo; x < n; ++x) {
            bool any_child = false;
            bool any_cover = false;
            for (std::uint64_t at = offsets[x]; at < offsets[x + 1]; ++at) {
                const NodeIndex w = child_rank[at];
                if (w < lo) continue;
                if (!any_child) {
                    std::fill(cover.begin(), cover.end(), 0);
                    any_child = true;
                }
                if (nonempty[w - lo]) {
                    const std::uint64_t* row = &rows[(w - lo) * words];
                    for (std::size_t k = 0; k < words; ++k) cover[k] |= row[k];
                    any_cover = true;
                }
            }
            if (!any_child) continue;
            std::uint64_t* own = &rows[(x - lo) * words];
            bool own_nonempty = any_cover;
            for (std::uint64_t at = offsets[x]; at < offsets[x + 1]; ++at) {
                const NodeIndex w = child_rank[at];
                if (w < lo || w >= hi) continue;
                const std::size_t bit = w - lo;
                if (any_cover && ((cover[bit / 64] >> (bit % 64)) & 1u)) essential[edge_slot[at]] = false;
                own_nonempty = true;
            }
            if (!own_nonempty) continue;
            if (any_cover) std::copy(cover.begin(), cover.end(), own);
            for (std::uint64_t at = offsets[x]; at < offsets[x + 1]; ++at) {
                const NodeIndex w = child_rank[at];
                if (w < lo || w >= hi) continue;
                const std::size_t bit = w - lo;
                own[bit / 64] |= std::uint64_t{1} << (bit % 64);
            }
            nonempty[x - lo] = 1;
        }
    }
    return essential;
}

inline constexpr std::size_t kIntervalLabels = 3;

struct ReachabilityLabels {
    // For u reaching v: low[v] >= low[u] and post[v] <= post[u] in every
    // labelling, and height[v] < height[u].
    std::vector<std::array<std::uint32_t, kIntervalLabels>> low;
    std::vector<std::array<std::uint32_t, kIntervalLabels>> post;
    std::vector<std::uint32_t> height;

    bool may_reach(NodeIndex from, NodeIndex to) const noexcept {
        if (height[to] >= height[from]) return false;
        for (std::size_t k = 0; k < kIntervalLabels; ++k) {
            if (low[to][k] < low[from][k] || post[to][k] > post[from][k]) return false;
        }
        return true;
    }
};

inline ReachabilityLabels build_labels(const Digraph& g, std::span<const NodeIndex> topo) {
    const std::size_t n = g.node_count();
    ReachabilityLabels labels;
    labels.low.resize(n);
    labels.post.resize(n);
    labels.height.assign(n, 0);
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        std::uint32_t h = 0;
        for (NodeIndex w : g.out(*it)) h = std::max(h, labels.height[w] + 1);
        labels.height[*it] = h;
    }

    std::vector<std::uint32_t> cursor(n);
    std::vector<std::uint8_t> seen(n);
    std::vector<NodeIndex> stack;
    for (std::size_t k = 0; k < kIntervalLabels; ++k) {
        std::fill(cursor.begin(), cursor.end(), 0);
        std::fill(seen.begin(), seen.end(), 0);
        std::uint32_t counter = 0;
        // Each labelling walks roots and children in a different rotation so
        // the intervals disagree on unrelated nodes.
        auto child_at = [&](NodeIndex v, std::uint32_t i) {
            auto t = g.out(v);
            const std::size_t d = t.size();
            switch (k) {
            case 0: return t[i];
            case 1: return t[d - 1 - i];
            default: return t[(i + (v % d)) % d];
            }
        };
        auto visit_root = [&](NodeIndex root) {
            if (seen[root]) return;
            seen[root] = 1;
            labels.low[root][k] = UINT32_MAX;
            stack.push_back(root);
            while (!stack.empty()) {
                const NodeIndex v = stack.back();
                if (cursor[v] < g.out_degree(v)) {
                    const NodeIndex w = child_at(v, cursor[v]++);
                    if (!seen[w]) {
                        seen[w] = 1;
                        labels.low[w][k] = UINT32_MAX;
                        stack.push_back(w);
                    }
                    continue;
                }
                stack.pop_back();
                labels.post[v][k] = counter++;
                std::uint32_t lo = labels.post[v][k];
                for (NodeIndex w : g.out(v)) lo = std::min(lo, labels.low[w][k]);
                labels.low[v][k] = lo;
            }
        };
        if (k == 1) {
            for (auto it = topo.rbegin(); it != topo.rend(); ++it) visit_root(*it);
        } else {
            for (NodeIndex v : topo) visit_root(v);
        }
    }
    return labels;
}

inline std::vector<bool> reduce_with_search(const Digraph& g, std::span<const NodeIndex> topo) {
    const std::size_t n = g.node_count();
    const ReachabilityLabels labels = build_labels(g, topo);
    // rank grows from sinks upwards: every edge goes from a higher to a lower rank.
    std::vector<NodeIndex> rank(n);
    for (std::size_t pos = 0; pos < n; ++pos) rank[topo[pos]] = static_cast<NodeIndex>(n - 1 - pos);

    std::vector<std::size_t> first_edge(n + 1, 0);
    for (NodeIndex v = 0; v < n; ++v) first_edge[v + 1] = first_edge[v] + g.out_degree(v);
    std::vector<bool> essential(g.edge_count(), true);

    std::vector<std::uint32_t> stamp(n, 0);
    std::vector<std::uint32_t> child_slot;
    std::vector<NodeIndex> stack;
    constexpr std::size_t kLabelCheckLimit = 32;

    for (NodeIndex u = 0; u < n; ++u) {
        auto targets = g.out(u);
        if (targets.size() < 2) continue;
        const std::uint32_t mark = u + 1;
        child_slot.resize(targets.size());
        std::iota(child_slot.begin(), child_slot.end(), 0u);
        std::sort(child_slot.begin(), child_slot.end(),
                  [&](std::uint32_t a, std::uint32_t b) { return rank[targets[a]] > rank[targets[b]]; });

        for (std::size_t i = 0; i + 1 < child_slot.size(); ++i) {
            const NodeIndex v = targets[child_slot[i]];
            if (stamp[v] == mark) {
                essential[first_edge[u] + child_slot[i]] = false;
                continue;
            }
            // Children after position i are still undecided and all rank below v.
            const std::span<const std::uint32_t> remaining(child_slot.data() + i + 1, child_slot.size() - i - 1);
            const NodeIndex floor_rank = rank[targets[remaining.back()]];
            auto worth_visiting = [&](NodeIndex x) {
                if (stamp[x] == mark || rank[x] < floor_rank) return false;
                if (remaining.size() > kLabelCheckLimit) return true;
                for (std::uint32_t slot : remaining) {
                    const NodeIndex c = targets[slot];
                    if (c == x || labels.may_reach(x, c)) return true;
                }
                return false;
            };
            for (NodeIndex w : g.out(v)) {
                if (worth_visiting(w)) {
                    stamp[w] = mark;
                    stack.push_back(w);
                }
            }
            while (!stack.empty()) {
                const NodeIndex x = stack.back();
                stack.pop_back();
                for (NodeIndex y : g.out(x)) {
                    if (worth_visiting(y)) {
                        stamp[y] = mark;
                        stack.push_back(y);
                    }
                }
            }
        }
        const std::uint32_t last = child_slot.back();
        if (stamp[targets[last]] == mark) essential[first_edge[u] + last] = false;
    }
    return essential;
}

} // namespace detail

/// Splits the edges of an acyclic graph into essential edges (no other
/// directed path between the endpoints) and non-essential ones. The essential
/// set is the unique transitive reduction.
/// The bitset strategy bounds its working memory by `chunk_bits` bits per node.
inline EdgeSubset transitive_reduction(const Digraph& g,
                                       ReductionStrategy strategy = ReductionStrategy::automatic,
                                       std::size_t chunk_bits = 2048) {
    const auto topo = topological_order(g);
    if (topo.size() != g.node_count()) {
        throw ContractError("transitive_reduction: the network contains a cycle");
    }
    const std::vector<bool> essential = strategy == ReductionStrategy::pruned_search
                                            ? detail::reduce_with_search(g, topo)
                                            : detail::reduce_with_bitsets(g, topo, chunk_bits);
    EdgeSubset result;
    std::size_t pos = 0;
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
        for (NodeIndex w : g.out(v)) {
            (essential[pos++] ? result.essential : result.non_essential).push_back({v, w});
        }
    }
    return result;
}

} // namespace citnet
