#pragma once

// Connected components, clustering by local moving on the quality function
// sum_ij delta(c_i, c_j) (a_ij - gamma / 2n), k-cores and extremal paths.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "citnet/error.hpp"
#include "citnet/graph.hpp"
#include "citnet/model.hpp"

namespace citnet {

// ---------------------------------------------------------------- components

struct Components {
    std::vector<std::uint32_t> component;         // per node, 0 = largest
    std::vector<std::vector<NodeIndex>> members;  // sorted, by component
};

/// Weakly connected components, ordered by size (descending) and then by
/// smallest member under `less` (node index when empty).
inline Components connected_components(const Digraph& g,
                                       const std::function<bool(NodeIndex, NodeIndex)>& less = {}) {
    const auto n = g.node_count();
    std::vector<NodeIndex> parent(n);
    std::iota(parent.begin(), parent.end(), NodeIndex{0});
    auto find = [&](NodeIndex x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (NodeIndex v = 0; v < n; ++v) {
        for (NodeIndex w : g.out(v)) {
            const auto a = find(v), b = find(w);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    }
    std::vector<std::uint32_t> root_slot(n, std::numeric_limits<std::uint32_t>::max());
    Components c;
    for (NodeIndex v = 0; v < n; ++v) {
        const auto r = find(v);
        if (root_slot[r] == std::numeric_limits<std::uint32_t>::max()) {
            root_slot[r] = static_cast<std::uint32_t>(c.members.size());
            c.members.emplace_back();
        }
        c.members[root_slot[r]].push_back(v);
    }
    auto smallest = [&](const std::vector<NodeIndex>& m) {
        return less ? *std::min_element(m.begin(), m.end(), less) : m.front();
    };
    std::vector<NodeIndex> key(c.members.size());
    for (std::size_t i = 0; i < key.size(); ++i) key[i] = smallest(c.members[i]);
    std::vector<std::uint32_t> order(c.members.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (c.members[a].size() != c.members[b].size()) return c.members[a].size() > c.members[b].size();
        return less ? less(key[a], key[b]) : key[a] < key[b];
    });
    Components sorted;
    sorted.component.assign(n, 0);
    for (std::uint32_t rank = 0; rank < order.size(); ++rank) {
        sorted.members.push_back(std::move(c.members[order[rank]]));
        for (NodeIndex v : sorted.members.back()) sorted.component[v] = rank;
    }
    return sorted;
}

// ---------------------------------------------------------------- relatedness

/// a_ij = 1 / outdeg(i) when i cites j. Stored row-wise along g.out(i).
struct Relatedness {
    const Digraph* graph = nullptr;
    std::vector<double> row_weight; // 1/outdeg(i), 0 for nodes citing nothing

    double operator()(NodeIndex i, NodeIndex j) const {
        return graph->has_edge(i, j) ? row_weight[i] : 0.0;
    }
    double row_sum(NodeIndex i) const { return row_weight[i] * static_cast<double>(graph->out_degree(i)); }
};

inline Relatedness relatedness(const Digraph& g) {
    Relatedness r;
    r.graph = &g;
    r.row_weight.resize(g.node_count());
    for (NodeIndex i = 0; i < g.node_count(); ++i) {
        const auto d = g.out_degree(i);
        r.row_weight[i] = d ? 1.0 / static_cast<double>(d) : 0.0;
    }
    return r;
}

/// Literal value of sum_i sum_j delta(c_i, c_j) (a_ij - gamma / 2n).
inline double quality(const Digraph& g, std::span<const std::uint32_t> cluster, double gamma) {
    const auto n = g.node_count();
    if (cluster.size() != n) throw ContractError("partition does not cover every publication");
    if (n == 0) return 0.0;
    double q = 0.0;
    for (NodeIndex i = 0; i < n; ++i) {
        const auto d = g.out_degree(i);
        if (!d) continue;
        std::size_t same = 0;
        for (NodeIndex j : g.out(i)) same += cluster[j] == cluster[i];
        q += static_cast<double>(same) / static_cast<double>(d);
    }
    std::vector<std::uint32_t> labels(cluster.begin(), cluster.end());
    std::sort(labels.begin(), labels.end());
    double squares = 0.0;
    for (std::size_t i = 0; i < labels.size();) {
        std::size_t j = i;
        while (j < labels.size() && labels[j] == labels[i]) ++j;
        squares += static_cast<double>(j - i) * static_cast<double>(j - i);
        i = j;
    }
    return q - gamma / (2.0 * static_cast<double>(n)) * squares;
}

// ---------------------------------------------------------------- clustering

enum class SmallClusterPolicy { discard, merge };

inline const char* to_string(SmallClusterPolicy p) { return p == SmallClusterPolicy::discard ? "discard" : "merge"; }

struct ClusterOptions {
    double resolution = 1.0;
    std::uint32_t min_cluster_size = 1;
    SmallClusterPolicy policy = SmallClusterPolicy::discard;
    std::uint64_t seed = 0;
    std::uint32_t random_starts = 10;
    std::uint32_t iterations = 10;
};

struct Partition {
    std::vector<std::uint32_t> cluster; // per node, 1-based; 0 = left without a cluster by the policy
    std::uint32_t cluster_count = 0;
    double resolution = 1.0;
    double quality = 0.0; // of the optimised partition, before the small-cluster policy
    std::uint32_t min_cluster_size = 1;
    SmallClusterPolicy policy = SmallClusterPolicy::discard;
};

namespace detail {

// Undirected weighted network; node sizes and internal weights let
// aggregated nodes stand for clusters of original publications.
struct WeightedNetwork {
    std::vector<std::size_t> offset;
    std::vector<NodeIndex> target;
    std::vector<double> weight;
    std::vector<double> size;
    std::vector<double> self;

    std::size_t node_count() const { return size.size(); }
};

inline WeightedNetwork symmetrize(const Digraph& g) {
    const auto n = g.node_count();
    WeightedNetwork w;
    w.size.assign(n, 1.0);
    w.self.assign(n, 0.0);
    w.offset.assign(n + 1, 0);
    for (NodeIndex v = 0; v < n; ++v) w.offset[v + 1] = w.offset[v] + g.out_degree(v) + g.in_degree(v);
    w.target.resize(w.offset[n]);
    w.weight.resize(w.offset[n]);
    std::vector<std::size_t> fill(w.offset.begin(), w.offset.end() - 1);
    for (NodeIndex v = 0; v < n; ++v) {
        const auto d = g.out_degree(v);
        for (NodeIndex t : g.out(v)) {
            const double a = 1.0 / static_cast<double>(d);
            w.target[fill[v]] = t;
            w.weight[fill[v]++] = a;
            w.target[fill[t]] = v;
            w.weight[fill[t]++] = a;
        }
    }
    return w;
}

inline double network_quality(const WeightedNetwork& w, std::span<const std::uint32_t> cl, double gamma) {
    const auto n = w.node_count();
    if (n == 0) return 0.0;
    const double total = std::accumulate(w.size.begin(), w.size.end(), 0.0);
    double q = 0.0;
    std::vector<double> csize(n, 0.0);
    for (NodeIndex i = 0; i < n; ++i) {
        q += w.self[i];
        csize[cl[i]] += w.size[i];
        for (std::size_t e = w.offset[i]; e < w.offset[i + 1]; ++e)
            if (cl[w.target[e]] == cl[i]) q += 0.5 * w.weight[e];
    }
    double squares = 0.0;
    for (double s : csize) squares += s * s;
    return q - gamma / (2.0 * total) * squares;
}

inline constexpr double kMinGain = 1e-12;

/// Moves single nodes while any move raises quality by more than kMinGain.
/// With `within`, a node only considers neighbours sharing its `within` label.
inline bool local_moving(const WeightedNetwork& w, std::vector<std::uint32_t>& cl, double gamma, double total,
                         std::mt19937_64& rng, const std::vector<std::uint32_t>* within = nullptr) {
    const auto n = w.node_count();
    if (n == 0) return false;
    const double f = gamma / total;
    std::vector<double> csize(n, 0.0);
    for (NodeIndex i = 0; i < n; ++i) csize[cl[i]] += w.size[i];
    std::vector<std::uint32_t> empty;
    for (std::uint32_t c = 0; c < n; ++c)
        if (csize[c] == 0.0) empty.push_back(c);

    std::vector<double> kw(n, 0.0);
    std::vector<std::uint8_t> touched_flag(n, 0);
    std::vector<std::uint32_t> touched;
    std::vector<std::uint8_t> queued(n, 0);
    std::deque<NodeIndex> queue;
    {
        std::vector<NodeIndex> order(n);
        std::iota(order.begin(), order.end(), NodeIndex{0});
        std::shuffle(order.begin(), order.end(), rng);
        for (NodeIndex v : order) queue.push_back(v);
        std::fill(queued.begin(), queued.end(), 1);
    }

    // Best target for i once it has been taken out of its cluster; returns own on no gain.
    auto best_move = [&](NodeIndex i, std::uint32_t own) {
        touched.clear();
        for (std::size_t e = w.offset[i]; e < w.offset[i + 1]; ++e) {
            const NodeIndex j = w.target[e];
            if (within && (*within)[j] != (*within)[i]) continue;
            const auto c = cl[j];
            if (!touched_flag[c]) {
                touched_flag[c] = 1;
                touched.push_back(c);
            }
            kw[c] += w.weight[e];
        }
        const double si = w.size[i];
        const double own_gain = kw[own] - f * si * csize[own];
        std::uint32_t best = own;
        double best_gain = own_gain;
        for (auto c : touched) {
            if (c == own) continue;
            const double gain = kw[c] - f * si * csize[c];
            if (gain > best_gain) {
                best = c;
                best_gain = gain;
            }
        }
        if (best != own && best_gain <= own_gain + kMinGain) {
            best = own;
            best_gain = own_gain;
        }
        // An empty cluster has gain 0.
        const bool go_empty = csize[own] > 0.0 && 0.0 > best_gain + kMinGain;
        for (auto c : touched) {
            kw[c] = 0.0;
            touched_flag[c] = 0;
        }
        if (go_empty) return std::numeric_limits<std::uint32_t>::max();
        return best;
    };

    bool changed = false;
    while (true) {
        while (!queue.empty()) {
            const NodeIndex i = queue.front();
            queue.pop_front();
            queued[i] = 0;
            const auto own = cl[i];
            csize[own] -= w.size[i];
            auto target = best_move(i, own);
            if (target == std::numeric_limits<std::uint32_t>::max()) {
                target = empty.back();
                empty.pop_back();
            }
            csize[target] += w.size[i];
            if (target == own) continue;
            if (csize[own] == 0.0) empty.push_back(own);
            cl[i] = target;
            changed = true;
            for (std::size_t e = w.offset[i]; e < w.offset[i + 1]; ++e) {
                const NodeIndex j = w.target[e];
                if (!queued[j] && cl[j] != target && (!within || (*within)[j] == (*within)[i])) {
                    queued[j] = 1;
                    queue.push_back(j);
                }
            }
        }
        // Cluster sizes also change for non-neighbours; a full check closes the gap.
        for (NodeIndex i = 0; i < n; ++i) {
            const auto own = cl[i];
            csize[own] -= w.size[i];
            const auto target = best_move(i, own);
            csize[own] += w.size[i];
            if (target != own) {
                queued[i] = 1;
                queue.push_back(i);
            }
        }
        if (queue.empty()) break;
    }
    return changed;
}

inline std::uint32_t renumber(std::vector<std::uint32_t>& cl) {
    std::vector<std::uint32_t> map(cl.size() + 1, std::numeric_limits<std::uint32_t>::max());
    std::uint32_t next = 0;
    for (auto& c : cl) {
        if (map[c] == std::numeric_limits<std::uint32_t>::max()) map[c] = next++;
        c = map[c];
    }
    return next;
}

inline WeightedNetwork aggregate(const WeightedNetwork& w, const std::vector<std::uint32_t>& cl, std::uint32_t k) {
    WeightedNetwork r;
    r.size.assign(k, 0.0);
    r.self.assign(k, 0.0);
    std::vector<std::vector<NodeIndex>> members(k);
    for (NodeIndex i = 0; i < w.node_count(); ++i) {
        r.size[cl[i]] += w.size[i];
        r.self[cl[i]] += w.self[i];
        members[cl[i]].push_back(i);
    }
    std::vector<double> acc(k, 0.0);
    std::vector<std::uint32_t> touched;
    r.offset.assign(k + 1, 0);
    for (std::uint32_t c = 0; c < k; ++c) {
        touched.clear();
        for (NodeIndex i : members[c]) {
            for (std::size_t e = w.offset[i]; e < w.offset[i + 1]; ++e) {
                const auto d = cl[w.target[e]];
                if (d == c) {
                    r.self[c] += 0.5 * w.weight[e];
                    continue;
                }
                if (acc[d] == 0.0) touched.push_back(d);
                acc[d] += w.weight[e];
            }
        }
        std::sort(touched.begin(), touched.end());
        for (auto d : touched) {
            r.target.push_back(d);
            r.weight.push_back(acc[d]);
            acc[d] = 0.0;
        }
        r.offset[c + 1] = r.target.size();
    }
    return r;
}

// One pass of local moving, refinement inside clusters and aggregation,
// recursing on the aggregated network.
inline void smart_local_moving(const WeightedNetwork& w, std::vector<std::uint32_t>& cl, double gamma, double total,
                               std::mt19937_64& rng) {
    local_moving(w, cl, gamma, total, rng);
    const auto k = renumber(cl);
    if (k == w.node_count()) return;
    std::vector<std::uint32_t> refined(w.node_count());
    std::iota(refined.begin(), refined.end(), 0u);
    local_moving(w, refined, gamma, total, rng, &cl);
    auto sub_count = renumber(refined);
    if (sub_count == w.node_count()) {
        refined = cl;
        sub_count = k;
    }
    const auto reduced = aggregate(w, refined, sub_count);
    std::vector<std::uint32_t> start(sub_count);
    for (NodeIndex i = 0; i < w.node_count(); ++i) start[refined[i]] = cl[i];
    smart_local_moving(reduced, start, gamma, total, rng);
    for (NodeIndex i = 0; i < w.node_count(); ++i) cl[i] = start[refined[i]];
}

} // namespace detail

/// Clusters `g` (direction ignored through the symmetrised relatedness).
/// Deterministic for a given seed. Cluster ids are 1-based, ordered by
/// size (descending) then smallest node index.
inline Partition cluster(const Digraph& g, const ClusterOptions& opt = {}) {
    if (!(opt.resolution > 0.0)) throw ContractError("resolution must be positive");
    if (opt.min_cluster_size < 1) throw ContractError("min_cluster_size must be at least 1");
    const auto n = g.node_count();
    Partition p;
    p.resolution = opt.resolution;
    p.min_cluster_size = opt.min_cluster_size;
    p.policy = opt.policy;
    if (n == 0) return p;

    const auto w = detail::symmetrize(g);
    const double total = static_cast<double>(n);
    std::vector<std::uint32_t> best(n, 0);
    double best_q = detail::network_quality(w, best, opt.resolution);
    {
        std::vector<std::uint32_t> singletons(n);
        std::iota(singletons.begin(), singletons.end(), 0u);
        const double q = detail::network_quality(w, singletons, opt.resolution);
        if (q > best_q) {
            best_q = q;
            best = singletons;
        }
    }
    for (std::uint32_t start = 0; start < std::max<std::uint32_t>(1, opt.random_starts); ++start) {
        std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32), start};
        std::mt19937_64 rng(seq);
        std::vector<std::uint32_t> cl(n);
        std::iota(cl.begin(), cl.end(), 0u);
        for (std::uint32_t it = 0; it < std::max<std::uint32_t>(1, opt.iterations); ++it) {
            detail::smart_local_moving(w, cl, opt.resolution, total, rng);
        }
        detail::local_moving(w, cl, opt.resolution, total, rng);
        detail::renumber(cl);
        const double q = detail::network_quality(w, cl, opt.resolution);
        if (q > best_q + detail::kMinGain) {
            best_q = q;
            best = cl;
        }
    }
    p.quality = quality(g, best, opt.resolution);

    // Small clusters.
    auto k = detail::renumber(best);
    std::vector<std::uint32_t> csize(k, 0);
    for (auto c : best) ++csize[c];
    constexpr auto none = std::numeric_limits<std::uint32_t>::max();
    if (opt.min_cluster_size > 1 && opt.policy == SmallClusterPolicy::merge) {
        // Repeatedly fold the smallest undersized cluster into its most related neighbour.
        std::vector<std::vector<NodeIndex>> members(k);
        for (NodeIndex i = 0; i < n; ++i) members[best[i]].push_back(i);
        std::vector<std::uint8_t> stuck(k, 0);
        while (true) {
            std::uint32_t pick = none;
            for (std::uint32_t c = 0; c < k; ++c) {
                if (csize[c] == 0 || csize[c] >= opt.min_cluster_size || stuck[c]) continue;
                if (pick == none || csize[c] < csize[pick] || (csize[c] == csize[pick] && members[c].front() < members[pick].front()))
                    pick = c;
            }
            if (pick == none) break;
            std::vector<double> link(k, 0.0);
            for (NodeIndex i : members[pick])
                for (std::size_t e = w.offset[i]; e < w.offset[i + 1]; ++e) link[best[w.target[e]]] += w.weight[e];
            std::uint32_t into = none;
            for (std::uint32_t c = 0; c < k; ++c) {
                if (c == pick || csize[c] == 0 || link[c] <= 0.0) continue;
                if (into == none || link[c] > link[into] ||
                    (link[c] == link[into] && members[c].front() < members[into].front()))
                    into = c;
            }
            if (into == none) {
                stuck[pick] = 1;
                continue;
            }
            for (NodeIndex i : members[pick]) best[i] = into;
            members[into].insert(members[into].end(), members[pick].begin(), members[pick].end());
            std::sort(members[into].begin(), members[into].end());
            members[pick].clear();
            csize[into] += csize[pick];
            csize[pick] = 0;
        }
    }
    // Number surviving clusters by size, then smallest member.
    std::vector<NodeIndex> first(k, none);
    for (NodeIndex i = 0; i < n; ++i) first[best[i]] = std::min(first[best[i]], i);
    std::vector<std::uint32_t> order;
    for (std::uint32_t c = 0; c < k; ++c)
        if (csize[c] > 0 && csize[c] >= opt.min_cluster_size) order.push_back(c);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return csize[a] != csize[b] ? csize[a] > csize[b] : first[a] < first[b];
    });
    std::vector<std::uint32_t> label(k, 0);
    for (std::uint32_t r = 0; r < order.size(); ++r) label[order[r]] = r + 1;
    p.cluster.resize(n);
    for (NodeIndex i = 0; i < n; ++i) p.cluster[i] = label[best[i]];
    p.cluster_count = static_cast<std::uint32_t>(order.size());
    return p;
}

/// Clusters the view's induced subnetwork and writes the cluster ids into
/// the group attribute. Groups of non-members are cleared.
inline std::pair<Partition, NetworkView> cluster_view(const NetworkView& view, const ClusterOptions& opt = {}) {
    const auto sub = view.subgraph();
    auto p = cluster(sub.graph, opt);
    std::vector<std::uint32_t> groups(view.network().size(), 0);
    for (NodeIndex i = 0; i < sub.to_global.size(); ++i) groups[sub.to_global[i]] = p.cluster[i];
    auto attrs = view.attributes();
    attrs.groups = std::make_shared<const std::vector<std::uint32_t>>(std::move(groups));
    return {std::move(p), view.with_attributes(std::move(attrs))};
}

// ---------------------------------------------------------------- cores

/// The k-core: the largest node set in which every node has at least k
/// citation relations (either direction) with other members. Sorted.
inline std::vector<NodeIndex> core_publications(const Digraph& g, std::uint32_t k) {
    if (k < 1) throw ContractError("k must be at least 1");
    const auto n = g.node_count();
    std::vector<std::uint32_t> degree(n);
    std::vector<std::uint8_t> removed(n, 0);
    std::vector<NodeIndex> stack;
    for (NodeIndex v = 0; v < n; ++v) {
        degree[v] = static_cast<std::uint32_t>(g.out_degree(v) + g.in_degree(v));
        if (degree[v] < k) {
            removed[v] = 1;
            stack.push_back(v);
        }
    }
    auto drop = [&](NodeIndex w) {
        if (!removed[w] && --degree[w] < k) {
            removed[w] = 1;
            stack.push_back(w);
        }
    };
    while (!stack.empty()) {
        const NodeIndex v = stack.back();
        stack.pop_back();
        for (NodeIndex w : g.out(v)) drop(w);
        for (NodeIndex w : g.in(v)) drop(w);
    }
    std::vector<NodeIndex> core;
    for (NodeIndex v = 0; v < n; ++v)
        if (!removed[v]) core.push_back(v);
    return core;
}

// ---------------------------------------------------------------- paths

enum class PathKind { shortest, longest };

inline const char* to_string(PathKind k) { return k == PathKind::shortest ? "shortest" : "longest"; }

struct PathQueryResult {
    bool reachable = false;
    std::uint32_t length = 0;                 // in edges
    std::vector<std::vector<NodeIndex>> paths; // citing end first
    std::uint64_t path_count = 0;              // all extremal paths, saturating
    bool truncated = false;                    // more than max_paths exist
};

/// Extremal directed paths from `from` (the citing end) to `to`, following
/// citation direction. Up to `max_paths` paths in lexicographic node order.
inline PathQueryResult extreme_path(const Digraph& g, NodeIndex from, NodeIndex to, PathKind kind,
                                    std::size_t max_paths = 100) {
    const auto n = g.node_count();
    if (from >= n || to >= n) throw NotFoundError("path endpoint outside the network");
    if (max_paths < 1) throw ContractError("max_paths must be at least 1");
    PathQueryResult r;
    if (from == to) {
        r.reachable = true;
        r.paths.push_back({from});
        r.path_count = 1;
        return r;
    }
    // Nodes on some from -> to path.
    auto flood = [&](NodeIndex s, bool forward) {
        std::vector<std::uint8_t> seen(n, 0);
        std::vector<NodeIndex> stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            for (NodeIndex w : forward ? g.out(v) : g.in(v))
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
        }
        return seen;
    };
    const auto down = flood(from, true);
    if (!down[to]) return r;
    const auto up = flood(to, false);
    r.reachable = true;

    // Distances from `from` and to `to` over the relevant nodes, in topological order.
    constexpr std::int64_t unset = -1;
    std::vector<std::int64_t> df(n, unset), dt(n, unset);
    std::vector<NodeIndex> order;
    {
        for (NodeIndex v : topological_order(g))
            if (down[v] && up[v]) order.push_back(v);
    }
    const bool longest = kind == PathKind::longest;
    df[from] = 0;
    for (NodeIndex v : order) {
        if (df[v] == unset) continue;
        for (NodeIndex w : g.out(v)) {
            if (!(down[w] && up[w])) continue;
            const auto cand = df[v] + 1;
            if (df[w] == unset || (longest ? cand > df[w] : cand < df[w])) df[w] = cand;
        }
    }
    dt[to] = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const NodeIndex v = *it;
        for (NodeIndex w : g.out(v)) {
            if (dt[w] == unset) continue;
            const auto cand = dt[w] + 1;
            if (dt[v] == unset || (longest ? cand > dt[v] : cand < dt[v])) dt[v] = cand;
        }
    }
    const auto len = df[to];
    r.length = static_cast<std::uint32_t>(len);
    auto on_extremal = [&](NodeIndex v, NodeIndex w) {
        return df[v] != unset && dt[w] != unset && df[v] + 1 + dt[w] == len;
    };

    // Count paths over extremal edges (saturating), then enumerate in order.
    std::vector<std::uint64_t> count(n, 0);
    count[to] = 1;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const NodeIndex v = *it;
        if (v == to) continue;
        std::uint64_t c = 0;
        for (NodeIndex w : g.out(v)) {
            if (!on_extremal(v, w)) continue;
            c = count[w] > std::numeric_limits<std::uint64_t>::max() - c ? std::numeric_limits<std::uint64_t>::max()
                                                                         : c + count[w];
        }
        count[v] = c;
    }
    r.path_count = count[from];
    r.truncated = r.path_count > max_paths;

    std::vector<NodeIndex> path{from};
    std::function<void(NodeIndex)> walk = [&](NodeIndex v) {
        if (r.paths.size() >= max_paths) return;
        if (v == to) {
            r.paths.push_back(path);
            return;
        }
        for (NodeIndex w : g.out(v)) {
            if (!on_extremal(v, w)) continue;
            path.push_back(w);
            walk(w);
            path.pop_back();
            if (r.paths.size() >= max_paths) return;
        }
    };
    walk(from);
    return r;
}

// ---------------------------------------------------------------- views

/// Components of a view, members as full-network indices; ties broken by id.
inline std::vector<std::vector<NodeIndex>> view_components(const NetworkView& view) {
    const auto sub = view.subgraph();
    const auto& net = view.network();
    auto c = connected_components(sub.graph, [&](NodeIndex a, NodeIndex b) {
        return net.publication(sub.to_global[a]).id < net.publication(sub.to_global[b]).id;
    });
    for (auto& m : c.members)
        for (auto& v : m) v = sub.to_global[v];
    return std::move(c.members);
}

inline std::vector<NodeIndex> view_core(const NetworkView& view, std::uint32_t k) {
    const auto sub = view.subgraph();
    auto core = core_publications(sub.graph, k);
    for (auto& v : core) v = sub.to_global[v];
    return core;
}

inline PathQueryResult view_path(const NetworkView& view, NodeIndex from, NodeIndex to, PathKind kind,
                                 std::size_t max_paths = 100) {
    const auto& net = view.network();
    for (NodeIndex v : {from, to}) {
        if (!view.contains(v)) {
            throw NotFoundError("publication '" + (v < net.size() ? net.publication(v).id : std::to_string(v)) +
                                "' is not in the current network");
        }
    }
    const auto sub = view.subgraph();
    auto local = [&](NodeIndex g) {
        return static_cast<NodeIndex>(std::lower_bound(sub.to_global.begin(), sub.to_global.end(), g) -
                                      sub.to_global.begin());
    };
    auto r = extreme_path(sub.graph, local(from), local(to), kind, max_paths);
    for (auto& p : r.paths)
        for (auto& v : p) v = sub.to_global[v];
    return r;
}

} // namespace citnet
