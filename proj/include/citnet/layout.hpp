#pragma once

// Time-layered layout: choose the displayed publications, stack them in
// layers year by year, then place them horizontally on a grid by minimising
// sum_ij (s_ij d_ij^2 - alpha d_ij^beta) with random-walk closeness s.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "citnet/dag.hpp"
#include "citnet/error.hpp"
#include "citnet/graph.hpp"
#include "citnet/model.hpp"

namespace citnet {

struct LayoutParams {
    std::uint32_t display_count = 40;
    double alpha = 0.1;
    double beta = 0.5;
    std::uint32_t grid_points = 100;
    std::uint32_t min_separation = 5;
    std::uint32_t max_per_layer = 10;
    bool use_transitive_reduction = false;
    bool score_within_view = false; // rank by citations inside the view instead of the full network
    std::uint64_t seed = 0;
    std::uint32_t restarts = 10;
    std::uint32_t walk_steps = 3;
    double stop_probability = 0.5;

    void validate() const {
        if (display_count < 1) throw ContractError("display_count must be at least 1");
        if (min_separation < 1) throw ContractError("min_separation must be at least 1");
        if (grid_points <= min_separation) throw ContractError("grid_points must exceed min_separation");
        if (max_per_layer < 1) throw ContractError("max_per_layer must be at least 1");
        if (!(alpha > 0.0) || !(beta > 0.0)) throw ContractError("alpha and beta must be positive");
        if (!(stop_probability > 0.0) || stop_probability > 1.0) throw ContractError("stop_probability must be in (0, 1]");
        if (restarts < 1) throw ContractError("restarts must be at least 1");
    }
};

/// Score used to rank publications for display.
inline std::uint32_t display_score(const NetworkView& view, NodeIndex v, bool within_view) {
    return within_view ? view.view_internal_citations(v) : view.network().internal_citations(v);
}

/// The `count` most cited members, ties to the older publication and then
/// the smaller id. Returned in rank order.
inline std::vector<NodeIndex> display_subset(const NetworkView& view, std::size_t count, bool within_view = false) {
    if (count < 1) throw ContractError("display_count must be at least 1");
    const auto& net = view.network();
    std::vector<NodeIndex> ranked(view.members().begin(), view.members().end());
    std::vector<std::uint32_t> score(net.size(), 0);
    for (NodeIndex v : ranked) score[v] = display_score(view, v, within_view);
    auto better = [&](NodeIndex a, NodeIndex b) {
        if (score[a] != score[b]) return score[a] > score[b];
        const auto& pa = net.publication(a);
        const auto& pb = net.publication(b);
        if (pa.year != pb.year) return pa.year < pb.year;
        return pa.id < pb.id;
    };
    if (ranked.size() > count) {
        std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(count), ranked.end(), better);
        ranked.resize(count);
    } else {
        std::sort(ranked.begin(), ranked.end(), better);
    }
    return ranked;
}

struct LayerAssignment {
    std::vector<std::uint32_t> layer; // per node, 0 = top (oldest)
    std::vector<int> layer_year;      // per layer
};

/// Year-by-year layering. Within a year a publication sits one layer below
/// the lowest same-year publication it cites; levels holding more than
/// `max_per_layer` publications are split, keeping `order_key` order.
inline LayerAssignment assign_layers(const Digraph& g, std::span<const int> year, std::uint32_t max_per_layer,
                                     std::span<const NodeIndex> order_key = {}) {
    const auto n = g.node_count();
    if (year.size() != n) throw ContractError("one year per publication expected");
    if (max_per_layer < 1) throw ContractError("max_per_layer must be at least 1");
    const auto topo = topological_order(g);
    if (topo.size() != n) throw ContractError("layout requires an acyclic network");
    for (const auto& e : g.edges()) {
        if (year[e.citing] < year[e.cited]) throw ContractError("citation points forward in time");
    }
    // Level inside the year: cited nodes come later in topo order, so walk it backwards.
    std::vector<std::uint32_t> level(n, 0);
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        const NodeIndex v = *it;
        for (NodeIndex w : g.out(v))
            if (year[w] == year[v]) level[v] = std::max(level[v], level[w] + 1);
    }
    auto key = [&](NodeIndex v) { return order_key.empty() ? v : order_key[v]; };
    std::vector<NodeIndex> nodes(n);
    std::iota(nodes.begin(), nodes.end(), NodeIndex{0});
    std::sort(nodes.begin(), nodes.end(), [&](NodeIndex a, NodeIndex b) {
        if (year[a] != year[b]) return year[a] < year[b];
        if (level[a] != level[b]) return level[a] < level[b];
        return key(a) < key(b);
    });
    LayerAssignment out;
    out.layer.assign(n, 0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && year[nodes[j]] == year[nodes[i]] && level[nodes[j]] == level[nodes[i]]) ++j;
        for (std::size_t k = i; k < j; k += max_per_layer) {
            const auto id = static_cast<std::uint32_t>(out.layer_year.size());
            out.layer_year.push_back(year[nodes[i]]);
            for (std::size_t t = k; t < std::min(j, k + max_per_layer); ++t) out.layer[nodes[t]] = id;
        }
        i = j;
    }
    return out;
}

/// Dense symmetric matrix, row-major.
struct SquareMatrix {
    std::size_t n = 0;
    std::vector<double> data;

    explicit SquareMatrix(std::size_t size = 0) : n(size), data(size * size, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

/// Probability that a walk from i over undirected links, stopping after each
/// step with `stop_probability` and giving up after `steps` steps, stops at j;
/// symmetrised as (s_ij + s_ji) / 2.
inline SquareMatrix closeness(const Digraph& g, std::uint32_t steps = 3, double stop_probability = 0.5) {
    const auto n = g.node_count();
    SquareMatrix s(n);
    std::vector<double> current(n), next(n);
    for (NodeIndex i = 0; i < n; ++i) {
        if (g.out_degree(i) + g.in_degree(i) == 0) continue;
        std::fill(current.begin(), current.end(), 0.0);
        current[i] = 1.0;
        double survive = 1.0;
        for (std::uint32_t t = 1; t <= steps; ++t) {
            std::fill(next.begin(), next.end(), 0.0);
            for (NodeIndex v = 0; v < n; ++v) {
                if (current[v] == 0.0) continue;
                const auto deg = g.out_degree(v) + g.in_degree(v);
                const double share = current[v] / static_cast<double>(deg);
                for (NodeIndex w : g.out(v)) next[w] += share;
                for (NodeIndex w : g.in(v)) next[w] += share;
            }
            current.swap(next);
            for (NodeIndex j = 0; j < n; ++j) s(i, j) += survive * stop_probability * current[j];
            survive *= 1.0 - stop_probability;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (s(i, j) + s(j, i));
            s(i, j) = s(j, i) = avg;
        }
    }
    return s;
}

struct PlacementProblem {
    const SquareMatrix* s = nullptr;
    std::span<const std::uint32_t> layer;
    double alpha = 0.1;
    double beta = 0.5;
    std::uint32_t grid_points = 100;
    std::uint32_t min_separation = 5;
};

namespace detail {

struct EnergyTables {
    std::vector<double> attract; // d^2 by grid distance
    std::vector<double> repel;   // alpha d^beta, 0 at d = 0

    EnergyTables(std::uint32_t m, double alpha, double beta) : attract(m), repel(m) {
        for (std::uint32_t k = 0; k < m; ++k) {
            const double d = static_cast<double>(k) / static_cast<double>(m - 1);
            attract[k] = d * d;
            repel[k] = k == 0 ? 0.0 : alpha * std::pow(d, beta);
        }
    }
};

inline std::uint32_t gap(std::uint32_t a, std::uint32_t b) { return a > b ? a - b : b - a; }

} // namespace detail

/// sum_i sum_j (s_ij d_ij^2 - alpha d_ij^beta) with d on the grid.
inline double layout_energy(const PlacementProblem& p, std::span<const std::uint32_t> grid) {
    const detail::EnergyTables t(p.grid_points, p.alpha, p.beta);
    double e = 0.0;
    const auto n = grid.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const auto k = detail::gap(grid[i], grid[j]);
            e += (*p.s)(i, j) * t.attract[k] - t.repel[k];
        }
    return e;
}

/// Throws when some layer cannot hold its publications at the required spacing.
inline void check_feasible(const PlacementProblem& p) {
    std::map<std::uint32_t, std::size_t> occupancy;
    for (auto l : p.layer) ++occupancy[l];
    for (const auto& [l, k] : occupancy) {
        if ((k - 1) * static_cast<std::size_t>(p.min_separation) + 1 > p.grid_points) {
            throw ContractError("layer " + std::to_string(l) + " holds " + std::to_string(k) + " publications, which do not fit on " +
                                std::to_string(p.grid_points) + " grid points at separation " +
                                std::to_string(p.min_separation) + "; use more grid points or fewer publications per layer");
        }
    }
}

/// A uniformly drawn feasible assignment: per layer, sorted slots spread by
/// the separation, shuffled over the layer's publications.
inline std::vector<std::uint32_t> random_placement(const PlacementProblem& p, std::mt19937_64& rng) {
    std::map<std::uint32_t, std::vector<NodeIndex>> by_layer;
    for (NodeIndex v = 0; v < p.layer.size(); ++v) by_layer[p.layer[v]].push_back(v);
    std::vector<std::uint32_t> grid(p.layer.size(), 0);
    for (auto& [l, nodes] : by_layer) {
        const auto k = static_cast<std::uint32_t>(nodes.size());
        const std::uint32_t free = p.grid_points - (k - 1) * (p.min_separation - 1);
        std::vector<std::uint32_t> slots(free);
        std::iota(slots.begin(), slots.end(), 0u);
        std::vector<std::uint32_t> chosen;
        std::sample(slots.begin(), slots.end(), std::back_inserter(chosen), k, rng);
        std::sort(chosen.begin(), chosen.end());
        std::shuffle(nodes.begin(), nodes.end(), rng);
        for (std::uint32_t t = 0; t < k; ++t) grid[nodes[t]] = chosen[t] + t * (p.min_separation - 1);
    }
    return grid;
}

struct Placement {
    std::vector<std::uint32_t> grid; // grid index per node
    double energy = 0.0;
};

inline constexpr std::uint32_t kKicksPerRestart = 8;

/// Coordinate descent over grid points, plus layer shifts and joint moves of
/// same-layer pairs, from `restarts` seeded random starts. Each start is
/// followed by random kicks; the lowest energy wins.
inline Placement optimize_x(const PlacementProblem& p, std::uint64_t seed = 0, std::uint32_t restarts = 10) {
    const auto n = p.layer.size();
    if (!p.s || p.s->n != n) throw ContractError("closeness matrix does not match the publications");
    if (p.grid_points <= p.min_separation || p.min_separation < 1) throw ContractError("grid_points must exceed min_separation");
    check_feasible(p);
    Placement best;
    best.energy = std::numeric_limits<double>::infinity();
    if (n == 0) {
        best.energy = 0.0;
        return best;
    }
    const detail::EnergyTables t(p.grid_points, p.alpha, p.beta);
    const auto& s = *p.s;
    std::vector<std::vector<NodeIndex>> layers;
    for (NodeIndex v = 0; v < n; ++v) {
        if (p.layer[v] >= layers.size()) layers.resize(p.layer[v] + 1);
        layers[p.layer[v]].push_back(v);
    }
    const std::uint32_t m = p.grid_points;
    std::vector<double> cost(m), cost2(m);
    std::vector<std::uint8_t> blocked(m), blocked2(m);

    for (std::uint32_t r = 0; r < std::max<std::uint32_t>(1, restarts); ++r) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), r};
        std::mt19937_64 rng(seq);
        auto grid = random_placement(p, rng);
        // Cost of i at every grid point against all nodes but `skip`; points
        // too close to a same-layer node other than `skip` are blocked.
        auto scan = [&](NodeIndex i, NodeIndex skip, std::span<const NodeIndex> members, std::vector<double>& c,
                        std::vector<std::uint8_t>& blk) {
            std::fill(c.begin(), c.end(), 0.0);
            std::fill(blk.begin(), blk.end(), 0);
            for (NodeIndex j = 0; j < n; ++j) {
                if (j == i || j == skip) continue;
                const double sij = s(i, j);
                const auto xj = grid[j];
                for (std::uint32_t g = 0; g < m; ++g) {
                    const auto k = detail::gap(g, xj);
                    c[g] += sij * t.attract[k] - t.repel[k];
                }
            }
            for (NodeIndex j : members) {
                if (j == i || j == skip) continue;
                const auto lo = grid[j] >= p.min_separation - 1 ? grid[j] - (p.min_separation - 1) : 0u;
                const auto hi = std::min<std::uint32_t>(m - 1, grid[j] + p.min_separation - 1);
                for (auto g = lo; g <= hi; ++g) blk[g] = 1;
            }
        };
        auto pair_move = [&](NodeIndex i, NodeIndex j, std::span<const NodeIndex> members) {
            scan(i, j, members, cost, blocked);
            scan(j, i, members, cost2, blocked2);
            const double sij = s(i, j);
            auto total = [&](std::uint32_t gi, std::uint32_t gj) {
                const auto k = detail::gap(gi, gj);
                return cost[gi] + cost2[gj] + sij * t.attract[k] - t.repel[k];
            };
            std::uint32_t bi = grid[i], bj = grid[j];
            double best_pair = total(bi, bj);
            for (std::uint32_t gi = 0; gi < m; ++gi) {
                if (blocked[gi]) continue;
                for (std::uint32_t gj = 0; gj < m; ++gj) {
                    if (blocked2[gj] || detail::gap(gi, gj) < p.min_separation) continue;
                    const double v = total(gi, gj);
                    if (v < best_pair - 1e-12) best_pair = v, bi = gi, bj = gj;
                }
            }
            if (bi == grid[i] && bj == grid[j]) return false;
            grid[i] = bi;
            grid[j] = bj;
            return true;
        };
        auto descend = [&] {
            std::vector<NodeIndex> order(n);
            std::iota(order.begin(), order.end(), NodeIndex{0});
            bool improved = true;
            while (improved) {
                improved = false;
                std::shuffle(order.begin(), order.end(), rng);
                for (NodeIndex i : order) {
                    scan(i, i, layers[p.layer[i]], cost, blocked);
                    std::uint32_t pick = grid[i];
                    for (std::uint32_t g = 0; g < m; ++g) {
                        if (!blocked[g] && cost[g] < cost[pick] - 1e-12) pick = g;
                    }
                    if (pick != grid[i]) {
                        grid[i] = pick;
                        improved = true;
                    }
                }
                // Whole layers shifted rigidly; distances inside the layer stay the same.
                for (const auto& members : layers) {
                    if (members.empty()) continue;
                    std::uint32_t lo = m, hi = 0;
                    for (NodeIndex i : members) lo = std::min(lo, grid[i]), hi = std::max(hi, grid[i]);
                    std::vector<double> shift(m, 0.0); // indexed by new position of the leftmost node
                    for (NodeIndex i : members) {
                        std::fill(cost.begin(), cost.end(), 0.0);
                        for (NodeIndex j = 0; j < n; ++j) {
                            if (p.layer[j] == p.layer[i]) continue;
                            const double sij = s(i, j);
                            for (std::uint32_t g = 0; g < m; ++g) {
                                const auto k = detail::gap(g, grid[j]);
                                cost[g] += sij * t.attract[k] - t.repel[k];
                            }
                        }
                        for (std::uint32_t left = 0; left + (hi - lo) < m; ++left) shift[left] += cost[grid[i] - lo + left];
                    }
                    std::uint32_t pick = lo;
                    for (std::uint32_t left = 0; left + (hi - lo) < m; ++left)
                        if (shift[left] < shift[pick] - 1e-12) pick = left;
                    if (pick != lo) {
                        for (NodeIndex i : members) grid[i] = grid[i] - lo + pick;
                        improved = true;
                    }
                }
                // Same-layer pairs: best joint placement of both, which also covers swaps.
                for (const auto& members : layers)
                    for (std::size_t a = 0; a < members.size(); ++a)
                        for (std::size_t b = a + 1; b < members.size(); ++b)
                            if (pair_move(members[a], members[b], members)) improved = true;
            }
        };
        descend();
        double e = layout_energy(p, grid);
        // Kicks: move a few nodes to random free points, descend again, keep improvements.
        for (std::uint32_t kick = 0; kick < kKicksPerRestart; ++kick) {
            auto saved = grid;
            for (std::uint32_t c = 0; c < std::min<std::size_t>(3, n); ++c) {
                const auto i = static_cast<NodeIndex>(rng() % n);
                scan(i, i, layers[p.layer[i]], cost, blocked);
                std::vector<std::uint32_t> free;
                for (std::uint32_t g = 0; g < m; ++g)
                    if (!blocked[g]) free.push_back(g);
                grid[i] = free[rng() % free.size()];
            }
            descend();
            const double after = layout_energy(p, grid);
            if (after < e - 1e-12) {
                e = after;
            } else {
                grid = std::move(saved);
            }
        }
        if (e < best.energy - 1e-12) {
            best.energy = e;
            best.grid = std::move(grid);
        }
    }
    return best;
}

struct FrameNode {
    NodeIndex index = 0; // full-network index
    std::string id;
    std::string label;
    int year = 0;
    std::uint32_t layer = 0;
    std::uint32_t grid = 0;
    double x = 0.0;
    bool marked = false;
    bool selected = false;
    std::uint32_t group = 0;
    std::uint32_t score = 0;
};

struct FrameEdge {
    std::string citing;
    std::string cited;
    bool essential = true;
};

struct LayoutFrame {
    std::vector<FrameNode> nodes; // rank order of display_subset
    std::vector<FrameEdge> edges; // drawn edges
    std::vector<int> layer_year;
    std::uint32_t grid_points = 100;
    double energy = 0.0;
    bool transitive_reduction = false;
};

/// Runs display selection, layering, closeness and horizontal placement.
inline LayoutFrame compose_frame(const NetworkView& view, const LayoutParams& params = {}) {
    params.validate();
    LayoutFrame frame;
    frame.grid_points = params.grid_points;
    frame.transitive_reduction = params.use_transitive_reduction;
    if (view.member_count() == 0) return frame;
    const auto& net = view.network();
    const auto ranked = display_subset(view, params.display_count, params.score_within_view);
    std::vector<NodeIndex> sorted = ranked;
    std::sort(sorted.begin(), sorted.end());
    const auto sub = induced_subgraph(net.graph(), sorted);
    const auto n = sub.graph.node_count();

    std::vector<int> year(n);
    std::vector<NodeIndex> by_id(n);
    {
        std::vector<NodeIndex> tmp(n);
        std::iota(tmp.begin(), tmp.end(), NodeIndex{0});
        std::sort(tmp.begin(), tmp.end(), [&](NodeIndex a, NodeIndex b) {
            return net.publication(sub.to_global[a]).id < net.publication(sub.to_global[b]).id;
        });
        for (NodeIndex r = 0; r < n; ++r) by_id[tmp[r]] = r;
    }
    for (NodeIndex i = 0; i < n; ++i) year[i] = net.publication(sub.to_global[i]).year;
    const auto layers = assign_layers(sub.graph, year, params.max_per_layer, by_id);
    const auto s = closeness(sub.graph, params.walk_steps, params.stop_probability);
    PlacementProblem problem{&s, layers.layer, params.alpha, params.beta, params.grid_points, params.min_separation};
    const auto placement = optimize_x(problem, params.seed, params.restarts);
    frame.energy = placement.energy;
    frame.layer_year = layers.layer_year;

    const auto& attrs = view.attributes();
    std::vector<NodeIndex> local_of(net.size(), 0);
    for (NodeIndex i = 0; i < n; ++i) local_of[sub.to_global[i]] = i;
    for (NodeIndex v : ranked) {
        const auto i = local_of[v];
        const auto& p = net.publication(v);
        FrameNode node;
        node.index = v;
        node.id = p.id;
        node.label = label_of(p);
        node.year = p.year;
        node.layer = layers.layer[i];
        node.grid = placement.grid[i];
        node.x = static_cast<double>(node.grid) / static_cast<double>(params.grid_points - 1);
        node.marked = attrs.is_marked(v);
        node.selected = attrs.is_selected(v);
        node.group = attrs.group(v);
        node.score = display_score(view, v, params.score_within_view);
        frame.nodes.push_back(std::move(node));
    }
    const auto reduced = transitive_reduction(sub.graph);
    std::vector<IndexEdge> essential = reduced.essential;
    std::sort(essential.begin(), essential.end());
    for (const auto& e : sub.graph.edges()) {
        const bool is_essential = std::binary_search(essential.begin(), essential.end(), e);
        if (params.use_transitive_reduction && !is_essential) continue;
        frame.edges.push_back({net.publication(sub.to_global[e.citing]).id, net.publication(sub.to_global[e.cited]).id,
                               is_essential});
    }
    return frame;
}

} // namespace citnet
