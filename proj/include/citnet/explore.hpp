#pragma once

// Drill down and expansion over views of a citation network, plus the
// back/forward history of a session.

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "citnet/error.hpp"
#include "citnet/graph.hpp"
#include "citnet/model.hpp"

namespace citnet {

namespace detail {

// Flags for `set`; duplicates in `set` are ignored by callers through the mask.
inline std::vector<std::uint8_t> mask_of(std::size_t n, std::span<const NodeIndex> set) {
    std::vector<std::uint8_t> mask(n, 0);
    for (NodeIndex v : set) {
        if (v >= n) throw ContractError("publication index " + std::to_string(v) + " outside the network");
        mask[v] = 1;
    }
    return mask;
}

inline bool in_scope(std::span<const std::uint8_t> scope, NodeIndex v) { return scope.empty() || scope[v]; }

// Non-anchor nodes in scope linked to at least `min_relations` anchors.
// `cited_side` counts anchors citing the candidate, otherwise anchors cited by it.
inline std::vector<NodeIndex> linked_outside(const Digraph& g, std::span<const NodeIndex> anchors,
                                             std::uint32_t min_relations, bool cited_side,
                                             std::span<const std::uint8_t> scope) {
    if (anchors.empty()) throw PreconditionError("the member set is empty");
    if (min_relations < 1) throw ContractError("min_relations must be at least 1");
    const auto n = g.node_count();
    if (!scope.empty() && scope.size() != n) throw ContractError("scope mask has the wrong size");
    auto anchor = mask_of(n, anchors);
    std::vector<std::uint32_t> count(n, 0);
    std::vector<NodeIndex> touched;
    std::vector<std::uint8_t> done(n, 0);
    for (NodeIndex a : anchors) {
        if (done[a]) continue;
        done[a] = 1;
        for (NodeIndex t : cited_side ? g.out(a) : g.in(a)) {
            if (anchor[t] || !in_scope(scope, t)) continue;
            if (count[t]++ == 0) touched.push_back(t);
        }
    }
    std::vector<NodeIndex> result;
    for (NodeIndex t : touched)
        if (count[t] >= min_relations) result.push_back(t);
    std::sort(result.begin(), result.end());
    return result;
}

inline std::vector<std::uint8_t> reach(const Digraph& g, std::span<const NodeIndex> from, bool forward,
                                       std::span<const std::uint8_t> scope) {
    std::vector<std::uint8_t> seen(g.node_count(), 0);
    std::vector<NodeIndex> stack;
    for (NodeIndex a : from) {
        if (!seen[a]) {
            seen[a] = 1;
            stack.push_back(a);
        }
    }
    while (!stack.empty()) {
        const NodeIndex v = stack.back();
        stack.pop_back();
        for (NodeIndex w : forward ? g.out(v) : g.in(v)) {
            if (seen[w] || !in_scope(scope, w)) continue;
            seen[w] = 1;
            stack.push_back(w);
        }
    }
    return seen;
}

} // namespace detail

/// Outside publications cited by at least `min_relations` members. An empty
/// `scope` means the whole network; otherwise only flagged nodes qualify.
inline std::vector<NodeIndex> predecessors(const Digraph& g, std::span<const NodeIndex> members,
                                           std::uint32_t min_relations = 1,
                                           std::span<const std::uint8_t> scope = {}) {
    return detail::linked_outside(g, members, min_relations, true, scope);
}

/// Outside publications citing at least `min_relations` members.
inline std::vector<NodeIndex> successors(const Digraph& g, std::span<const NodeIndex> members,
                                         std::uint32_t min_relations = 1, std::span<const std::uint8_t> scope = {}) {
    return detail::linked_outside(g, members, min_relations, false, scope);
}

/// Non-anchors on a directed path between two anchors: reachable from some
/// anchor and reaching some anchor, walking only through `scope`.
inline std::vector<NodeIndex> intermediates(const Digraph& g, std::span<const NodeIndex> anchors,
                                            std::span<const std::uint8_t> scope = {}) {
    if (anchors.empty()) return {};
    if (!scope.empty() && scope.size() != g.node_count()) throw ContractError("scope mask has the wrong size");
    const auto anchor = detail::mask_of(g.node_count(), anchors);
    const auto down = detail::reach(g, anchors, true, scope);
    const auto up = detail::reach(g, anchors, false, scope);
    std::vector<NodeIndex> result;
    for (NodeIndex v = 0; v < g.node_count(); ++v)
        if (down[v] && up[v] && !anchor[v]) result.push_back(v);
    return result;
}

struct PeriodSelection {
    int year_min = 0;
    int year_max = 0;
};

struct GroupSelection {
    std::uint32_t group = 1;
};

struct MarkedSelection {
    bool include_predecessors = false;
    bool include_successors = false;
    bool include_intermediates = false;
    std::uint32_t min_relations = 1;
};

using SelectionSpec = std::variant<MarkedSelection, PeriodSelection, GroupSelection>;

struct ExpansionSpec {
    bool add_predecessors = false;
    bool add_successors = false;
    bool add_intermediates = false;
    std::uint32_t min_relations = 1;
};

namespace detail {

inline std::vector<NodeIndex> merge_sorted(std::vector<NodeIndex> a, std::span<const NodeIndex> b) {
    std::vector<NodeIndex> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

} // namespace detail

/// The publications a drill down would keep, sorted. Pure.
inline std::vector<NodeIndex> resolve_selection(const NetworkView& view, const SelectionSpec& spec) {
    const auto& net = view.network();
    std::vector<NodeIndex> out;
    if (const auto* p = std::get_if<PeriodSelection>(&spec)) {
        if (p->year_min > p->year_max) throw ContractError("year_min is after year_max");
        for (NodeIndex m : view.members()) {
            const int y = net.publication(m).year;
            if (y >= p->year_min && y <= p->year_max) out.push_back(m);
        }
    } else if (const auto* gsel = std::get_if<GroupSelection>(&spec)) {
        if (gsel->group == 0) throw ContractError("group numbers start at 1");
        for (NodeIndex m : view.members())
            if (view.attributes().group(m) == gsel->group) out.push_back(m);
    } else {
        const auto& mk = std::get<MarkedSelection>(spec);
        if (mk.min_relations < 1) throw ContractError("min_relations must be at least 1");
        const auto& marked = view.attributes().marked;
        if (marked.empty()) throw PreconditionError("no publications are marked in the current network");
        const auto scope = view.membership();
        out = marked;
        if (mk.include_predecessors) out = detail::merge_sorted(std::move(out), predecessors(net.graph(), marked, mk.min_relations, scope));
        if (mk.include_successors) out = detail::merge_sorted(std::move(out), successors(net.graph(), marked, mk.min_relations, scope));
        if (mk.include_intermediates) out = detail::merge_sorted(std::move(out), intermediates(net.graph(), marked, scope));
    }
    return out;
}

/// Members after an expansion, sorted. Pure.
inline std::vector<NodeIndex> resolve_expansion(const NetworkView& view, const ExpansionSpec& spec) {
    if (!spec.add_predecessors && !spec.add_successors && !spec.add_intermediates) {
        throw ContractError("an expansion needs predecessors, successors or intermediates");
    }
    if (spec.min_relations < 1) throw ContractError("min_relations must be at least 1");
    const auto& g = view.network().graph();
    const auto members = view.members();
    std::vector<NodeIndex> out(members.begin(), members.end());
    if (view.is_full()) return out;
    if (spec.add_predecessors) out = detail::merge_sorted(std::move(out), predecessors(g, members, spec.min_relations));
    if (spec.add_successors) out = detail::merge_sorted(std::move(out), successors(g, members, spec.min_relations));
    if (spec.add_intermediates) {
        const auto extra = intermediates(g, out);
        out = detail::merge_sorted(std::move(out), extra);
    }
    return out;
}

enum class Navigation { moved, at_boundary };

/// Views of one full network with browser-style back/forward navigation.
/// A new drill down or expansion discards the forward tail.
class Session {
public:
    explicit Session(NetworkPtr network) : network_(std::move(network)) { history_.emplace_back(network_); }

    const NetworkPtr& network_ptr() const noexcept { return network_; }
    const CitationNetwork& network() const { return *network_; }
    const NetworkView& current() const { return history_[cursor_]; }
    std::size_t cursor() const noexcept { return cursor_; }
    std::size_t history_size() const noexcept { return history_.size(); }
    const NetworkView& at(std::size_t i) const { return history_.at(i); }
    bool can_go_back() const noexcept { return cursor_ > 0; }
    bool can_go_forward() const noexcept { return cursor_ + 1 < history_.size(); }

    /// Keeps the selected publications. Marks and selection flags are cleared,
    /// groups carry over. An empty selection leaves the history untouched.
    const NetworkView& drill_down(const SelectionSpec& spec) {
        auto members = resolve_selection(current(), spec);
        if (members.empty()) throw PreconditionError("the selection contains no publications");
        return restrict_to(std::move(members));
    }

    /// Adds linked outside publications. Attributes carry over.
    const NetworkView& expand(const ExpansionSpec& spec) {
        auto members = resolve_expansion(current(), spec);
        return push(NetworkView(network_, std::move(members), current().attributes()));
    }

    /// Drops the given publications from the current network.
    const NetworkView& remove_members(std::span<const NodeIndex> drop) {
        const auto& view = current();
        for (NodeIndex v : drop) {
            if (!view.contains(v)) {
                throw PreconditionError("publication '" + (v < network_->size() ? network_->publication(v).id : std::to_string(v)) +
                                        "' is not a member of the current network");
            }
        }
        const auto mask = detail::mask_of(network_->size(), drop);
        std::vector<NodeIndex> keep;
        for (NodeIndex m : view.members())
            if (!mask[m]) keep.push_back(m);
        if (keep.empty()) throw PreconditionError("removing these publications would leave the network empty");
        auto attrs = view.attributes();
        std::erase_if(attrs.marked, [&](NodeIndex v) { return mask[v] != 0; });
        std::erase_if(attrs.selected, [&](NodeIndex v) { return mask[v] != 0; });
        return push(NetworkView(network_, std::move(keep), std::move(attrs)));
    }

    /// Drill down to an explicit member subset (e.g. one connected component).
    const NetworkView& restrict_to(std::vector<NodeIndex> members) {
        const auto& view = current();
        for (NodeIndex v : members) {
            if (!view.contains(v)) throw PreconditionError("restriction includes a non-member publication");
        }
        if (members.empty()) throw PreconditionError("the selection contains no publications");
        AttributeState attrs;
        attrs.groups = view.attributes().groups;
        return push(NetworkView(network_, std::move(members), std::move(attrs)));
    }

    /// Replaces the current snapshot in place (attribute edits are not history steps).
    void replace_current(NetworkView view) {
        if (view.network_ptr() != network_) throw ContractError("view belongs to another network");
        history_[cursor_] = std::move(view);
    }

    Navigation back() {
        if (!can_go_back()) return Navigation::at_boundary;
        --cursor_;
        return Navigation::moved;
    }

    Navigation forward() {
        if (!can_go_forward()) return Navigation::at_boundary;
        ++cursor_;
        return Navigation::moved;
    }

    /// Rebuilds a session from stored snapshots (used when loading archives).
    static Session restore(NetworkPtr network, std::vector<NetworkView> history, std::size_t cursor) {
        if (history.empty() || cursor >= history.size()) throw FormatError("history cursor out of range");
        Session s(std::move(network));
        s.history_ = std::move(history);
        s.cursor_ = cursor;
        return s;
    }

private:
    const NetworkView& push(NetworkView view) {
        history_.erase(history_.begin() + static_cast<std::ptrdiff_t>(cursor_) + 1, history_.end());
        history_.push_back(std::move(view));
        cursor_ = history_.size() - 1;
        return history_.back();
    }

    NetworkPtr network_;
    std::vector<NetworkView> history_;
    std::size_t cursor_ = 0;
};

} // namespace citnet
