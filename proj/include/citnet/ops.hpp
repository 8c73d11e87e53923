#pragma once

// JSON-described operations on an exploration session. Both the HTTP service
// and CLI scripts go through here, so a script step and an endpoint body
// have the same shape.

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "citnet/analytics.hpp"
#include "citnet/error.hpp"
#include "citnet/explore.hpp"
#include "citnet/layout.hpp"
#include "citnet/model.hpp"

namespace citnet {

using nlohmann::json;

namespace detail {

/// Strict reader over a JSON object: wrong types and unknown keys are format errors.
class Fields {
public:
    Fields(const json& j, std::string what) : j_(j), what_(std::move(what)) {
        if (!j_.is_object()) throw FormatError(what_ + ": expected a JSON object");
    }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    template <class T>
    T get(const std::string& key, T fallback) {
        used_.insert(key);
        if (!has(key)) return fallback;
        return convert<T>(j_.at(key), key);
    }

    template <class T>
    T require(const std::string& key) {
        used_.insert(key);
        if (!has(key)) throw FormatError(what_ + ": missing field '" + key + "'");
        return convert<T>(j_.at(key), key);
    }

    void ignore(const std::string& key) { used_.insert(key); }

    void done() const {
        for (const auto& [key, value] : j_.items()) {
            if (!used_.count(key)) throw FormatError(what_ + ": unknown field '" + key + "'");
        }
    }

private:
    template <class T>
    T convert(const json& v, const std::string& key) const {
        const auto bad = [&](const char* expected) {
            return FormatError(what_ + ": field '" + key + "' must be " + expected);
        };
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw bad("a boolean");
            return v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw bad("a string");
            return v.get<std::string>();
        } else if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) throw bad("a number");
            return v.get<double>();
        } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
            if (!v.is_array()) throw bad("an array of strings");
            std::vector<std::string> out;
            for (const auto& e : v) {
                if (!e.is_string()) throw bad("an array of strings");
                out.push_back(e.get<std::string>());
            }
            return out;
        } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
            if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
                throw bad("a non-negative integer");
            const auto x = v.get<std::uint64_t>();
            if (x > std::numeric_limits<T>::max()) throw bad("a smaller integer");
            return static_cast<T>(x);
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw bad("an integer");
            return static_cast<T>(v.get<std::int64_t>());
        } else {
            static_assert(sizeof(T) == 0, "unsupported field type");
        }
    }

    const json& j_;
    std::string what_;
    std::set<std::string> used_;
};

inline char lower_ascii(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

inline std::vector<NodeIndex> indices_of(const CitationNetwork& net, const std::vector<std::string>& ids) {
    std::vector<NodeIndex> out;
    out.reserve(ids.size());
    for (const auto& id : ids) out.push_back(net.index_of(id));
    return out;
}

inline json id_list(const CitationNetwork& net, std::span<const NodeIndex> v) {
    json out = json::array();
    for (NodeIndex i : v) out.push_back(net.publication(i).id);
    return out;
}

} // namespace detail

/// Whole-string match where `*` stands for any run of characters; ASCII case-insensitive.
inline bool wildcard_match(std::string_view pattern, std::string_view text) {
    std::size_t p = 0, t = 0, star = std::string_view::npos, resume = 0;
    while (t < text.size()) {
        if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            resume = t;
        } else if (p < pattern.size() && detail::lower_ascii(pattern[p]) == detail::lower_ascii(text[t])) {
            ++p;
            ++t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++resume;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

/// Members (or all publications) whose title matches, in index order.
inline std::vector<NodeIndex> search_titles(const NetworkView& view, std::string_view pattern, bool whole_network = false) {
    const auto& net = view.network();
    std::vector<NodeIndex> hits;
    if (whole_network) {
        for (NodeIndex v = 0; v < net.size(); ++v)
            if (wildcard_match(pattern, net.publication(v).title)) hits.push_back(v);
    } else {
        for (NodeIndex v : view.members())
            if (wildcard_match(pattern, net.publication(v).title)) hits.push_back(v);
    }
    return hits;
}

inline json state_json(const Session& s) {
    const auto& view = s.current();
    const auto& net = s.network();
    return {{"publications", view.member_count()},
            {"citations", view.edge_count()},
            {"network_publications", net.size()},
            {"network_citations", net.edge_count()},
            {"marked", view.attributes().marked.size()},
            {"selected", view.selected_count()},
            {"selected_citations", view.selected_edge_count()},
            {"full", view.is_full()},
            {"history", {{"cursor", s.cursor()},
                         {"size", s.history_size()},
                         {"can_go_back", s.can_go_back()},
                         {"can_go_forward", s.can_go_forward()}}}};
}

inline json publication_summary(const CitationNetwork& net, NodeIndex v) {
    const auto& p = net.publication(v);
    return {{"id", p.id}, {"label", label_of(p)}, {"year", p.year}, {"title", p.title}, {"citations", net.internal_citations(v)}};
}

inline json publication_details(const NetworkView& view, NodeIndex v) {
    const auto& net = view.network();
    const auto& p = net.publication(v);
    json authors = json::array({p.first_author});
    for (const auto& a : p.co_authors) authors.push_back(a);
    const auto group = view.attributes().group(v);
    return {{"id", p.id},
            {"label", label_of(p)},
            {"authors", authors},
            {"title", p.title},
            {"source", p.source},
            {"year", p.year},
            {"volume", p.volume},
            {"begin_page", p.begin_page},
            {"doi", p.doi ? json(*p.doi) : json(nullptr)},
            {"complete_record", p.complete_record},
            {"internal_citations", net.internal_citations(v)},
            {"external_citations", p.external_citations_known ? json(p.external_citations) : json(nullptr)},
            {"member", view.contains(v)},
            {"marked", view.attributes().is_marked(v)},
            {"selected", view.attributes().is_selected(v)},
            {"group", group == 0 ? json(nullptr) : json(group)}};
}

inline ExpansionSpec expansion_from_json(const json& j) {
    detail::Fields f(j, "expand");
    f.ignore("op");
    ExpansionSpec s;
    s.add_predecessors = f.get("add_predecessors", false);
    s.add_successors = f.get("add_successors", false);
    s.add_intermediates = f.get("add_intermediates", false);
    s.min_relations = f.get<std::uint32_t>("min_relations", 1);
    f.done();
    return s;
}

inline ClusterOptions cluster_options_from_json(const json& j) {
    detail::Fields f(j, "cluster");
    f.ignore("op");
    ClusterOptions o;
    o.resolution = f.get("resolution", o.resolution);
    o.min_cluster_size = f.get("min_cluster_size", o.min_cluster_size);
    const auto policy = f.get<std::string>("policy", "discard");
    if (policy == "discard") o.policy = SmallClusterPolicy::discard;
    else if (policy == "merge") o.policy = SmallClusterPolicy::merge;
    else throw FormatError("cluster: policy must be 'discard' or 'merge'");
    o.seed = f.get("seed", o.seed);
    o.random_starts = f.get("random_starts", o.random_starts);
    o.iterations = f.get("iterations", o.iterations);
    f.done();
    return o;
}

inline LayoutParams layout_params_from_json(const json& j) {
    detail::Fields f(j, "layout");
    f.ignore("op");
    LayoutParams p;
    p.display_count = f.get("display_count", p.display_count);
    p.alpha = f.get("alpha", p.alpha);
    p.beta = f.get("beta", p.beta);
    p.grid_points = f.get("grid_points", p.grid_points);
    p.min_separation = f.get("min_separation", p.min_separation);
    p.max_per_layer = f.get("max_per_layer", p.max_per_layer);
    p.use_transitive_reduction = f.get("use_transitive_reduction", p.use_transitive_reduction);
    p.score_within_view = f.get("score_within_view", p.score_within_view);
    p.seed = f.get("seed", p.seed);
    p.restarts = f.get("restarts", p.restarts);
    p.walk_steps = f.get("walk_steps", p.walk_steps);
    p.stop_probability = f.get("stop_probability", p.stop_probability);
    f.done();
    return p;
}

inline json layout_params_to_json(const LayoutParams& p) {
    return {{"display_count", p.display_count},
            {"alpha", p.alpha},
            {"beta", p.beta},
            {"grid_points", p.grid_points},
            {"min_separation", p.min_separation},
            {"max_per_layer", p.max_per_layer},
            {"use_transitive_reduction", p.use_transitive_reduction},
            {"score_within_view", p.score_within_view},
            {"seed", p.seed},
            {"restarts", p.restarts},
            {"walk_steps", p.walk_steps},
            {"stop_probability", p.stop_probability}};
}

inline json partition_json(const Partition& p) {
    std::vector<std::size_t> sizes(p.cluster_count, 0);
    std::size_t unassigned = 0;
    for (auto c : p.cluster) {
        if (c == 0) ++unassigned;
        else ++sizes[c - 1];
    }
    return {{"clusters", p.cluster_count},
            {"quality", p.quality},
            {"resolution", p.resolution},
            {"min_cluster_size", p.min_cluster_size},
            {"policy", to_string(p.policy)},
            {"sizes", sizes},
            {"unassigned", unassigned}};
}

inline json path_json(const CitationNetwork& net, const PathQueryResult& r, PathKind kind) {
    json paths = json::array();
    for (const auto& p : r.paths) paths.push_back(detail::id_list(net, p));
    return {{"kind", to_string(kind)},
            {"reachable", r.reachable},
            {"length", r.reachable ? json(r.length) : json(nullptr)},
            {"path_count", r.path_count},
            {"truncated", r.truncated},
            {"paths", paths}};
}

namespace detail {

// ---- read-only operations

inline json op_search(const Session& s, const json& args) {
    Fields f(args, "search");
    f.ignore("op");
    const auto pattern = f.require<std::string>("pattern");
    const auto scope = f.get<std::string>("scope", "view");
    if (scope != "view" && scope != "network") throw FormatError("search: scope must be 'view' or 'network'");
    const auto offset = f.get<std::size_t>("offset", 0);
    const auto limit = f.get<std::size_t>("limit", 100);
    f.done();
    const auto hits = search_titles(s.current(), pattern, scope == "network");
    json out{{"pattern", pattern}, {"scope", scope}, {"total", hits.size()}, {"hits", json::array()}};
    for (std::size_t i = offset; i < hits.size() && i < offset + limit; ++i)
        out["hits"].push_back(publication_summary(s.network(), hits[i]));
    return out;
}

inline json op_details(const Session& s, const json& args) {
    Fields f(args, "details");
    f.ignore("op");
    const auto id = f.require<std::string>("id");
    f.done();
    return publication_details(s.current(), s.network().index_of(id));
}

inline json op_components(const Session& s, const json& args) {
    Fields f(args, "components");
    f.ignore("op");
    const auto limit = f.get<std::size_t>("limit", 20);
    f.done();
    const auto comps = view_components(s.current());
    json list = json::array();
    for (std::size_t i = 0; i < comps.size() && i < limit; ++i)
        list.push_back({{"index", i}, {"size", comps[i].size()}, {"ids", id_list(s.network(), comps[i])}});
    return {{"count", comps.size()}, {"components", list}};
}

inline json op_path(const Session& s, const json& args) {
    Fields f(args, "path");
    f.ignore("op");
    const auto from = f.require<std::string>("from");
    const auto to = f.require<std::string>("to");
    const auto kind_name = f.get<std::string>("kind", "shortest");
    const auto max_paths = f.get<std::size_t>("max_paths", 100);
    f.done();
    PathKind kind;
    if (kind_name == "shortest") kind = PathKind::shortest;
    else if (kind_name == "longest") kind = PathKind::longest;
    else throw FormatError("path: kind must be 'shortest' or 'longest'");
    const auto& net = s.network();
    return path_json(net, view_path(s.current(), net.index_of(from), net.index_of(to), kind, max_paths), kind);
}

// ---- mutations

inline json op_mark(Session& s, const json& args, bool selecting) {
    const char* what = selecting ? "select" : "mark";
    Fields f(args, what);
    f.ignore("op");
    const bool clear = f.get("clear", false);
    const bool on = f.get(selecting ? "selected" : "marked", true);
    std::vector<std::string> ids;
    if (f.has("ids")) ids = f.require<std::vector<std::string>>("ids");
    else f.ignore("ids");
    std::optional<SelectionSpec> spec;
    if (selecting && f.has("kind")) {
        const auto kind = f.require<std::string>("kind");
        if (kind == "marked") {
            MarkedSelection m;
            m.include_predecessors = f.get("include_predecessors", false);
            m.include_successors = f.get("include_successors", false);
            m.include_intermediates = f.get("include_intermediates", false);
            m.min_relations = f.get<std::uint32_t>("min_relations", 1);
            spec = m;
        } else if (kind == "period") {
            spec = PeriodSelection{f.require<int>("year_min"), f.require<int>("year_max")};
        } else if (kind == "group") {
            spec = GroupSelection{f.require<std::uint32_t>("group")};
        } else {
            throw FormatError("select: kind must be 'marked', 'period' or 'group'");
        }
    }
    f.done();
    const auto& view = s.current();
    const auto& net = s.network();
    auto attrs = view.attributes();
    auto& set = selecting ? attrs.selected : attrs.marked;
    std::size_t changed = 0;
    if (clear) {
        changed += set.size();
        set.clear();
    }
    std::vector<AttributeChange> changes;
    if (spec) {
        // A selection spec replaces the selected set.
        const auto resolved = resolve_selection(view, *spec);
        changed += resolved.size();
        set = resolved;
    }
    for (const auto& id : ids) {
        AttributeChange c;
        c.id = id;
        (selecting ? c.selected : c.marked) = on;
        changes.push_back(std::move(c));
    }
    for (const auto& id : ids) net.index_of(id); // unknown ids are 404, not 409
    auto next = update_attributes(view.with_attributes(std::move(attrs)), changes);
    changed += changes.size();
    s.replace_current(std::move(next));
    return {{selecting ? "selected" : "marked", selecting ? s.current().selected_count() : s.current().attributes().marked.size()},
            {"changes", changed}};
}

inline json op_drill(Session& s, const json& args) {
    Fields f(args, "drill");
    f.ignore("op");
    const auto kind = f.get<std::string>("kind", "marked");
    const auto& view = s.current();
    if (kind == "marked") {
        MarkedSelection m;
        m.include_predecessors = f.get("include_predecessors", false);
        m.include_successors = f.get("include_successors", false);
        m.include_intermediates = f.get("include_intermediates", false);
        m.min_relations = f.get<std::uint32_t>("min_relations", 1);
        f.done();
        s.drill_down(m);
    } else if (kind == "period") {
        PeriodSelection p{f.require<int>("year_min"), f.require<int>("year_max")};
        f.done();
        s.drill_down(p);
    } else if (kind == "group") {
        GroupSelection g{f.require<std::uint32_t>("group")};
        f.done();
        s.drill_down(g);
    } else if (kind == "selected") {
        f.done();
        if (view.attributes().selected.empty()) throw PreconditionError("no publications are selected in the current network");
        s.restrict_to(view.attributes().selected);
    } else if (kind == "ids") {
        const auto ids = f.require<std::vector<std::string>>("ids");
        f.done();
        auto members = indices_of(s.network(), ids);
        for (NodeIndex v : members)
            if (!view.contains(v))
                throw PreconditionError("publication '" + s.network().publication(v).id + "' is not a member of the current network");
        s.restrict_to(std::move(members));
    } else if (kind == "search") {
        const auto pattern = f.require<std::string>("pattern");
        f.done();
        auto hits = search_titles(view, pattern);
        if (hits.empty()) throw PreconditionError("no publication title matches '" + pattern + "'");
        s.restrict_to(std::move(hits));
    } else {
        throw FormatError("drill: kind must be one of marked, period, group, selected, ids, search");
    }
    return json::object();
}

inline json op_component(Session& s, const json& args) {
    Fields f(args, "component");
    f.ignore("op");
    const auto index = f.get<std::size_t>("index", 0);
    f.done();
    auto comps = view_components(s.current());
    if (index >= comps.size())
        throw NotFoundError("component " + std::to_string(index) + " does not exist; the network has " +
                            std::to_string(comps.size()));
    const auto size = comps[index].size();
    s.restrict_to(std::move(comps[index]));
    return {{"index", index}, {"size", size}};
}

inline json op_expand(Session& s, const json& args) {
    s.expand(expansion_from_json(args));
    return json::object();
}

inline json op_remove(Session& s, const json& args) {
    Fields f(args, "remove");
    f.ignore("op");
    const auto ids = f.require<std::vector<std::string>>("ids");
    f.done();
    const auto drop = indices_of(s.network(), ids);
    s.remove_members(drop);
    return {{"removed", drop.size()}};
}

inline json op_cluster(Session& s, const json& args) {
    auto [partition, view] = cluster_view(s.current(), cluster_options_from_json(args));
    s.replace_current(std::move(view));
    return partition_json(partition);
}

inline json op_cores(Session& s, const json& args) {
    Fields f(args, "cores");
    f.ignore("op");
    const auto k = f.require<std::uint32_t>("k");
    const auto action = f.get<std::string>("action", "drill");
    f.done();
    if (action != "drill" && action != "select" && action != "none")
        throw FormatError("cores: action must be 'drill', 'select' or 'none'");
    auto core = view_core(s.current(), k);
    const auto count = core.size();
    json out{{"k", k}, {"count", count}};
    if (action == "drill") {
        if (core.empty()) throw PreconditionError("the " + std::to_string(k) + "-core is empty");
        s.restrict_to(std::move(core));
    } else if (action == "select") {
        auto attrs = s.current().attributes();
        attrs.selected = std::move(core);
        s.replace_current(s.current().with_attributes(std::move(attrs)));
    } else {
        out["ids"] = id_list(s.network(), core);
    }
    return out;
}

inline json op_navigate(Session& s, const json& args, bool back) {
    Fields f(args, back ? "back" : "forward");
    f.ignore("op");
    f.done();
    return {{"moved", (back ? s.back() : s.forward()) == Navigation::moved}};
}

} // namespace detail

inline bool is_read_op(std::string_view op) {
    return op == "state" || op == "search" || op == "details" || op == "components" || op == "path";
}

inline bool is_write_op(std::string_view op) {
    return op == "mark" || op == "select" || op == "drill" || op == "component" || op == "expand" || op == "remove" ||
           op == "cluster" || op == "cores" || op == "back" || op == "forward";
}

inline json read_op(const Session& s, std::string_view op, const json& args) {
    if (op == "state") {
        detail::Fields f(args, "state");
        f.ignore("op");
        f.done();
        return json::object();
    }
    if (op == "search") return detail::op_search(s, args);
    if (op == "details") return detail::op_details(s, args);
    if (op == "components") return detail::op_components(s, args);
    if (op == "path") return detail::op_path(s, args);
    throw NotFoundError("unknown operation '" + std::string(op) + "'");
}

inline json write_op(Session& s, std::string_view op, const json& args) {
    if (op == "mark") return detail::op_mark(s, args, false);
    if (op == "select") return detail::op_mark(s, args, true);
    if (op == "drill") return detail::op_drill(s, args);
    if (op == "component") return detail::op_component(s, args);
    if (op == "expand") return detail::op_expand(s, args);
    if (op == "remove") return detail::op_remove(s, args);
    if (op == "cluster") return detail::op_cluster(s, args);
    if (op == "cores") return detail::op_cores(s, args);
    if (op == "back") return detail::op_navigate(s, args, true);
    if (op == "forward") return detail::op_navigate(s, args, false);
    throw NotFoundError("unknown operation '" + std::string(op) + "'");
}

/// Runs one step and returns {"op", "result", "state"}.
inline json run_step(Session& s, const json& step) {
    if (!step.is_object() || !step.contains("op") || !step.at("op").is_string())
        throw FormatError("every step needs a string field 'op'");
    const auto op = step.at("op").get<std::string>();
    json result = is_read_op(op) ? read_op(s, op, step) : write_op(s, op, step);
    return {{"op", op}, {"result", std::move(result)}, {"state", state_json(s)}};
}

/// A script is {"steps": [...]} or a bare array of steps. Stops at the first error.
inline json run_script(Session& s, const json& script) {
    const json* steps = &script;
    if (script.is_object()) {
        detail::Fields f(script, "script");
        f.ignore("steps");
        f.done();
        if (!script.contains("steps")) throw FormatError("script: missing field 'steps'");
        steps = &script.at("steps");
    }
    if (!steps->is_array()) throw FormatError("script: steps must be an array");
    json out = json::array();
    for (const auto& step : *steps) out.push_back(run_step(s, step));
    return out;
}

} // namespace citnet
