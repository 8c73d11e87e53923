#pragma once

// Synthetic corpus for the title-search workflow: search hits, largest
// component, predecessor expansion, manual removals, successor expansion.
// Membership after every step is fixed by construction, not by running
// the engine, so the manifest counts act as the oracle.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "citnet/ingest.hpp"
#include "citnet/model.hpp"

namespace citnet::testing {

struct WorkflowFixture {
    std::vector<Publication> publications;
    std::vector<RawEdge> edges;
    nlohmann::json script;
    nlohmann::json manifest;
};

struct WorkflowShape {
    std::size_t hits = 113;
    std::size_t component = 106;       // hits left in the largest component
    std::size_t classics = 33;         // cited by at least predecessor_min component members
    std::size_t predecessor_min = 10;
    std::size_t removed = 6;           // classics removed by hand
    std::size_t followers = 439;       // cite at least successor_min members
    std::size_t successor_min = 4;
    std::size_t old_noise = 200;       // cited by fewer than predecessor_min members
    std::size_t new_noise = 300;       // cite fewer than successor_min members
    std::size_t background = 400;      // unrelated literature
    std::uint64_t seed = 20140601;
};

namespace detail {

// libstdc++-independent draws so the bundled files regenerate identically.
struct Draw {
    std::mt19937_64 rng;
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng() % n); }
    std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
    std::vector<std::size_t> distinct(std::size_t k, std::size_t n) {
        std::set<std::size_t> s;
        while (s.size() < k) s.insert(below(n));
        return {s.begin(), s.end()};
    }
};

inline std::string numbered(const char* prefix, std::size_t i) {
    std::string s = std::to_string(i);
    return prefix + std::string(s.size() < 4 ? 4 - s.size() : 0, '0') + s;
}

} // namespace detail

inline WorkflowFixture generate_workflow_fixture(const WorkflowShape& shape = {}) {
    detail::Draw d{std::mt19937_64(shape.seed)};
    WorkflowFixture f;
    auto add = [&](std::string id, int year, std::string title, std::string author) {
        Publication p;
        p.id = std::move(id);
        p.year = year;
        p.title = std::move(title);
        p.first_author = std::move(author);
        p.source = "SYNTH J";
        f.publications.push_back(std::move(p));
        return f.publications.back().id;
    };
    static const char* const topics[] = {"Fast community detection in large networks",
                                         "Community structure detection by modularity",
                                         "Overlapping communities: detecting structure",
                                         "Communities and their detection in graphs",
                                         "A comparison of community detection methods"};
    static const char* const other[] = {"Graph partitioning heuristics", "Clustering of network data",
                                        "Random graph models", "Statistical mechanics of networks",
                                        "Spectral methods for graphs"};
    static const char* const surnames[] = {"NEWMAN", "GIRVAN", "FORTUNATO", "BLONDEL", "LANCICHINETTI", "ROSVALL",
                                           "PALLA", "RADICCHI", "GUIMERA", "ARENAS", "REICHARDT", "DANON"};
    auto author = [&] { return std::string(surnames[d.below(12)]) + " " + static_cast<char>('A' + d.below(26)); };

    // Search hits: the first `component` are linked into one component.
    std::vector<std::string> hit;
    for (std::size_t i = 0; i < shape.hits; ++i) {
        const int year = 2000 + static_cast<int>(i * 11 / shape.hits);
        hit.push_back(add(detail::numbered("H", i), year, std::string(topics[i % 5]) + " " + std::to_string(i), author()));
    }
    for (std::size_t i = 1; i < shape.component; ++i) {
        f.edges.push_back({hit[i], hit[d.below(i)]});
        if (i > 4 && d.below(3) == 0) {
            const auto j = d.below(i);
            if (hit[j] != f.edges.back().cited) f.edges.push_back({hit[i], hit[j]});
        }
    }
    // The rest fall outside it: two pairs and singletons.
    for (std::size_t i = shape.component; i + 1 < shape.hits && i < shape.component + 4; i += 2)
        f.edges.push_back({hit[i + 1], hit[i]});

    // Classics and sub-threshold older work, cited from the component.
    std::vector<std::string> classic, old_noise;
    for (std::size_t c = 0; c < shape.classics; ++c)
        classic.push_back(add(detail::numbered("C", c), 1970 + static_cast<int>(c % 26), other[c % 5] + std::string(" I"), author()));
    for (std::size_t c = 0; c < shape.old_noise; ++c)
        old_noise.push_back(add(detail::numbered("O", c), 1975 + static_cast<int>(c % 25), other[c % 5] + std::string(" II"), author()));
    for (const auto& c : classic)
        for (auto i : d.distinct(d.between(shape.predecessor_min, 3 * shape.predecessor_min), shape.component))
            f.edges.push_back({hit[i], c});
    for (const auto& o : old_noise)
        for (auto i : d.distinct(d.between(1, shape.predecessor_min - 1), shape.component)) f.edges.push_back({hit[i], o});
    for (std::size_t i = shape.component; i < shape.hits; ++i) f.edges.push_back({hit[i], old_noise[d.below(old_noise.size())]});

    // Members after the removals: the component plus the kept classics.
    std::vector<std::string> removed(classic.begin(), classic.begin() + static_cast<std::ptrdiff_t>(shape.removed));
    std::vector<std::string> members(hit.begin(), hit.begin() + static_cast<std::ptrdiff_t>(shape.component));
    members.insert(members.end(), classic.begin() + static_cast<std::ptrdiff_t>(shape.removed), classic.end());

    for (std::size_t k = 0; k < shape.followers; ++k) {
        const auto id = add(detail::numbered("F", k), 2011 + static_cast<int>(k % 5), other[k % 5] + std::string(" III"), author());
        for (auto i : d.distinct(d.between(shape.successor_min, 2 * shape.successor_min), members.size()))
            f.edges.push_back({id, members[i]});
    }
    for (std::size_t k = 0; k < shape.new_noise; ++k) {
        const auto id = add(detail::numbered("N", k), 2011 + static_cast<int>(k % 5), other[k % 5] + std::string(" IV"), author());
        for (auto i : d.distinct(d.between(1, shape.successor_min - 1), members.size())) f.edges.push_back({id, members[i]});
        // Citations to removed or excluded work must not count.
        for (auto i : d.distinct(d.between(0, 3), removed.size())) f.edges.push_back({id, removed[i]});
        f.edges.push_back({id, hit[shape.component + d.below(shape.hits - shape.component)]});
    }
    std::vector<std::string> background;
    for (std::size_t k = 0; k < shape.background; ++k) {
        const auto id = add(detail::numbered("B", k), 1990 + static_cast<int>(k * 25 / shape.background),
                            other[k % 5] + std::string(" V"), author());
        for (std::size_t t = 0; t < 3 && !background.empty(); ++t) f.edges.push_back({id, background[d.below(background.size())]});
        const auto& o = f.publications[shape.hits + shape.classics + d.below(old_noise.size())];
        if (d.below(4) == 0 && o.year <= f.publications.back().year) f.edges.push_back({id, o.id});
        background.push_back(id);
    }
    std::sort(f.edges.begin(), f.edges.end(), [](const RawEdge& a, const RawEdge& b) {
        return std::tie(a.citing, a.cited) < std::tie(b.citing, b.cited);
    });
    f.edges.erase(std::unique(f.edges.begin(), f.edges.end()), f.edges.end());

    if (!build_network(f.publications, f.edges).dropped.empty()) throw std::logic_error("workflow fixture drops citations");

    const std::size_t after_pred = shape.component + shape.classics;
    const std::size_t after_remove = after_pred - shape.removed;
    f.script = {{"steps",
                 {{{"op", "drill"}, {"kind", "search"}, {"pattern", "*communit* detect*"}},
                  {{"op", "component"}, {"index", 0}},
                  {{"op", "expand"}, {"add_predecessors", true}, {"min_relations", shape.predecessor_min}},
                  {{"op", "remove"}, {"ids", removed}},
                  {{"op", "expand"}, {"add_successors", true}, {"min_relations", shape.successor_min}}}}};
    f.manifest = {{"publications", f.publications.size()},
                  {"citations", f.edges.size()},
                  {"steps", {shape.hits, shape.component, after_pred, after_remove, after_remove + shape.followers}}};
    return f;
}

inline std::string workflow_publications_tsv(const WorkflowFixture& f) {
    auto net = build_network(f.publications, f.edges).network;
    std::ostringstream p, c;
    write_pair_files(p, c, *net);
    return p.str();
}

inline std::string workflow_citations_tsv(const WorkflowFixture& f) {
    auto net = build_network(f.publications, f.edges).network;
    std::ostringstream p, c;
    write_pair_files(p, c, *net);
    return c.str();
}

} // namespace citnet::testing
