#include "citnet/layout.hpp"
#include "citnet/render.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "support/generators.hpp"
#include "support/layout_oracles.hpp"

namespace citnet {
namespace {

NetworkPtr named(std::vector<std::pair<std::string, int>> pubs, std::vector<RawEdge> edges) {
    std::vector<Publication> ps;
    for (auto& [id, year] : pubs) {
        Publication p;
        p.id = id;
        p.year = year;
        p.first_author = id + " X";
        ps.push_back(p);
    }
    return build_network(std::move(ps), edges).network;
}

std::vector<std::vector<double>> dense(const SquareMatrix& s) {
    std::vector<std::vector<double>> out(s.n, std::vector<double>(s.n));
    for (std::size_t i = 0; i < s.n; ++i)
        for (std::size_t j = 0; j < s.n; ++j) out[i][j] = s(i, j);
    return out;
}

// ---- display selection ----

TEST(DisplaySubset, SmallViewShowsEverything) {
    auto net = named({{"A", 2000}, {"B", 2001}, {"C", 2002}}, {{"B", "A"}, {"C", "A"}});
    const auto shown = display_subset(NetworkView(net), 40);
    ASSERT_EQ(shown.size(), 3u);
    EXPECT_EQ(net->publication(shown[0]).id, "A");
}

TEST(DisplaySubset, TiesGoToOlderPublication) {
    // A and B both cited 3 times, A is older; C cited once.
    auto net = named({{"A", 1990}, {"B", 1995}, {"C", 1980}, {"D1", 2000}, {"D2", 2001}, {"D3", 2002}},
                     {{"D1", "A"}, {"D2", "A"}, {"D3", "A"}, {"D1", "B"}, {"D2", "B"}, {"D3", "B"}, {"D1", "C"}});
    const auto shown = display_subset(NetworkView(net), 2);
    ASSERT_EQ(shown.size(), 2u);
    EXPECT_EQ(net->publication(shown[0]).id, "A");
    EXPECT_EQ(net->publication(shown[1]).id, "B");
}

TEST(DisplaySubset, MatchesSortOracle) {
    std::mt19937_64 rng(11);
    auto net = testing::random_network(1000, 0.01, rng);
    const NetworkView view(net);
    const auto shown = display_subset(view, 70);
    std::vector<NodeIndex> all(net->size());
    std::iota(all.begin(), all.end(), NodeIndex{0});
    std::stable_sort(all.begin(), all.end(), [&](NodeIndex a, NodeIndex b) {
        const auto ca = net->graph().in_degree(a), cb = net->graph().in_degree(b);
        if (ca != cb) return ca > cb;
        if (net->publication(a).year != net->publication(b).year)
            return net->publication(a).year < net->publication(b).year;
        return net->publication(a).id < net->publication(b).id;
    });
    all.resize(70);
    EXPECT_EQ(shown, all);
}

TEST(DisplaySubset, WithinViewScoresCountOnlyMembers) {
    auto net = named({{"A", 1990}, {"B", 1991}, {"X1", 2000}, {"X2", 2000}, {"Y", 2000}},
                     {{"X1", "A"}, {"X2", "A"}, {"Y", "B"}});
    std::vector<NodeIndex> members{net->index_of("A"), net->index_of("B"), net->index_of("Y")};
    std::sort(members.begin(), members.end());
    const NetworkView view(net, members, {});
    EXPECT_EQ(net->publication(display_subset(view, 1, false)[0]).id, "A");
    EXPECT_EQ(net->publication(display_subset(view, 1, true)[0]).id, "B");
}

// ---- layers ----

TEST(AssignLayers, SameYearWithoutLinksShareALayer) {
    Digraph g(3, std::vector<IndexEdge>{});
    const std::vector<int> year{2000, 2000, 2000};
    const auto a = assign_layers(g, year, 10);
    EXPECT_EQ(a.layer, (std::vector<std::uint32_t>{0, 0, 0}));
    EXPECT_EQ(a.layer_year, std::vector<int>{2000});
}

TEST(AssignLayers, CapacitySplitsLayer) {
    Digraph g(12, std::vector<IndexEdge>{});
    const std::vector<int> year(12, 2000);
    const auto a = assign_layers(g, year, 10);
    ASSERT_EQ(a.layer_year.size(), 2u);
    EXPECT_EQ(std::count(a.layer.begin(), a.layer.end(), 0u), 10);
    EXPECT_EQ(std::count(a.layer.begin(), a.layer.end(), 1u), 2);
}

TEST(AssignLayers, SameYearChainStacks) {
    // 2 cites 1 cites 0, all in one year.
    Digraph g(3, std::vector<IndexEdge>{{2, 1}, {1, 0}});
    const std::vector<int> year{2005, 2005, 2005};
    const auto a = assign_layers(g, year, 10);
    EXPECT_EQ(a.layer, (std::vector<std::uint32_t>{0, 1, 2}));
}

TEST(AssignLayers, YearsOrderTopToBottom) {
    Digraph g(3, std::vector<IndexEdge>{{0, 2}});
    const std::vector<int> year{2010, 1990, 2000};
    const auto a = assign_layers(g, year, 10);
    EXPECT_EQ(a.layer_year, (std::vector<int>{1990, 2000, 2010}));
    EXPECT_EQ(a.layer, (std::vector<std::uint32_t>{2, 0, 1}));
}

TEST(AssignLayers, ForwardCitationRejected) {
    Digraph g(2, std::vector<IndexEdge>{{0, 1}});
    const std::vector<int> year{2000, 2001};
    EXPECT_THROW(assign_layers(g, year, 10), ContractError);
}

TEST(AssignLayers, MinimalWithinYearWhenUncapped) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + trial % 6;
        const auto edges = testing::random_dag_edges(n, 0.4, rng);
        Digraph g(n, edges);
        const std::vector<int> year(n, 2000);
        const auto a = assign_layers(g, year, 100);
        for (const auto& e : edges) EXPECT_GT(a.layer[e.citing], a.layer[e.cited]);
        EXPECT_EQ(a.layer_year.size(), oracle::min_layers(n, edges, n)) << "trial " << trial;
    }
}

TEST(AssignLayers, CapacityAlwaysHonoured) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 40;
        const auto edges = testing::random_dag_edges(n, 0.05, rng);
        Digraph g(n, edges);
        std::vector<int> year(n);
        for (std::size_t i = 0; i < n; ++i) year[i] = 2000 + static_cast<int>(i / 15);
        const std::uint32_t cap = 1 + trial % 5;
        const auto a = assign_layers(g, year, cap);
        std::map<std::uint32_t, std::size_t> load;
        for (auto l : a.layer) ++load[l];
        for (const auto& [l, k] : load) EXPECT_LE(k, cap);
        for (const auto& e : edges) EXPECT_GT(a.layer[e.citing], a.layer[e.cited]);
        for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(a.layer_year[a.layer[i]], year[i]);
    }
}

// ---- closeness ----

TEST(Closeness, SingleEdgeOneStep) {
    Digraph g(2, std::vector<IndexEdge>{{1, 0}});
    const auto s = closeness(g, 1, 0.5);
    EXPECT_DOUBLE_EQ(s(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(s(1, 0), 0.5);
    EXPECT_DOUBLE_EQ(s(0, 0), 0.0);
}

TEST(Closeness, IsolatedNodeHasZeroRow) {
    Digraph g(3, std::vector<IndexEdge>{{1, 0}});
    const auto s = closeness(g);
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_EQ(s(2, j), 0.0);
        EXPECT_EQ(s(j, 2), 0.0);
    }
}

TEST(Closeness, PathMatchesSimulatedWalks) {
    Digraph g(4, std::vector<IndexEdge>{{1, 0}, {2, 1}, {3, 2}});
    const auto s = closeness(g, 3, 0.5);
    std::mt19937_64 rng(99);
    const int walks = 1000000;
    const auto sim = oracle::walk_closeness(4, g.edges(), 3, 0.5, walks, rng);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            const double p = 0.5 * (sim[i][j] + sim[j][i]);
            // Off the diagonal two independent estimates are averaged.
            const double samples = i == j ? walks : 2.0 * walks;
            const double sigma = std::sqrt(std::max(p * (1 - p), 1e-12) / samples);
            EXPECT_NEAR(s(i, j), p, 3 * sigma + 1e-9) << i << "," << j;
        }
    }
}

TEST(Closeness, SymmetricWithTotalStopMass) {
    std::mt19937_64 rng(3);
    const auto g = testing::random_dag(30, 0.1, rng);
    const auto s = closeness(g, 3, 0.5);
    double total = 0;
    std::size_t linked = 0;
    for (std::size_t i = 0; i < 30; ++i) {
        linked += g.out_degree(i) + g.in_degree(i) > 0;
        for (std::size_t j = 0; j < 30; ++j) {
            EXPECT_DOUBLE_EQ(s(i, j), s(j, i));
            EXPECT_GE(s(i, j), 0.0);
            total += s(i, j);
        }
    }
    // Each linked walk stops within 3 steps with probability 1 - 0.5^3.
    EXPECT_NEAR(total, 0.875 * static_cast<double>(linked), 1e-9);
}

// ---- horizontal placement ----

TEST(OptimizeX, SameLayerWithoutClosenessSpreadsToEdges) {
    SquareMatrix s(2);
    const std::vector<std::uint32_t> layer{0, 0};
    PlacementProblem p{&s, layer, 0.1, 0.5, 100, 5};
    const auto r = optimize_x(p, 1, 3);
    EXPECT_EQ(detail::gap(r.grid[0], r.grid[1]), 99u);
}

TEST(OptimizeX, DifferentLayersReachGridArgmin) {
    for (double sij : {0.5, 5.0, 50.0, 200.0}) {
        SquareMatrix s(2);
        s(0, 1) = s(1, 0) = sij;
        const std::vector<std::uint32_t> layer{0, 1};
        PlacementProblem p{&s, layer, 0.1, 0.5, 100, 5};
        const auto r = optimize_x(p, 2, 5);
        std::uint32_t argmin = 0;
        double best = 0.0;
        for (std::uint32_t k = 1; k < 100; ++k) {
            const double d = k / 99.0;
            const double f = sij * d * d - 0.1 * std::sqrt(d);
            if (f < best) best = f, argmin = k;
        }
        EXPECT_EQ(detail::gap(r.grid[0], r.grid[1]), argmin) << "s=" << sij;
    }
    // Strong enough closeness pulls the two onto the same x.
    SquareMatrix s(2);
    s(0, 1) = s(1, 0) = 200.0;
    const std::vector<std::uint32_t> layer{0, 1};
    PlacementProblem p{&s, layer, 0.1, 0.5, 100, 5};
    const auto r = optimize_x(p);
    EXPECT_EQ(r.grid[0], r.grid[1]);
}

TEST(OptimizeX, MatchesExhaustiveSearchOnSmallInstances) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 12; ++trial) {
        const auto g = testing::random_dag(6, 0.4, rng);
        const auto s = closeness(g);
        std::vector<std::uint32_t> layer{0, 0, 1, 1, 2, 2};
        std::shuffle(layer.begin(), layer.end(), rng);
        PlacementProblem p{&s, layer, 0.1, 0.5, 11, 3};
        const auto r = optimize_x(p, static_cast<std::uint64_t>(trial), 10);
        const double exact = oracle::exhaustive_energy(dense(s), layer, 11, 3, 0.1, 0.5);
        EXPECT_NEAR(r.energy, exact, 1e-9) << "trial " << trial;
    }
}

TEST(OptimizeX, BeatsRandomFeasiblePlacements) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const auto g = testing::random_dag(25, 0.12, rng);
        const auto s = closeness(g);
        std::vector<std::uint32_t> layer(25);
        for (std::size_t i = 0; i < 25; ++i) layer[i] = static_cast<std::uint32_t>(i % 5);
        PlacementProblem p{&s, layer, 0.1, 0.5, 100, 5};
        const auto r = optimize_x(p, 0, 3);
        const double mean = oracle::random_feasible_mean(dense(s), layer, 100, 5, 0.1, 0.5, 100, rng);
        EXPECT_LE(r.energy, mean);
        std::vector<int> grid(r.grid.begin(), r.grid.end());
        EXPECT_TRUE(oracle::separated(grid, layer, 5));
        EXPECT_NEAR(oracle::energy(dense(s), grid, 100, 0.1, 0.5), r.energy, 1e-9);
    }
}

TEST(OptimizeX, InfeasibleLayerRejected) {
    SquareMatrix s(3);
    const std::vector<std::uint32_t> layer{0, 0, 0};
    PlacementProblem p{&s, layer, 0.1, 0.5, 10, 5};
    try {
        optimize_x(p);
        FAIL() << "expected ContractError";
    } catch (const ContractError& e) {
        EXPECT_NE(std::string(e.what()).find("grid points"), std::string::npos);
    }
    PlacementProblem tight{&s, layer, 0.1, 0.5, 11, 5};
    EXPECT_NO_THROW(optimize_x(tight));
}

TEST(OptimizeX, DeterministicForSeed) {
    std::mt19937_64 rng(4);
    const auto g = testing::random_dag(20, 0.15, rng);
    const auto s = closeness(g);
    std::vector<std::uint32_t> layer(20);
    for (std::size_t i = 0; i < 20; ++i) layer[i] = static_cast<std::uint32_t>(i % 4);
    PlacementProblem p{&s, layer, 0.1, 0.5, 100, 5};
    EXPECT_EQ(optimize_x(p, 17, 4).grid, optimize_x(p, 17, 4).grid);
}

TEST(RandomPlacement, FeasibleAndCoversEndpoints) {
    SquareMatrix s(3);
    const std::vector<std::uint32_t> layer{0, 0, 0};
    PlacementProblem p{&s, layer, 0.1, 0.5, 12, 5};
    std::mt19937_64 rng(1);
    std::set<std::vector<std::uint32_t>> seen;
    for (int i = 0; i < 500; ++i) {
        const auto g = random_placement(p, rng);
        std::vector<int> gi(g.begin(), g.end());
        ASSERT_TRUE(oracle::separated(gi, layer, 5));
        for (auto x : g) ASSERT_LT(x, 12u);
        auto sorted = g;
        std::sort(sorted.begin(), sorted.end());
        seen.insert(sorted);
    }
    // Sorted feasible triples on 12 points at spacing 5: C(12 - 8, 3) = 4.
    EXPECT_EQ(seen.size(), 4u);
}

// ---- frames ----

TEST(ComposeFrame, TriangleReduction) {
    auto net = named({{"A", 2000}, {"B", 2001}, {"C", 2002}}, {{"B", "A"}, {"C", "B"}, {"C", "A"}});
    LayoutParams params;
    params.use_transitive_reduction = true;
    const auto reduced = compose_frame(NetworkView(net), params);
    EXPECT_EQ(reduced.edges.size(), 2u);
    for (const auto& e : reduced.edges) EXPECT_TRUE(e.essential);
    params.use_transitive_reduction = false;
    const auto full = compose_frame(NetworkView(net), params);
    ASSERT_EQ(full.edges.size(), 3u);
    int inessential = 0;
    for (const auto& e : full.edges) inessential += !e.essential;
    EXPECT_EQ(inessential, 1);
}

TEST(ComposeFrame, EmptyView) {
    auto net = named({{"A", 2000}}, {});
    const NetworkView view(net, {}, {});
    const auto f = compose_frame(view);
    EXPECT_TRUE(f.nodes.empty());
    EXPECT_TRUE(f.edges.empty());
}

TEST(ComposeFrame, InvariantsOnGeneratedNetworks) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 15; ++trial) {
        auto net = testing::random_network(80 + 10 * trial, 0.04, rng);
        LayoutParams params;
        params.restarts = 2;
        params.use_transitive_reduction = trial % 2 == 0;
        const auto f = compose_frame(NetworkView(net), params);
        EXPECT_EQ(f.nodes.size(), 40u);
        EXPECT_EQ(oracle::check_frame(f, *net, params), "") << "trial " << trial;
    }
}

TEST(ComposeFrame, AttributesCarriedThrough) {
    auto net = named({{"A", 2000}, {"B", 2001}}, {{"B", "A"}});
    std::vector<AttributeChange> changes{{.id = "A", .marked = true}, {.id = "B", .selected = true}};
    const auto view = update_attributes(NetworkView(net), changes);
    const auto f = compose_frame(view);
    ASSERT_EQ(f.nodes.size(), 2u);
    EXPECT_EQ(f.nodes[0].id, "A");
    EXPECT_TRUE(f.nodes[0].marked);
    EXPECT_FALSE(f.nodes[0].selected);
    EXPECT_TRUE(f.nodes[1].selected);
    EXPECT_EQ(f.nodes[0].score, 1u);
}

TEST(ComposeFrame, DeterministicForSeed) {
    std::mt19937_64 rng(2);
    auto net = testing::random_network(200, 0.03, rng);
    LayoutParams params;
    params.seed = 9;
    const auto a = frame_to_json(compose_frame(NetworkView(net), params)).dump();
    const auto b = frame_to_json(compose_frame(NetworkView(net), params)).dump();
    EXPECT_EQ(a, b);
}

TEST(ComposeFrame, InvalidParamsRejected) {
    auto net = named({{"A", 2000}}, {});
    LayoutParams params;
    params.grid_points = 5;
    EXPECT_THROW(compose_frame(NetworkView(net), params), ContractError);
    params = {};
    params.display_count = 0;
    EXPECT_THROW(compose_frame(NetworkView(net), params), ContractError);
}

// ---- serialisation ----

TEST(FrameJson, Shape) {
    auto net = named({{"A", 2000}, {"B", 2001}}, {{"B", "A"}});
    const auto j = frame_to_json(compose_frame(NetworkView(net)));
    EXPECT_EQ(j["version"], kFrameVersion);
    EXPECT_EQ(j["grid_points"], 100);
    ASSERT_EQ(j["nodes"].size(), 2u);
    EXPECT_EQ(j["nodes"][0]["id"], "A");
    EXPECT_EQ(j["nodes"][0]["label"], "A");
    EXPECT_TRUE(j["nodes"][0]["group"].is_null());
    ASSERT_EQ(j["edges"].size(), 1u);
    EXPECT_EQ(j["edges"][0]["citing"], "B");
    EXPECT_EQ(j["layers"][0]["year"], 2000);
    EXPECT_EQ(j["layers"][1]["year"], 2001);
}

TEST(FrameSvg, DrawsEveryNodeAndEdge) {
    auto net = named({{"A&B", 2000}, {"C", 2001}, {"D", 2001}}, {{"C", "A&B"}, {"D", "A&B"}});
    std::vector<AttributeChange> changes{{.id = "C", .marked = true}};
    const auto view = update_attributes(NetworkView(net), changes);
    const auto svg = frame_to_svg(compose_frame(view));
    auto count = [&](const std::string& needle) {
        std::size_t c = 0;
        for (auto pos = svg.find(needle); pos != std::string::npos; pos = svg.find(needle, pos + 1)) ++c;
        return c;
    };
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_EQ(count("<path"), 2u);
    EXPECT_EQ(count("<rect"), 1u);
    EXPECT_EQ(count("<circle"), 2u);
    EXPECT_NE(svg.find("A&amp;B"), std::string::npos);
    EXPECT_EQ(svg.find("A&B"), std::string::npos);
}

} // namespace
} // namespace citnet
