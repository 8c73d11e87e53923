#pragma once

// Command-line front end. run_cli() is the whole program so tests can drive
// it in-process; tools/citnet.cpp only forwards main's arguments.
//
// Exit codes: 0 ok, 1 usage, 2 input (format, missing file, unknown id),
// 3 contract or precondition violation. Errors go to stderr as one line:
//   error<TAB>kind<TAB>message

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "citnet/analytics.hpp"
#include "citnet/dag.hpp"
#include "citnet/error.hpp"
#include "citnet/explore.hpp"
#include "citnet/http.hpp"
#include "citnet/layout.hpp"
#include "citnet/load.hpp"
#include "citnet/ops.hpp"
#include "citnet/render.hpp"
#include "citnet/service.hpp"

namespace citnet {

namespace cli {

inline constexpr const char* kSeedVariable = "CITNET_SEED";

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::format:
    case ErrorKind::not_found:
    case ErrorKind::io: return 2;
    case ErrorKind::precondition:
    case ErrorKind::contract: return 3;
    }
    return 3;
}

inline std::string one_line(std::string s) {
    for (auto& c : s)
        if (c == '\n' || c == '\r' || c == '\t') c = ' ';
    return s;
}

struct Inputs {
    std::vector<std::string> wos;
    std::string publications;
    std::string citations;
    std::uint32_t min_incomplete = MatchOptions{}.incomplete_min_citations;
};

inline void add_inputs(CLI::App* sub, Inputs& in) {
    sub->add_option("--wos", in.wos, "Tagged export file; repeat for several files")->type_name("FILE");
    sub->add_option("--publications", in.publications, "Publications table of a pair-file network")->type_name("FILE");
    sub->add_option("--citations", in.citations, "Citations table of a pair-file network")->type_name("FILE");
    sub->add_option("--min-incomplete", in.min_incomplete,
                    "Citations needed to admit a cited-only publication (tagged exports)")
        ->capture_default_str();
}

inline LoadedNetwork load_inputs(const Inputs& in) {
    const bool pairs = !in.publications.empty() || !in.citations.empty();
    if (pairs == !in.wos.empty()) throw UsageError("give either --wos or both --publications and --citations");
    if (pairs) {
        if (in.publications.empty() || in.citations.empty())
            throw UsageError("--publications and --citations must be given together");
        return load_pairs(read_file(in.publications), read_file(in.citations));
    }
    std::vector<std::string> texts;
    for (const auto& path : in.wos) texts.push_back(read_file(path));
    MatchOptions mo;
    mo.incomplete_min_citations = in.min_incomplete;
    return load_wos(texts, mo);
}

/// Writes to `path`, or to `out` when the path is empty or "-".
inline void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
        out.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + path + "'");
    f << content;
    if (!f) throw IoError("cannot write '" + path + "'");
}

inline std::uint64_t default_seed() {
    const char* v = std::getenv(kSeedVariable);
    if (!v || !*v) return 0;
    std::uint64_t seed = 0;
    const std::string s(v);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw UsageError(std::string(kSeedVariable) + " must be a non-negative integer");
    return seed;
}

inline nlohmann::json read_json_file(const std::string& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

} // namespace cli

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    using namespace cli;
    std::uint64_t env_seed = 0;
    try {
        env_seed = default_seed();
    } catch (const UsageError& e) {
        err << "error\tusage\t" << one_line(e.what()) << "\n";
        return 1;
    }

    CLI::App app{"Citation network engine: load, analyse, explore and lay out citation networks"};
    app.name("citnet");
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", "citnet 1.0");
    std::function<void()> action;

    // load
    Inputs load_in;
    std::string load_dir;
    auto* load = app.add_subcommand("load", "Parse and match input files; write pair files and a match report");
    add_inputs(load, load_in);
    load->add_option("--out-dir", load_dir, "Directory for publications.tsv, citations.tsv and report.json")
        ->required()
        ->type_name("DIR");
    load->callback([&] {
        action = [&] {
            const auto loaded = load_inputs(load_in);
            std::ostringstream pubs, cits;
            write_pair_files(pubs, cits, *loaded.network);
            const std::string base = load_dir.empty() || load_dir.back() == '/' ? load_dir : load_dir + "/";
            emit(base + "publications.tsv", pubs.str(), out);
            emit(base + "citations.tsv", cits.str(), out);
            emit(base + "report.json", json_text(load_report_json(loaded)), out);
        };
    });

    // reduce
    Inputs reduce_in;
    std::string reduce_out;
    bool reduce_removed = false;
    std::string reduce_strategy = "auto";
    auto* reduce = app.add_subcommand("reduce", "Transitive reduction: write the essential citation relations");
    add_inputs(reduce, reduce_in);
    reduce->add_option("-o,--out", reduce_out, "Output file (default stdout)")->type_name("FILE");
    reduce->add_flag("--removed", reduce_removed, "Write the non-essential relations instead");
    reduce->add_option("--strategy", reduce_strategy, "auto, bitset or pruned-dfs")
        ->check(CLI::IsMember({"auto", "bitset", "pruned-dfs"}))
        ->capture_default_str();
    reduce->callback([&] {
        action = [&] {
            const auto loaded = load_inputs(reduce_in);
            const auto& net = *loaded.network;
            const auto strategy = reduce_strategy == "bitset"       ? ReductionStrategy::bitset
                                  : reduce_strategy == "pruned-dfs" ? ReductionStrategy::pruned_search
                                                                    : ReductionStrategy::automatic;
            const auto r = transitive_reduction(net.graph(), strategy);
            std::string text;
            for (const auto& e : reduce_removed ? r.non_essential : r.essential)
                text += net.publication(e.citing).id + "\t" + net.publication(e.cited).id + "\n";
            emit(reduce_out, text, out);
        };
    });

    // cluster
    Inputs cluster_in;
    std::string cluster_out, cluster_report;
    ClusterOptions copt;
    copt.seed = env_seed;
    std::string policy = "discard";
    auto* clus = app.add_subcommand("cluster", "Cluster publications; write an id to cluster table (0 = unassigned)");
    add_inputs(clus, cluster_in);
    clus->add_option("-o,--out", cluster_out, "Output file (default stdout)")->type_name("FILE");
    clus->add_option("--report", cluster_report, "Also write a JSON summary (quality, cluster sizes)")->type_name("FILE");
    clus->add_option("--resolution", copt.resolution, "Resolution parameter")->capture_default_str();
    clus->add_option("--min-cluster-size", copt.min_cluster_size, "Smallest cluster kept")->capture_default_str();
    clus->add_option("--policy", policy, "Small clusters: discard or merge")
        ->check(CLI::IsMember({"discard", "merge"}))
        ->capture_default_str();
    clus->add_option("--seed", copt.seed, std::string("Random seed (default from ") + kSeedVariable + ")");
    clus->add_option("--random-starts", copt.random_starts, "Independent optimiser runs")->capture_default_str();
    clus->add_option("--iterations", copt.iterations, "Iterations per run")->capture_default_str();
    clus->callback([&] {
        action = [&] {
            copt.policy = policy == "merge" ? SmallClusterPolicy::merge : SmallClusterPolicy::discard;
            const auto loaded = load_inputs(cluster_in);
            const auto& net = *loaded.network;
            const auto p = cluster(net.graph(), copt);
            std::string text;
            for (NodeIndex v = 0; v < net.size(); ++v)
                text += net.publication(v).id + "\t" + std::to_string(p.cluster[v]) + "\n";
            emit(cluster_out, text, out);
            if (!cluster_report.empty()) emit(cluster_report, json_text(partition_json(p)), out);
        };
    });

    // cores
    Inputs cores_in;
    std::string cores_out;
    std::uint32_t cores_k = 1;
    auto* cores = app.add_subcommand("cores", "Core publications: ids of the k-core, one per line");
    add_inputs(cores, cores_in);
    cores->add_option("-o,--out", cores_out, "Output file (default stdout)")->type_name("FILE");
    cores->add_option("--k", cores_k, "Minimum number of citation relations within the core")->required();
    cores->callback([&] {
        action = [&] {
            const auto loaded = load_inputs(cores_in);
            std::string text;
            for (NodeIndex v : core_publications(loaded.network->graph(), cores_k))
                text += loaded.network->publication(v).id + "\n";
            emit(cores_out, text, out);
        };
    });

    // components
    Inputs comp_in;
    std::string comp_out;
    auto* comps = app.add_subcommand("components", "Connected components: id to component table, 1 = largest");
    add_inputs(comps, comp_in);
    comps->add_option("-o,--out", comp_out, "Output file (default stdout)")->type_name("FILE");
    comps->callback([&] {
        action = [&] {
            const auto loaded = load_inputs(comp_in);
            const auto& net = *loaded.network;
            const auto list = view_components(NetworkView(loaded.network));
            std::vector<std::size_t> label(net.size(), 0);
            for (std::size_t c = 0; c < list.size(); ++c)
                for (NodeIndex v : list[c]) label[v] = c + 1;
            std::string text;
            for (NodeIndex v = 0; v < net.size(); ++v) text += net.publication(v).id + "\t" + std::to_string(label[v]) + "\n";
            emit(comp_out, text, out);
        };
    });

    // path
    Inputs path_in;
    std::string path_out, path_from, path_to, path_kind = "shortest";
    std::size_t max_paths = 100;
    auto* path = app.add_subcommand("path", "Shortest or longest citation paths between two publications (JSON)");
    add_inputs(path, path_in);
    path->add_option("-o,--out", path_out, "Output file (default stdout)")->type_name("FILE");
    path->add_option("--from", path_from, "Citing end of the path")->required();
    path->add_option("--to", path_to, "Cited end of the path")->required();
    path->add_option("--kind", path_kind, "shortest or longest")
        ->check(CLI::IsMember({"shortest", "longest"}))
        ->capture_default_str();
    path->add_option("--max-paths", max_paths, "Most paths listed")->capture_default_str();
    path->callback([&] {
        action = [&] {
            const auto loaded = load_inputs(path_in);
            const auto& net = *loaded.network;
            const auto kind = path_kind == "longest" ? PathKind::longest : PathKind::shortest;
            const auto r = extreme_path(net.graph(), net.index_of(path_from), net.index_of(path_to), kind, max_paths);
            emit(path_out, json_text(path_json(net, r, kind)), out);
        };
    });

    // layout
    Inputs layout_in;
    std::string layout_out, layout_svg, layout_script;
    LayoutParams lp;
    lp.seed = env_seed;
    auto* lay = app.add_subcommand("layout", "Lay out the most cited publications; write frame JSON and optional SVG");
    add_inputs(lay, layout_in);
    lay->add_option("-o,--out", layout_out, "Frame JSON output (default stdout)")->type_name("FILE");
    lay->add_option("--svg", layout_svg, "Also write an SVG drawing")->type_name("FILE");
    lay->add_option("--script", layout_script, "Apply a drill/expand script first and lay out the resulting view")
        ->type_name("FILE");
    lay->add_option("--display-count", lp.display_count, "Publications shown")->capture_default_str();
    lay->add_option("--alpha", lp.alpha, "Repulsion weight")->capture_default_str();
    lay->add_option("--beta", lp.beta, "Repulsion exponent")->capture_default_str();
    lay->add_option("--grid-points", lp.grid_points, "Horizontal grid size")->capture_default_str();
    lay->add_option("--min-separation", lp.min_separation, "Grid points between neighbours in a layer")->capture_default_str();
    lay->add_option("--max-per-layer", lp.max_per_layer, "Publications per layer")->capture_default_str();
    lay->add_flag("--transitive-reduction", lp.use_transitive_reduction, "Draw only essential citation relations");
    lay->add_flag("--score-within-view", lp.score_within_view, "Rank by citations from the current view only");
    lay->add_option("--seed", lp.seed, std::string("Random seed (default from ") + kSeedVariable + ")");
    lay->add_option("--restarts", lp.restarts, "Random starts of the placement")->capture_default_str();
    lay->callback([&] {
        action = [&] {
            const auto loaded = load_inputs(layout_in);
            Session s(loaded.network);
            if (!layout_script.empty()) run_script(s, read_json_file(layout_script));
            const auto frame = compose_frame(s.current(), lp);
            emit(layout_out, json_text(frame_to_json(frame)), out);
            if (!layout_svg.empty()) emit(layout_svg, frame_to_svg(frame), out);
        };
    });

    // drill / expand: the same script runner under both names
    Inputs script_in;
    std::string script_file, script_out, script_members;
    auto add_script = [&](const char* name, const char* what) {
        auto* sub = app.add_subcommand(name, what);
        add_inputs(sub, script_in);
        sub->add_option("script", script_file,
                        "JSON script: {\"steps\": [{\"op\": \"drill\", ...}, {\"op\": \"expand\", ...}, ...]}")
            ->required()
            ->type_name("FILE");
        sub->add_option("-o,--out", script_out, "Step results as JSON (default stdout)")->type_name("FILE");
        sub->add_option("--members", script_members, "Write the final member ids, one per line")->type_name("FILE");
        sub->callback([&] {
            action = [&] {
                const auto loaded = load_inputs(script_in);
                const auto script = read_json_file(script_file);
                Session s(loaded.network);
                const auto results = run_script(s, script);
                emit(script_out, json_text(results), out);
                if (!script_members.empty()) {
                    std::string text;
                    for (NodeIndex v : s.current().members()) text += s.network().publication(v).id + "\n";
                    emit(script_members, text, out);
                }
            };
        });
    };
    add_script("drill", "Run a selection/expansion script (drill down, expand, remove, cluster, ...)");
    add_script("expand", "Same as drill: run a selection/expansion script");

    // serve
    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "Run the JSON session service");
    serve->add_option("--host", host, "Address to bind (loopback by default; other addresses are unauthenticated)")
        ->capture_default_str();
    serve->add_option("--port", port, "Port, 0 for any free port")->check(CLI::Range(0, 65535))->capture_default_str();
    serve->callback([&] {
        action = [&] {
            Service service;
            HttpServer server(service);
            const int bound = server.bind(host, port);
            out << "listening on http://" + host + ":" + std::to_string(bound) + "/v1/\n";
            out.flush();
            server.run();
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err); // --help, --version
        err << "error\tusage\t" << one_line(e.what()) << "\n";
        return 1;
    }
    try {
        if (action) action();
        return 0;
    } catch (const UsageError& e) {
        err << "error\tusage\t" << one_line(e.what()) << "\n";
        return 1;
    } catch (const Error& e) {
        err << "error\t" << to_string(e.kind()) << "\t" << one_line(e.what()) << "\n";
        return exit_code(e.kind());
    } catch (const nlohmann::json::exception& e) {
        err << "error\tformat\t" << one_line(e.what()) << "\n";
        return 2;
    }
}

} // namespace citnet
