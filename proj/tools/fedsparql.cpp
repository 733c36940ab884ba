// fedsparql: operator CLI for the federated-SPARQL toolkit.
//
//   shard   partition a dataset so every workload query requires federation
//   sim     serve shards as SPARQL endpoints and write the catalogue
//   serve   expose the toolkit as an MCP server (stdio and/or HTTP)
//   query   execute a federated query against a catalogue
//   void    fetch or compute an endpoint's VoID description
//   fanout  per-query fan-out metrics for a materialized deployment

#include "fedsparql/fed/engine.hpp"
#include "fedsparql/mcp/server.hpp"
#include "fedsparql/net/results_json.hpp"
#include "fedsparql/rdf/turtle.hpp"
#include "fedsparql/shard/shardgen.hpp"
#include "fedsparql/sim/deployment.hpp"
#include "fedsparql/sparql/parser.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <thread>

using namespace fedsparql;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kUserError = 1;
constexpr int kRuntimeError = 2;

rdf::Graph load_graph_file(const std::string& path) {
    if (!std::filesystem::exists(path)) throw CLI::ValidationError("file does not exist: " + path);
    return rdf::load_turtle_file(path);
}

fed::EngineOptions engine_options(const std::string& strategy, long timeout_seconds) {
    fed::EngineOptions opts;
    opts.strategy = strategy == "bound" ? fed::JoinStrategy::Bound : fed::JoinStrategy::Hash;
    opts.per_request_timeout = std::chrono::seconds(timeout_seconds);
    return opts;
}

int cmd_shard(const std::string& data_path, const std::string& onto_path,
              const std::string& workload_path, const std::string& out_dir, int k,
              std::size_t exact_threshold) {
    rdf::Graph data = load_graph_file(data_path);
    rdf::Graph onto = onto_path.empty() ? rdf::Graph{} : load_graph_file(onto_path);
    std::string workload_text = rdf::read_file(workload_path);

    shard::ShardgenConfig cfg;
    cfg.horizontal_k = k;
    cfg.exact_threshold = exact_threshold;
    shard::PipelineResult result = shard::run_pipeline(data, onto, workload_text, cfg);
    shard::write_artifacts(result, out_dir);

    const auto& metrics = result.manifest.at("metrics");
    std::cout << "dataset: " << result.closed.size() << " triples ("
              << result.manifest.at("dataset").at("untyped_subjects").get<std::size_t>()
              << " untyped subjects)\n"
              << "rules:   " << result.selection.rules.size() << " selected from "
              << result.candidates.size() << " candidates ("
              << (result.selection.exact ? "exact" : "greedy") << " set cover)\n"
              << "shards:  " << result.assignment->shards().size() << " (cv "
              << metrics.at("shard_size_cv").get<double>() << ")\n"
              << "fan-out: avg " << metrics.at("fanout").at("avg").get<double>() << ", median "
              << metrics.at("fanout").at("median").get<double>() << "\n"
              << "manifest: " << out_dir << "/manifest.json\n";
    for (const auto& w : result.assignment->warnings()) std::cerr << "warning: " << w << "\n";
    if (!result.all_covered) {
        std::cerr << "error: uncovered queries:";
        for (const auto& qid : result.selection.uncovered_query_ids) std::cerr << " " << qid;
        std::cerr << "\n";
        return kRuntimeError;
    }
    return kOk;
}

int cmd_sim(const std::string& manifest_path, const std::string& descriptor_path,
            const std::string& catalogue_path, const std::string& cache_dir, int base_port,
            long run_for_seconds) {
    sim::Deployment deployment =
        !descriptor_path.empty()
            ? sim::Deployment::from_descriptor(descriptor_path)
            : sim::Deployment::from_manifest(manifest_path, sim::SimConfig{}, base_port);

    catalogue::Catalogue cat = deployment.make_catalogue();
    if (!cache_dir.empty()) cat.set_cache_dir(cache_dir);

    // Health probe: every endpoint must answer ASK {} with true.
    net::EndpointClient client;
    for (const auto& m : deployment.members()) {
        net::QueryRequest req;
        req.query = "ASK {}";
        req.timeout = std::chrono::seconds(10);
        net::QueryOutcome out = client.execute(m.url, req);
        if (!out.ok() || out.ask != true) {
            std::cerr << "error: endpoint " << m.url << " failed its health probe\n";
            return kRuntimeError;
        }
        std::cout << m.url << "  " << m.label << "\n";
    }
    if (!catalogue_path.empty()) {
        cat.save(catalogue_path);
        std::cout << "catalogue: " << catalogue_path << "\n";
    }
    std::cout << "READY (" << deployment.members().size() << " endpoints)" << std::endl;

    if (run_for_seconds > 0) {
        std::this_thread::sleep_for(std::chrono::seconds(run_for_seconds));
    } else {
        while (true) std::this_thread::sleep_for(std::chrono::hours(1));
    }
    deployment.stop_all();
    return kOk;
}

int cmd_serve(const std::string& catalogue_path, bool stdio, int http_port, std::size_t row_cap,
              const std::string& strategy, long timeout_seconds) {
    catalogue::Catalogue cat = catalogue::Catalogue::load(catalogue_path);
    net::EndpointClient client;
    mcp::McpConfig cfg;
    cfg.result_row_cap = row_cap;
    cfg.engine = engine_options(strategy, timeout_seconds);
    cfg.default_timeout = std::chrono::seconds(timeout_seconds);
    mcp::McpServer server(cat, client, cfg);

    if (http_port >= 0) {
        std::string url = server.serve_http(http_port);
        std::cerr << "MCP over HTTP: POST " << url << std::endl;
        if (!stdio) {
            while (true) std::this_thread::sleep_for(std::chrono::hours(1));
        }
    }
    if (stdio) server.run_stdio(std::cin, std::cout);
    return kOk;
}

int cmd_query(const std::string& catalogue_path, const std::string& query_file,
              std::string query_text, bool with_stats, const std::string& strategy,
              long timeout_seconds) {
    if (!query_file.empty()) query_text = rdf::read_file(query_file);
    if (query_text.empty()) {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        query_text = ss.str();
    }
    if (query_text.empty()) throw CLI::ValidationError("no query given (file, argument or stdin)");

    catalogue::Catalogue cat = catalogue::Catalogue::load(catalogue_path);
    net::EndpointClient client;
    fed::FederationEngine engine(client, &cat);

    try {
        fed::RunResult run = engine.run_federated(query_text, std::chrono::seconds(timeout_seconds),
                                                  engine_options(strategy, timeout_seconds));
        json results = run.ask.has_value() ? net::ask_to_json(*run.ask)
                                           : net::solutions_to_json(*run.solutions);
        if (with_stats)
            std::cout << json{{"results", results}, {"stats", run.stats.to_json()}}.dump(2)
                      << "\n";
        else
            std::cout << results.dump(2) << "\n";
        return kOk;
    } catch (const sparql::QueryParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kUserError;
    } catch (const fed::FedError& e) {
        std::cerr << "error (" << fed::to_string(e.kind()) << "): " << e.what() << "\n";
        return e.kind() == fed::FedError::Kind::ZeroService ? kUserError : kRuntimeError;
    }
}

int cmd_void(const std::string& endpoint, const std::string& catalogue_path,
             const std::string& cache_dir, bool extended, bool exact_linksets, bool refresh,
             long timeout_seconds) {
    catalogue::Catalogue cat;
    if (!catalogue_path.empty() && std::filesystem::exists(catalogue_path))
        cat = catalogue::Catalogue::load(catalogue_path);
    if (cat.cache_dir().empty())
        cat.set_cache_dir(cache_dir.empty() ? ".fedsparql-cache" : cache_dir);
    if (!cat.has(endpoint)) cat.register_endpoint(endpoint, "", "");

    net::EndpointClient client;
    catalogue::VoidService service(cat, client);
    catalogue::VoidOptions opts;
    opts.extended = extended;
    opts.exact_linksets = exact_linksets;
    opts.refresh = refresh;
    opts.timeout = std::chrono::seconds(timeout_seconds);

    try {
        catalogue::VoidResult result = service.get(endpoint, opts);
        std::cout << result.turtle;
        std::cerr << "# source: " << catalogue::to_string(result.source) << "\n";
        if (!catalogue_path.empty()) cat.save(catalogue_path);
        return kOk;
    } catch (const catalogue::VoidError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
}

int cmd_fanout(const std::string& manifest_path, const std::string& workload_path,
               const std::string& onto_path, bool as_json) {
    json manifest = json::parse(rdf::read_file(manifest_path));
    std::string dir = std::filesystem::path(manifest_path).parent_path().string();
    if (dir.empty()) dir = ".";

    // The shards partition the closed graph, so their union reconstructs it.
    rdf::Graph closed;
    for (const auto& s : manifest.at("shards")) {
        rdf::Graph shard = rdf::parse_turtle(rdf::read_file(dir + "/" + s.at("file").get<std::string>()));
        closed.merge(shard);
    }

    std::vector<shard::ShardingRule> rules;
    for (const auto& r : manifest.at("rules")) {
        shard::ShardingRule rule;
        std::string kind = r.at("kind").get<std::string>();
        if (kind == "vertical") {
            rule.kind = shard::ShardingRule::Kind::Vertical;
            rule.a = r.at("predicates")[0].get<std::string>();
            rule.b = r.at("predicates")[1].get<std::string>();
        } else if (kind == "class") {
            rule.kind = shard::ShardingRule::Kind::Class;
            rule.a = r.at("classes")[0].get<std::string>();
            rule.b = r.at("classes")[1].get<std::string>();
        } else {
            rule.kind = shard::ShardingRule::Kind::Horizontal;
            rule.a = r.at("class").get<std::string>();
            rule.shard_count = r.at("k").get<int>();
        }
        rules.push_back(std::move(rule));
    }

    rdf::Graph onto = onto_path.empty() ? rdf::Graph{} : load_graph_file(onto_path);
    shard::ShardAssignment assignment = shard::materialize_shards(closed, rules);
    auto workload = shard::load_workload(rdf::read_file(workload_path), closed, onto);

    std::vector<const rdf::Graph*> shard_graphs;
    for (const auto& s : assignment.shards()) shard_graphs.push_back(&s.graph);

    json rows = json::array();
    std::printf("%-24s %8s %10s %8s\n", "query", "f(Q)", "realized", "covered");
    for (const shard::WorkloadQuery& q : workload) {
        shard::FanoutReport fr = shard::compute_fanout(q, assignment, closed);
        bool covered = shard::query_federated(q, shard_graphs, closed);
        rows.push_back({{"id", q.id},
                        {"fanout", fr.fanout},
                        {"realized", fr.realized},
                        {"covered", covered},
                        {"matched_shards", fr.matched_shards}});
        std::printf("%-24s %8zu %10zu %8s\n", q.id.c_str(), fr.fanout, fr.realized,
                    covered ? "yes" : "NO");
    }
    if (as_json) std::cout << rows.dump(2) << "\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Federated SPARQL toolkit: benchmark shard generator, endpoint simulator, "
                 "federation engine and MCP server"};
    app.require_subcommand(1);

    // --- shard --------------------------------------------------------------
    std::string data_path, onto_path, workload_path, out_dir;
    int horizontal_k = 2;
    std::size_t exact_threshold = 20;
    CLI::App* shard_cmd =
        app.add_subcommand("shard", "Partition a dataset so every workload query federates");
    shard_cmd->add_option("--data", data_path, "dataset Turtle/N-Triples file")->required();
    shard_cmd->add_option("--ontology", onto_path, "ontology Turtle file (rdfs:domain/range)");
    shard_cmd->add_option("--workload", workload_path, "workload JSONL: {id, question, sparql}")
        ->required();
    shard_cmd->add_option("--out", out_dir, "output directory")->required();
    shard_cmd->add_option("--k", horizontal_k, "shard count for horizontal rules (default 2)")
        ->check(CLI::Range(2, 1024));
    shard_cmd->add_option("--exact-threshold", exact_threshold,
                          "max candidates for the exact set-cover solver (default 20)");

    // --- sim ----------------------------------------------------------------
    std::string manifest_path, descriptor_path, catalogue_out, cache_dir;
    int base_port = 0;
    long run_for = 0;
    CLI::App* sim_cmd = app.add_subcommand("sim", "Launch one simulator endpoint per shard");
    sim_cmd->add_option("--manifest", manifest_path, "shard manifest.json");
    sim_cmd->add_option("--descriptor", descriptor_path, "deployment descriptor JSON");
    sim_cmd->add_option("--catalogue", catalogue_out, "write the endpoint catalogue here");
    sim_cmd->add_option("--cache-dir", cache_dir, "VoID cache directory for the catalogue");
    sim_cmd->add_option("--base-port", base_port, "first port (0 = pick free ports)");
    sim_cmd->add_option("--run-for", run_for, "exit after N seconds (default: run until killed)");

    // --- serve ----------------------------------------------------------------
    std::string serve_catalogue, serve_strategy = "hash";
    bool serve_stdio = false;
    int http_port = -1;
    std::size_t row_cap = 1000;
    long serve_timeout = 30;
    CLI::App* serve_cmd = app.add_subcommand("serve", "Run the MCP server over a catalogue");
    serve_cmd->add_option("--catalogue", serve_catalogue, "catalogue JSON file")->required();
    serve_cmd->add_flag("--stdio", serve_stdio, "newline-delimited JSON-RPC on stdin/stdout");
    serve_cmd->add_option("--http", http_port, "HTTP transport port (0 = pick a free port)");
    serve_cmd->add_option("--row-cap", row_cap, "rows embedded per tool response (default 1000)");
    serve_cmd->add_option("--strategy", serve_strategy, "join strategy: hash | bound")
        ->check(CLI::IsMember({"hash", "bound"}));
    serve_cmd->add_option("--timeout", serve_timeout, "default per-query timeout in seconds");

    // --- query ---------------------------------------------------------------
    std::string query_catalogue, query_file, query_text, query_strategy = "hash";
    bool query_stats = false;
    long query_timeout = 30;
    CLI::App* query_cmd = app.add_subcommand("query", "Execute a federated query");
    query_cmd->add_option("--catalogue", query_catalogue, "catalogue JSON file")->required();
    query_cmd->add_option("--file", query_file, "query file (default: stdin)");
    query_cmd->add_option("query", query_text, "query text");
    query_cmd->add_flag("--stats", query_stats, "include the execution report");
    query_cmd->add_option("--strategy", query_strategy, "join strategy: hash | bound")
        ->check(CLI::IsMember({"hash", "bound"}));
    query_cmd->add_option("--timeout", query_timeout, "deadline in seconds (default 30)");

    // --- void ----------------------------------------------------------------
    std::string void_endpoint, void_catalogue, void_cache;
    bool void_extended = false, void_exact = false, void_refresh = false;
    long void_timeout = 30;
    CLI::App* void_cmd = app.add_subcommand("void", "Print an endpoint's VoID description");
    void_cmd->add_option("--endpoint", void_endpoint, "endpoint URL")->required();
    void_cmd->add_option("--catalogue", void_catalogue, "catalogue JSON (cache lives there)");
    void_cmd->add_option("--cache-dir", void_cache, "cache directory when no catalogue is given");
    void_cmd->add_flag("--extended", void_extended, "compute linksets towards other endpoints");
    void_cmd->add_flag("--exact-linksets", void_exact,
                       "exact membership checks instead of the namespace approximation");
    void_cmd->add_flag("--refresh", void_refresh, "bypass the cache");
    void_cmd->add_option("--timeout", void_timeout, "per-request timeout in seconds");

    // --- fanout ---------------------------------------------------------------
    std::string fan_manifest, fan_workload, fan_onto;
    bool fan_json = false;
    CLI::App* fan_cmd = app.add_subcommand("fanout", "Fan-out metrics for a materialization");
    fan_cmd->add_option("--manifest", fan_manifest, "shard manifest.json")->required();
    fan_cmd->add_option("--workload", fan_workload, "workload JSONL")->required();
    fan_cmd->add_option("--ontology", fan_onto, "ontology Turtle (for class inference)");
    fan_cmd->add_flag("--json", fan_json, "also print a JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUserError;
    }

    try {
        if (shard_cmd->parsed())
            return cmd_shard(data_path, onto_path, workload_path, out_dir, horizontal_k,
                             exact_threshold);
        if (sim_cmd->parsed()) {
            if (manifest_path.empty() && descriptor_path.empty())
                throw CLI::ValidationError("sim requires --manifest or --descriptor");
            return cmd_sim(manifest_path, descriptor_path, catalogue_out, cache_dir, base_port,
                           run_for);
        }
        if (serve_cmd->parsed()) {
            if (!serve_stdio && http_port < 0) serve_stdio = true; // default transport
            return cmd_serve(serve_catalogue, serve_stdio, http_port, row_cap, serve_strategy,
                             serve_timeout);
        }
        if (query_cmd->parsed())
            return cmd_query(query_catalogue, query_file, query_text, query_stats, query_strategy,
                             query_timeout);
        if (void_cmd->parsed())
            return cmd_void(void_endpoint, void_catalogue, void_cache, void_extended, void_exact,
                            void_refresh, void_timeout);
        if (fan_cmd->parsed()) return cmd_fanout(fan_manifest, fan_workload, fan_onto, fan_json);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUserError;
    } catch (const rdf::TurtleParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kUserError;
    } catch (const sparql::QueryParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kUserError;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kUserError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kUserError;
}
