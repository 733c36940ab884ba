#include "fedsparql/mcp/server.hpp"

#include "fedsparql/net/results_json.hpp"
#include "fedsparql/net/url.hpp"
#include "fedsparql/sparql/parser.hpp"

#include <httplib.h>

#include <atomic>
#include <iostream>
#include <thread>

namespace fedsparql::mcp {

using nlohmann::json;

namespace {

constexpr const char* kProtocolVersion = "2025-06-18";

json rpc_error(const json& id, int code, const std::string& message) {
    return json{{"jsonrpc", "2.0"},
                {"id", id.is_null() ? json(nullptr) : id},
                {"error", {{"code", code}, {"message", message}}}};
}

json rpc_result(const json& id, json result) {
    return json{{"jsonrpc", "2.0"}, {"id", id}, {"result", std::move(result)}};
}

// --- minimal JSON Schema checking for tool arguments -----------------------

std::string json_type_name(const json& v) {
    if (v.is_object()) return "object";
    if (v.is_array()) return "array";
    if (v.is_string()) return "string";
    if (v.is_boolean()) return "boolean";
    if (v.is_number_integer() || v.is_number_unsigned()) return "integer";
    if (v.is_number()) return "number";
    return "null";
}

std::optional<std::string> schema_check(const json& schema, const json& value,
                                        const std::string& path) {
    if (schema.contains("type")) {
        std::string want = schema.at("type").get<std::string>();
        std::string got = json_type_name(value);
        bool ok = want == got || (want == "number" && got == "integer");
        if (!ok) return path + ": expected " + want + ", got " + got;
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const json& option : schema.at("enum"))
            if (option == value) ok = true;
        if (!ok) return path + ": value not in enum " + schema.at("enum").dump();
    }
    if (value.is_number()) {
        if (schema.contains("minimum") && value.get<double>() < schema.at("minimum").get<double>())
            return path + ": below minimum " + schema.at("minimum").dump();
        if (schema.contains("maximum") && value.get<double>() > schema.at("maximum").get<double>())
            return path + ": above maximum " + schema.at("maximum").dump();
    }
    if (value.is_object()) {
        if (schema.contains("required"))
            for (const json& key : schema.at("required"))
                if (!value.contains(key.get<std::string>()))
                    return path + ": missing required property '" + key.get<std::string>() + "'";
        if (schema.contains("properties")) {
            for (auto it = value.begin(); it != value.end(); ++it) {
                const json& props = schema.at("properties");
                if (props.contains(it.key())) {
                    if (auto err = schema_check(props.at(it.key()), it.value(),
                                                path + "." + it.key()))
                        return err;
                } else if (schema.value("additionalProperties", json(true)) == json(false)) {
                    return path + ": unexpected property '" + it.key() + "'";
                }
            }
        }
    }
    return std::nullopt;
}

// --- tool schemas ------------------------------------------------------------

json run_sparql_query_input_schema() {
    return json{
        {"type", "object"},
        {"properties",
         {{"query",
           {{"type", "string"},
            {"description",
             "SPARQL SELECT or ASK query; name the target endpoint(s) with SERVICE clauses"}}},
          {"format", {{"type", "string"}, {"enum", json::array({"json"})}, {"default", "json"}}},
          {"timeout_seconds",
           {{"type", "integer"}, {"minimum", 1}, {"maximum", 600}, {"default", 30}}}}},
        {"required", json::array({"query"})},
        {"additionalProperties", false}};
}

json run_sparql_query_output_schema() {
    return json{{"type", "object"},
                {"properties",
                 {{"results", {{"type", "object"}, {"description", "SPARQL JSON results"}}},
                  {"stats", {{"type", "object"}, {"description", "per-endpoint execution report"}}},
                  {"truncated", {{"type", "boolean"}}},
                  {"result_handle",
                   {{"type", "string"},
                    {"description", "resource URI holding the untruncated results"}}}}},
                {"required", json::array({"results", "stats", "truncated"})}};
}

json get_void_input_schema() {
    return json{{"type", "object"},
                {"properties",
                 {{"endpoint", {{"type", "string"}, {"format", "uri"}}},
                  {"extended", {{"type", "boolean"}, {"default", false}}}}},
                {"required", json::array({"endpoint"})},
                {"additionalProperties", false}};
}

json get_void_output_schema() {
    return json{{"type", "object"},
                {"properties",
                 {{"void", {{"type", "string"}, {"description", "VoID description as Turtle"}}},
                  {"source",
                   {{"type", "string"}, {"enum", json::array({"cache", "retrieved", "computed"})}}}}},
                {"required", json::array({"void", "source"})}};
}

json list_endpoints_input_schema() {
    return json{{"type", "object"}, {"properties", json::object()}, {"additionalProperties", false}};
}

json list_endpoints_output_schema() {
    return json{
        {"type", "object"},
        {"properties",
         {{"endpoints",
           {{"type", "array"},
            {"items",
             {{"type", "object"},
              {"properties",
               {{"url", {{"type", "string"}}},
                {"label", {{"type", "string"}}},
                {"high_level_description", {{"type", "string"}}}}},
              {"required", json::array({"url", "label", "high_level_description"})}}}}}}},
        {"required", json::array({"endpoints"})}};
}

json tool_ok(json payload) {
    return json{{"content", json::array({{{"type", "text"}, {"text", payload.dump()}}})},
                {"structuredContent", std::move(payload)},
                {"isError", false}};
}

json tool_error(json error_payload) {
    json wrapped{{"error", std::move(error_payload)}};
    return json{{"content", json::array({{{"type", "text"}, {"text", wrapped.dump()}}})},
                {"structuredContent", wrapped},
                {"isError", true}};
}

std::string parse_error_category(sparql::ParseErrorKind k) {
    switch (k) {
    case sparql::ParseErrorKind::Syntax: return "syntax";
    case sparql::ParseErrorKind::UndefinedPrefix: return "undefined-prefix";
    case sparql::ParseErrorKind::MalformedService: return "malformed-service";
    case sparql::ParseErrorKind::UnsupportedFeature: return "unsupported-feature";
    }
    return "syntax";
}

} // namespace

struct McpServer::Session {
    fed::ExecStats accumulated;
    std::map<std::string, json> result_handles;
    std::size_t next_handle = 0;
    bool initialized = false;
};

struct McpServer::Impl {
    catalogue::Catalogue& cat;
    net::EndpointClient& client;
    McpConfig cfg;
    catalogue::VoidService void_service;

    std::mutex sessions_mutex;
    std::map<std::string, Session> sessions;
    std::atomic<std::size_t> session_counter{0};

    std::unique_ptr<httplib::Server> http;
    std::thread http_thread;

    Impl(catalogue::Catalogue& c, net::EndpointClient& cl, McpConfig conf)
        : cat(c), client(cl), cfg(std::move(conf)), void_service(cat, client) {}

    Session& session(const std::string& id) {
        // caller holds sessions_mutex
        return sessions[id];
    }

    json manifest() const {
        json tools = json::array();
        tools.push_back({{"name", "run_sparql_query"},
                         {"description",
                          "Execute a SPARQL query across one or more endpoints. Queries must "
                          "name their target endpoint(s) with SERVICE clauses; a single SERVICE "
                          "is unwrapped and sent directly, several are federated."},
                         {"inputSchema", run_sparql_query_input_schema()},
                         {"outputSchema", run_sparql_query_output_schema()}});
        tools.push_back({{"name", "get_void_descriptions"},
                         {"description",
                          "Fetch the VoID description of an endpoint: cached copy first, then "
                          "published descriptions, then recomputation via aggregate queries."},
                         {"inputSchema", get_void_input_schema()},
                         {"outputSchema", get_void_output_schema()}});
        tools.push_back({{"name", "list_endpoints"},
                         {"description",
                          "List registered endpoints with their one-sentence descriptions."},
                         {"inputSchema", list_endpoints_input_schema()},
                         {"outputSchema", list_endpoints_output_schema()}});
        return json{{"tools", tools}};
    }

    json resources(const std::string& session_id) {
        json out = json::array();
        for (const catalogue::CatalogueEntry& e : cat.entries())
            out.push_back({{"uri", e.url},
                           {"name", e.label.empty() ? e.url : e.label},
                           {"description", e.description},
                           {"mimeType", "application/json"}});
        std::lock_guard lk(sessions_mutex);
        auto it = sessions.find(session_id);
        if (it != sessions.end()) {
            for (const auto& [uri, _] : it->second.result_handles)
                out.push_back({{"uri", uri},
                               {"name", "stored query result"},
                               {"mimeType", "application/sparql-results+json"}});
            out.push_back({{"uri", "session:stats"},
                           {"name", "accumulated execution statistics"},
                           {"mimeType", "application/json"}});
        }
        return json{{"resources", out}};
    }

    json read_resource(const std::string& uri, const std::string& session_id) {
        if (uri == "session:stats") {
            std::lock_guard lk(sessions_mutex);
            return json{{"contents",
                         json::array({{{"uri", uri},
                                       {"mimeType", "application/json"},
                                       {"text", session(session_id).accumulated.to_json().dump()}}})}};
        }
        {
            std::lock_guard lk(sessions_mutex);
            auto& handles = session(session_id).result_handles;
            if (auto it = handles.find(uri); it != handles.end())
                return json{{"contents",
                             json::array({{{"uri", uri},
                                           {"mimeType", "application/sparql-results+json"},
                                           {"text", it->second.dump()}}})}};
        }
        if (auto entry = cat.find(uri)) {
            json body{{"url", entry->url},
                      {"label", entry->label},
                      {"high_level_description", entry->description}};
            return json{{"contents", json::array({{{"uri", uri},
                                                   {"mimeType", "application/json"},
                                                   {"text", body.dump()}}})}};
        }
        throw std::out_of_range("unknown resource: " + uri);
    }

    // --- tools ---------------------------------------------------------------

    json call_run_sparql_query(const json& args, const std::string& session_id) {
        std::chrono::milliseconds timeout = cfg.default_timeout;
        if (args.contains("timeout_seconds"))
            timeout = std::chrono::seconds(args.at("timeout_seconds").get<long>());

        fed::FederationEngine engine(client, &cat);
        try {
            fed::RunResult run = engine.run_federated(args.at("query").get<std::string>(), timeout,
                                                      cfg.engine);
            {
                std::lock_guard lk(sessions_mutex);
                auto& acc = session(session_id).accumulated;
                for (const auto& [url, pe] : run.stats.endpoints) {
                    auto& slot = acc.endpoints[url];
                    slot.requests += pe.requests;
                    slot.rows += pe.rows;
                    slot.elapsed += pe.elapsed;
                    slot.errors += pe.errors;
                }
                acc.remote_fetches += run.stats.remote_fetches;
                acc.total_elapsed += run.stats.total_elapsed;
            }

            json payload;
            payload["stats"] = run.stats.to_json();
            bool truncated = false;
            if (run.ask.has_value()) {
                payload["results"] = net::ask_to_json(*run.ask);
            } else {
                rdf::SolutionSet rows = std::move(*run.solutions);
                json full = net::solutions_to_json(rows);
                if (rows.rows.size() > cfg.result_row_cap) {
                    truncated = true;
                    rows.rows.resize(cfg.result_row_cap);
                    std::string uri;
                    {
                        std::lock_guard lk(sessions_mutex);
                        Session& s = session(session_id);
                        uri = "result://" + session_id + "/" + std::to_string(s.next_handle++);
                        s.result_handles[uri] = full;
                    }
                    payload["result_handle"] = uri;
                }
                payload["results"] = net::solutions_to_json(rows);
            }
            payload["truncated"] = truncated;
            return tool_ok(std::move(payload));
        } catch (const sparql::QueryParseError& e) {
            return tool_error(json{{"kind", "parse-error"},
                                   {"category", parse_error_category(e.kind())},
                                   {"message", e.what()},
                                   {"line", e.line()},
                                   {"column", e.column()}});
        } catch (const fed::FedError& e) {
            json payload{{"kind", fed::to_string(e.kind())},
                         {"message", e.what()},
                         {"stats", e.stats.to_json()}};
            if (e.cause())
                payload["endpoint_error"] = {{"kind", net::to_string(e.cause()->kind)},
                                             {"status", e.cause()->status},
                                             {"message", e.cause()->message}};
            return tool_error(std::move(payload));
        }
    }

    json call_get_void(const json& args) {
        std::string endpoint = args.at("endpoint").get<std::string>();
        if (!net::parse_url(endpoint))
            return tool_error(
                json{{"kind", "invalid-endpoint"},
                     {"message", "endpoint must be an absolute http(s) IRI: " + endpoint}});
        if (!cat.has(endpoint)) {
            // Directly reachable endpoints may be used ad hoc; register with an
            // empty description so the cache has a home.
            try {
                cat.register_endpoint(endpoint, "", "");
            } catch (const std::exception&) {
            }
        }
        catalogue::VoidOptions opts = cfg.void_defaults;
        opts.extended = args.value("extended", false);
        try {
            catalogue::VoidResult result = void_service.get(endpoint, opts);
            return tool_ok(json{{"void", result.turtle},
                                {"source", catalogue::to_string(result.source)}});
        } catch (const catalogue::VoidError& e) {
            return tool_error(json{{"kind", net::to_string(e.underlying().kind)},
                                   {"message", e.what()}});
        }
    }

    json call_list_endpoints() {
        json endpoints = json::array();
        for (const catalogue::CatalogueEntry& e : cat.entries())
            endpoints.push_back({{"url", e.url},
                                 {"label", e.label},
                                 {"high_level_description", e.description}});
        return tool_ok(json{{"endpoints", endpoints}});
    }

    json dispatch_tool(const std::string& name, const json& args, const std::string& session_id) {
        json schema;
        if (name == "run_sparql_query")
            schema = run_sparql_query_input_schema();
        else if (name == "get_void_descriptions")
            schema = get_void_input_schema();
        else if (name == "list_endpoints")
            schema = list_endpoints_input_schema();
        else
            throw std::out_of_range("unknown tool: " + name);

        if (auto err = schema_check(schema, args, "arguments"))
            return tool_error(json{{"kind", "invalid-arguments"}, {"message", *err}});

        if (name == "run_sparql_query") return call_run_sparql_query(args, session_id);
        if (name == "get_void_descriptions") return call_get_void(args);
        return call_list_endpoints();
    }
};

McpServer::McpServer(catalogue::Catalogue& cat, net::EndpointClient& client, McpConfig cfg)
    : impl_(std::make_unique<Impl>(cat, client, std::move(cfg))) {}

McpServer::~McpServer() { stop_http(); }

nlohmann::json McpServer::tool_manifest() const { return impl_->manifest(); }

std::optional<json> McpServer::handle(const json& message, const std::string& session_id) {
    json id = message.contains("id") ? message.at("id") : json(nullptr);
    bool is_notification = !message.contains("id");

    if (!message.is_object() || message.value("jsonrpc", "") != "2.0" ||
        !message.contains("method") || !message.at("method").is_string()) {
        if (is_notification) return std::nullopt;
        return rpc_error(id, -32600, "invalid JSON-RPC 2.0 request");
    }
    std::string method = message.at("method").get<std::string>();
    json params = message.value("params", json::object());

    try {
        if (method == "initialize") {
            {
                std::lock_guard lk(impl_->sessions_mutex);
                impl_->session(session_id).initialized = true;
            }
            return rpc_result(
                id, json{{"protocolVersion", kProtocolVersion},
                         {"capabilities",
                          {{"tools", json::object()}, {"resources", json::object()},
                           {"prompts", json::object()}}},
                         {"serverInfo",
                          {{"name", impl_->cfg.server_name},
                           {"version", impl_->cfg.server_version}}}});
        }
        if (method == "notifications/initialized" || method == "initialized") return std::nullopt;
        if (method == "ping") return rpc_result(id, json::object());
        if (method == "tools/list" || method == "mcp_discover") {
            return rpc_result(id, impl_->manifest());
        }
        if (method == "tools/call" || method == "run_tool") {
            if (!params.contains("name") || !params.at("name").is_string())
                return rpc_error(id, -32602, "tools/call requires a 'name' parameter");
            json args = params.value("arguments", json::object());
            try {
                return rpc_result(
                    id, impl_->dispatch_tool(params.at("name").get<std::string>(), args, session_id));
            } catch (const std::out_of_range& e) {
                return rpc_error(id, -32602, e.what());
            }
        }
        if (method == "resources/list") return rpc_result(id, impl_->resources(session_id));
        if (method == "resources/read" || method == "get_resource") {
            if (!params.contains("uri"))
                return rpc_error(id, -32602, "resources/read requires a 'uri' parameter");
            try {
                return rpc_result(
                    id, impl_->read_resource(params.at("uri").get<std::string>(), session_id));
            } catch (const std::out_of_range& e) {
                return rpc_error(id, -32602, e.what());
            }
        }
        if (method == "prompts/list") return rpc_result(id, json{{"prompts", json::array()}});
        if (is_notification) return std::nullopt;
        return rpc_error(id, -32601, "method not found: " + method);
    } catch (const std::exception& e) {
        if (is_notification) return std::nullopt;
        return rpc_error(id, -32603, std::string("internal error: ") + e.what());
    }
}

std::optional<json> McpServer::handle_text(const std::string& line, const std::string& session_id) {
    json message;
    try {
        message = json::parse(line);
    } catch (const json::parse_error& e) {
        return rpc_error(json(nullptr), -32700, std::string("parse error: ") + e.what());
    }
    return handle(message, session_id);
}

void McpServer::run_stdio(std::istream& in, std::ostream& out) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto response = handle_text(line, "stdio");
        if (response) {
            out << response->dump() << "\n";
            out.flush();
        }
    }
}

std::string McpServer::serve_http(int port) {
    impl_->http = std::make_unique<httplib::Server>();
    impl_->http->Post("/mcp", [this](const httplib::Request& req, httplib::Response& res) {
        std::string session = req.get_header_value("Mcp-Session-Id");
        if (session.empty())
            session = "http-" + std::to_string(impl_->session_counter.fetch_add(1) + 1);
        auto response = handle_text(req.body, session);
        res.set_header("Mcp-Session-Id", session);
        if (response)
            res.set_content(response->dump(), "application/json");
        else
            res.status = 202; // notification accepted, nothing to say
    });
    int bound = port;
    if (port == 0) {
        bound = impl_->http->bind_to_any_port("127.0.0.1");
        if (bound <= 0) throw std::runtime_error("mcp: failed to bind a port");
    } else if (!impl_->http->bind_to_port("127.0.0.1", port)) {
        throw std::runtime_error("mcp: failed to bind port " + std::to_string(port));
    }
    auto* server = impl_->http.get();
    impl_->http_thread = std::thread([server] { server->listen_after_bind(); });
    impl_->http->wait_until_ready();
    return "http://127.0.0.1:" + std::to_string(bound) + "/mcp";
}

void McpServer::stop_http() {
    if (impl_ && impl_->http) {
        impl_->http->stop();
        if (impl_->http_thread.joinable()) impl_->http_thread.join();
        impl_->http.reset();
    }
}

} // namespace fedsparql::mcp
