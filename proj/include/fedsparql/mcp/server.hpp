#pragma once

#include "fedsparql/catalogue/catalogue.hpp"
#include "fedsparql/catalogue/void_service.hpp"
#include "fedsparql/fed/engine.hpp"
#include "fedsparql/net/endpoint_client.hpp"

#include <json.hpp>

#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace fedsparql::mcp {

struct McpConfig {
    std::string server_name = "fedsparql";
    std::string server_version = "0.1.0";
    std::size_t result_row_cap = 1000; // rows embedded in a tool response
    std::chrono::milliseconds default_timeout{30000};
    fed::EngineOptions engine;
    catalogue::VoidOptions void_defaults;
};

/// JSON-RPC 2.0 server exposing the federation engine and the VoID subsystem
/// as MCP tools: run_sparql_query, get_void_descriptions and list_endpoints.
/// Methods: initialize, ping, tools/list, tools/call, resources/list,
/// resources/read (legacy aliases mcp_discover, run_tool and get_resource are
/// accepted). Transports: newline-delimited stdio and HTTP POST /mcp with
/// sessions keyed by the Mcp-Session-Id header.
class McpServer {
  public:
    McpServer(catalogue::Catalogue& cat, net::EndpointClient& client, McpConfig cfg = {});
    ~McpServer();

    /// One request or notification; nullopt when no response is due.
    std::optional<nlohmann::json> handle(const nlohmann::json& message,
                                         const std::string& session_id);

    /// One line of input; malformed JSON yields a -32700 error response.
    std::optional<nlohmann::json> handle_text(const std::string& line,
                                              const std::string& session_id);

    void run_stdio(std::istream& in, std::ostream& out);

    /// Starts the HTTP transport in a background thread; returns the URL.
    std::string serve_http(int port);
    void stop_http();

    nlohmann::json tool_manifest() const;

  private:
    struct Session;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace fedsparql::mcp
