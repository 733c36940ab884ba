#pragma once

#include "fedsparql/rdf/solution.hpp"

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <variant>

namespace fedsparql::net {

struct QueryRequest {
    std::string query;
    std::chrono::milliseconds timeout{30000};
    int max_retries = 1;          // unavailable-only; never applied to timeouts
    std::size_t row_cap = 100000; // client-side guard, sets `truncated` when hit
};

enum class ErrorKind { Timeout, Unavailable, HttpStatus, MalformedResults, FeatureUnsupported };

std::string to_string(ErrorKind k);

struct EndpointError {
    ErrorKind kind = ErrorKind::Unavailable;
    int status = 0; // HTTP status when kind == HttpStatus / FeatureUnsupported
    std::string message;
    std::chrono::milliseconds elapsed{0};
};

struct QueryOutcome {
    std::optional<rdf::SolutionSet> solutions;
    std::optional<bool> ask;
    std::optional<EndpointError> error;
    bool truncated = false;
    std::chrono::milliseconds elapsed{0};

    bool ok() const { return !error.has_value(); }
};

struct Capabilities {
    bool values = true;
    bool service = true;
    bool aggregates = true;
    std::optional<std::size_t> result_limit;
};

struct ClientOptions {
    int per_endpoint_concurrency = 4;
    std::chrono::milliseconds retry_backoff{250};
};

/// SPARQL-protocol client: GET for short queries, form-encoded POST beyond
/// kGetThresholdBytes, JSON results only. Shareable across threads; enforces
/// a per-endpoint in-flight request limit.
class EndpointClient {
  public:
    explicit EndpointClient(ClientOptions opts = {});
    ~EndpointClient();
    EndpointClient(const EndpointClient&) = delete;
    EndpointClient& operator=(const EndpointClient&) = delete;

    QueryOutcome execute(const std::string& endpoint_url, const QueryRequest& req);

    /// Three canary queries: VALUES, SERVICE SILENT to self, and a large-LIMIT
    /// scan cross-checked against COUNT(*) to spot server-side row caps.
    std::variant<Capabilities, EndpointError> probe_capabilities(const std::string& endpoint_url);

    static constexpr std::size_t kGetThresholdBytes = 1500;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Plain document fetch (e.g. /.well-known/void). nullopt on any failure.
std::optional<std::string> http_get_text(const std::string& url, std::chrono::milliseconds timeout,
                                         const std::string& accept = "text/turtle");

} // namespace fedsparql::net
