#pragma once

#include "fedsparql/catalogue/catalogue.hpp"
#include "fedsparql/net/endpoint_client.hpp"
#include "fedsparql/sparql/eval.hpp"

#include <json.hpp>

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fedsparql::fed {

struct ExecStats {
    struct PerEndpoint {
        std::size_t requests = 0;
        std::size_t rows = 0;
        std::chrono::milliseconds elapsed{0};
        std::size_t errors = 0;
    };
    std::map<std::string, PerEndpoint> endpoints;
    bool trivial_federation = false;
    std::size_t remote_fetches = 0;
    std::chrono::milliseconds total_elapsed{0};

    std::vector<std::string> endpoints_consulted() const;
    nlohmann::json to_json() const;
};

enum class JoinStrategy { Hash, Bound };

struct EngineOptions {
    JoinStrategy strategy = JoinStrategy::Hash;
    std::chrono::milliseconds per_request_timeout{30000};
    std::size_t bound_batch_size = 50; // bindings per VALUES block
    std::size_t row_cap = 100000;
};

class FedError : public std::runtime_error {
  public:
    enum class Kind { ZeroService, NestedService, UnsupportedPattern, Execution, Deadline };

    FedError(Kind kind, std::string message, std::optional<net::EndpointError> cause = std::nullopt)
        : std::runtime_error(std::move(message)), kind_(kind), cause_(std::move(cause)) {}

    Kind kind() const { return kind_; }
    const std::optional<net::EndpointError>& cause() const { return cause_; }

    ExecStats stats; // snapshot attached by run_federated on failure

  private:
    Kind kind_;
    std::optional<net::EndpointError> cause_;
};

std::string to_string(FedError::Kind k);

// ---------------------------------------------------------------------------
// Plans.
// ---------------------------------------------------------------------------

struct PlanUnit;
using PlanPtr = std::shared_ptr<const PlanUnit>;

struct PlanUnit {
    enum class Kind { RemoteFetch, LocalJoin, LocalUnion, LocalFilter, LocalModifiers };
    Kind kind = Kind::RemoteFetch;

    // RemoteFetch
    std::string endpoint;
    sparql::PatternPtr body;              // pattern sent to the endpoint
    std::vector<std::string> output_vars; // narrowed projection; empty = SELECT *
    bool silent = false;

    // LocalJoin
    PlanPtr left, right;
    std::vector<std::string> shared_vars;

    // LocalUnion
    std::vector<PlanPtr> children;

    // LocalFilter
    PlanPtr child;
    sparql::ExprPtr filter;

    // LocalModifiers
    sparql::Modifiers modifiers;
    std::vector<std::string> visible_vars;
};

struct FederatedPlan {
    PlanPtr root;
    std::size_t remote_fetch_count = 0;
    bool is_ask = false;
};

/// Turns a multi-SERVICE query into a plan: each maximal SERVICE subtree
/// becomes a RemoteFetch with projection narrowed to variables consumed
/// elsewhere; joins are ordered fewest-variables/constants-heavy first with
/// shared-variable connectivity preferred; endpoint-local FILTERs are pushed
/// into their fetch. Zero-SERVICE queries and SERVICE-inside-SERVICE raise.
FederatedPlan decompose(const sparql::Query& q);

struct RunResult {
    std::optional<rdf::SolutionSet> solutions;
    std::optional<bool> ask;
    ExecStats stats;
};

/// Dispatch per the SERVICE count: exactly one SERVICE is unwrapped and sent
/// directly to the endpoint; two or more go through decompose/execute; zero
/// is an error telling the caller to name target endpoints with SERVICE.
class FederationEngine {
  public:
    explicit FederationEngine(net::EndpointClient& client,
                              const catalogue::Catalogue* catalogue = nullptr)
        : client_(client), catalogue_(catalogue) {}

    RunResult run_federated(const std::string& query_text, std::chrono::milliseconds deadline,
                            const EngineOptions& opts = {});

    RunResult run_federated(const sparql::Query& query, std::chrono::milliseconds deadline,
                            const EngineOptions& opts = {});

    RunResult execute_plan(const FederatedPlan& plan, const sparql::Query& query,
                           std::chrono::milliseconds deadline, const EngineOptions& opts = {});

    /// True iff the query is structurally the trivial federation over all
    /// registered endpoints.
    bool stats_classify_trivial(const sparql::Query& q) const;

  private:
    net::EndpointClient& client_;
    const catalogue::Catalogue* catalogue_;
};

} // namespace fedsparql::fed
