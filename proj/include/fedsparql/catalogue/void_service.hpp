#pragma once

#include "fedsparql/catalogue/catalogue.hpp"
#include "fedsparql/catalogue/void_description.hpp"
#include "fedsparql/net/endpoint_client.hpp"

#include <chrono>
#include <stdexcept>

namespace fedsparql::catalogue {

enum class VoidSource { Cache, Retrieved, Computed };

std::string to_string(VoidSource s);

struct VoidResult {
    VoidDescription description;
    VoidSource source = VoidSource::Computed;
    std::string turtle;
};

class VoidError : public std::runtime_error {
  public:
    VoidError(std::string message, net::EndpointError underlying)
        : std::runtime_error(std::move(message)), underlying_(std::move(underlying)) {}
    const net::EndpointError& underlying() const { return underlying_; }

  private:
    net::EndpointError underlying_;
};

struct VoidOptions {
    bool extended = false;       // additionally compute linksets
    bool refresh = false;        // bypass the cache
    bool exact_linksets = false; // membership checks against target endpoints
    std::chrono::milliseconds timeout{30000};
    std::size_t scan_page_size = 1000; // paged fallback when aggregates are unsupported
};

/// Step-wise VoID acquisition: (1) cached copy, (2) published description
/// (well-known URL, default graph, named graphs, service-description links),
/// (3) recomputation through self-descriptive aggregate queries, with a paged
/// full-scan fallback for endpoints without COUNT support. Every non-cache
/// result is written back to the catalogue's cache.
class VoidService {
  public:
    VoidService(Catalogue& catalogue, net::EndpointClient& client)
        : catalogue_(catalogue), client_(client) {}

    /// Throws VoidError when the endpoint is unreachable and nothing is cached.
    VoidResult get(const std::string& endpoint_url, const VoidOptions& opts = {});

    std::optional<VoidDescription> retrieve(const std::string& endpoint_url,
                                            std::chrono::milliseconds timeout);

    VoidDescription compute(const std::string& endpoint_url, const VoidOptions& opts);

  private:
    void compute_linksets(const std::string& endpoint_url, VoidDescription& desc,
                          const VoidOptions& opts);

    Catalogue& catalogue_;
    net::EndpointClient& client_;
};

} // namespace fedsparql::catalogue
