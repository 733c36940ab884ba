#pragma once

#include "fedsparql/net/endpoint_client.hpp"
#include "fedsparql/rdf/graph.hpp"

#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedsparql::catalogue {

class DuplicateEndpoint : public std::runtime_error {
  public:
    explicit DuplicateEndpoint(const std::string& url)
        : std::runtime_error("endpoint already registered: " + url) {}
};

struct CatalogueEntry {
    std::string url;
    std::string label;
    std::string description; // opaque one-sentence text shown to agents
    std::optional<net::Capabilities> capabilities;
    std::optional<std::int64_t> void_cached_at = std::nullopt; // unix seconds
};

/// Endpoint registry with a file-backed VoID cache: one Turtle file per
/// endpoint under the cache directory, named by a stable hash of the URL,
/// plus a JSON registry index. Reads return copies; writes are serialized.
class Catalogue {
  public:
    Catalogue() = default;
    Catalogue(const Catalogue& other);
    Catalogue& operator=(const Catalogue& other);

    CatalogueEntry register_endpoint(const std::string& url, const std::string& label,
                                     const std::string& description);
    bool has(const std::string& url) const;
    std::optional<CatalogueEntry> find(const std::string& url) const;
    std::vector<CatalogueEntry> entries() const;
    std::vector<std::string> endpoint_urls() const;
    std::size_t size() const;

    void set_capabilities(const std::string& url, const net::Capabilities& caps);

    // --- VoID cache -----------------------------------------------------

    /// Directory for cached VoID files; created on demand.
    void set_cache_dir(const std::string& dir);
    const std::string& cache_dir() const { return cache_dir_; }
    std::string void_cache_path(const std::string& url) const;

    std::optional<rdf::Graph> cached_void(const std::string& url) const;
    void store_void(const std::string& url, const rdf::Graph& g);
    void invalidate_void(const std::string& url);

    /// Optional TTL for cached VoID descriptions; absent = never expires.
    std::optional<std::int64_t> void_ttl_seconds;

    // --- persistence ------------------------------------------------------

    void save(const std::string& registry_path) const;
    static Catalogue load(const std::string& registry_path);

  private:
    std::vector<CatalogueEntry> entries_;
    std::string cache_dir_;
    mutable std::mutex mutex_;
};

} // namespace fedsparql::catalogue
