#pragma once

#include "fedsparql/rdf/graph.hpp"

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fedsparql::sim {

struct SimFeatures {
    bool values = true;
    bool service = true;
    bool aggregates = true;
};

enum class Availability { Up, Down, Flaky };
enum class VoidPublish { None, WellKnown, DefaultGraph, NamedGraph };

struct SimConfig {
    int port = 0; // 0 = pick a free port
    SimFeatures features;
    std::optional<std::size_t> result_limit;
    std::chrono::milliseconds latency{0};
    Availability availability = Availability::Up;
    double flaky_probability = 0.0; // drop probability in Flaky mode
    VoidPublish publish_void = VoidPublish::None;
    std::size_t log_capacity = 1000;
    unsigned rng_seed = 1;
    std::string label;
};

struct LogEntry {
    std::chrono::system_clock::time_point time;
    std::string query; // query text, or the request path for non-query requests
    int status = 0;
};

/// In-process SPARQL endpoint over HTTP serving one graph, with configurable
/// feature restrictions and fault injection. Restricted features answer
/// HTTP 400 with a message naming the offending keyword. Every handled
/// request is appended to a bounded log; a Down endpoint drops connections
/// before logging anything.
class Simulator {
  public:
    Simulator(rdf::Graph graph, SimConfig config = {});
    ~Simulator();
    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    /// Binds and starts serving; returns the endpoint URL. Throws on bind failure.
    std::string start();
    void stop();

    const std::string& url() const;
    int port() const;

    std::vector<LogEntry> request_log() const;
    void clear_log();

    void set_availability(Availability a, double flaky_probability = 0.0);
    void set_latency(std::chrono::milliseconds latency);

    const rdf::Graph& graph() const;
    const SimConfig& config() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace fedsparql::sim
