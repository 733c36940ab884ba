#pragma once

#include "fedsparql/rdf/graph.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fedsparql::catalogue {

/// Statistics of one dataset in VoID terms: totals plus class/property
/// partitions, optionally with linksets towards other datasets.
struct VoidDescription {
    std::string dataset_node; // IRI of the void:Dataset node
    std::uint64_t triples = 0;
    std::vector<std::pair<std::string, std::uint64_t>> class_partitions;    // class IRI -> entities
    std::vector<std::pair<std::string, std::uint64_t>> property_partitions; // property IRI -> triples
    std::uint64_t distinct_subjects = 0;
    std::uint64_t distinct_objects = 0;

    struct Linkset {
        std::string link_predicate;
        std::string objects_target; // dataset/endpoint the objects resolve into
        std::uint64_t triples = 0;
    };
    std::vector<Linkset> linksets;

    /// Set when some statistics could not be obtained (partial results).
    bool incomplete = false;

    rdf::Graph to_graph() const;
    std::string to_turtle() const;

    /// Reads the first void:Dataset node (or `node_hint` if given) out of a
    /// VoID graph. Returns nullopt when the graph carries no usable dataset.
    static std::optional<VoidDescription> from_graph(const rdf::Graph& g,
                                                     const std::string& node_hint = "");
};

/// Direct per-graph statistics (no SPARQL involved): the generator path used
/// when shards are described from their in-memory graphs.
VoidDescription describe_graph(const rdf::Graph& g, const std::string& dataset_node);

} // namespace fedsparql::catalogue
