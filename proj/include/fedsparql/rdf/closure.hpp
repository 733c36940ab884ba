#pragma once

#include "fedsparql/rdf/graph.hpp"

namespace fedsparql::rdf {

/// Adds every (x, rdf:type, C) triple derivable from rdfs:domain / rdfs:range
/// axioms in the ontology graph, applied to fixpoint. Literal objects are
/// never typed. Returns the extended graph; the input graphs are untouched.
Graph infer_type_closure(const Graph& data, const Graph& ontology);

} // namespace fedsparql::rdf
