#pragma once

#include "fedsparql/rdf/graph.hpp"
#include "fedsparql/rdf/pattern.hpp"
#include "fedsparql/rdf/solution.hpp"

namespace fedsparql::rdf {

/// Reference BGP evaluator: returns every binding mu with mu(bgp) contained
/// in the graph. An empty BGP yields exactly one empty binding. This is the
/// local oracle that federated execution is checked against.
SolutionSet eval_bgp(const Graph& g, const Bgp& bgp);

/// Compatible-mapping join of two solution sets (shared variables must agree).
SolutionSet join_solutions(const SolutionSet& left, const SolutionSet& right);

} // namespace fedsparql::rdf
