#pragma once

#include "fedsparql/rdf/graph.hpp"

namespace fedsparql::rdf {

/// True when the graphs are equal up to a bijective renaming of blank nodes.
/// Backtracking search; fine for the fixture sizes this toolkit deals with.
bool isomorphic(const Graph& a, const Graph& b);

} // namespace fedsparql::rdf
