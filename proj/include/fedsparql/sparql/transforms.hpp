#pragma once

#include "fedsparql/sparql/ast.hpp"

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedsparql::sparql {

class TransformError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Number of SERVICE nodes anywhere in the pattern tree.
int count_services(const Pattern& p);
int count_services(const Query& q);

/// Endpoint IRIs mentioned by SERVICE nodes, in first-appearance order.
std::vector<std::string> service_endpoints(const Pattern& p);

/// For a query with exactly one SERVICE node (and none nested below it),
/// returns the endpoint IRI and the query with the SERVICE wrapper removed;
/// projection and modifiers are preserved.
std::pair<std::string, Query> unwrap_single_service(const Query& q);

/// Wraps every triple pattern of the BGP in a UNION of SERVICE calls over all
/// endpoints, joined conjunctively: { UNION_e(SERVICE e {t1}), ... }.
/// A single-endpoint UNION collapses to the bare SERVICE node.
PatternPtr build_trivial_federation(const rdf::Bgp& bgp, const std::vector<std::string>& endpoints);

struct SplitReport {
    bool conjunctive = false;
    bool disjunctive = false;
    std::vector<std::string> endpoints;
};

/// Reports whether the pattern exhibits a conjunctive split (join across
/// SERVICEs to distinct endpoints), a disjunctive split (UNION of SERVICEs
/// over the same body), and the endpoints mentioned.
SplitReport classify_splits(const Pattern& p);

/// True iff the pattern is structurally a trivial federation over exactly the
/// given endpoint set: each join component is a UNION of SERVICEs covering
/// every endpoint, all branches of a component wrapping the same single
/// triple pattern.
bool is_trivial_federation(const Pattern& p, const std::vector<std::string>& endpoints);

} // namespace fedsparql::sparql
