#pragma once

#include "fedsparql/rdf/eval.hpp"
#include "fedsparql/rdf/graph.hpp"
#include "fedsparql/rdf/solution.hpp"
#include "fedsparql/sparql/ast.hpp"

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>

namespace fedsparql::sparql {

/// Raised for evaluation-level failures (e.g. SERVICE delegation the local
/// evaluator cannot perform). Expression type errors are not exceptions; they
/// drop the row per SPARQL semantics.
class EvalError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A default graph plus named graphs, as served by one endpoint.
struct Dataset {
    const rdf::Graph* default_graph = nullptr;
    std::map<std::string, const rdf::Graph*> named;
};

/// Hook for SERVICE evaluation. Returning nullopt means the delegation failed;
/// the evaluator then yields an empty solution for SILENT and raises otherwise.
using ServiceResolver =
    std::function<std::optional<rdf::SolutionSet>(const std::string& endpoint, const Pattern& body)>;

struct EvalOptions {
    ServiceResolver service_resolver;
};

struct QueryResult {
    bool is_ask = false;
    bool ask = false;
    rdf::SolutionSet solutions;
};

QueryResult eval_query(const Dataset& ds, const Query& q, const EvalOptions& opts = {});

rdf::SolutionSet eval_pattern(const Dataset& ds, const rdf::Graph& active, const Pattern& p,
                              const EvalOptions& opts);

/// Effective boolean value of a filter expression. nullopt = type error.
std::optional<bool> filter_accepts(const Expr& e, const rdf::Binding& b);

/// The solution modifiers of a query (aggregation, DISTINCT, slice, projection),
/// shared between the local evaluator and the federation engine.
struct Modifiers {
    bool distinct = false;
    bool select_star = false;
    std::vector<std::string> projection;
    std::optional<CountSpec> count;
    std::vector<std::string> group_by;
    std::optional<long long> limit;
    std::optional<long long> offset;
};

Modifiers modifiers_of(const Query& q);

/// Applies aggregation -> projection -> DISTINCT -> OFFSET -> LIMIT.
/// `visible_vars` is the in-scope variable list used for SELECT *.
rdf::SolutionSet apply_modifiers(rdf::SolutionSet rows, const Modifiers& m,
                                 const std::vector<std::string>& visible_vars);

/// True when the literal's datatype is one of the XSD numeric types this
/// toolkit compares by value inside FILTER.
bool is_numeric_literal(const rdf::Term& t);

} // namespace fedsparql::sparql
