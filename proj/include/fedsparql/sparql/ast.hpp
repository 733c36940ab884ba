#pragma once

#include "fedsparql/rdf/pattern.hpp"
#include "fedsparql/rdf/term.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fedsparql::sparql {

// ---------------------------------------------------------------------------
// Filter expressions: comparisons, boolean connectives, regex.
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Var, Const, Compare, And, Or, Not, Regex };
    Kind kind = Kind::Var;
    std::string var;   // Var
    rdf::Term value;   // Const
    std::string op;    // Compare: = != < <= > >=
    ExprPtr a, b, c;   // operands; c is the optional regex flags
};

ExprPtr expr_var(std::string name);
ExprPtr expr_const(rdf::Term value);
ExprPtr expr_compare(std::string op, ExprPtr a, ExprPtr b);
ExprPtr expr_and(ExprPtr a, ExprPtr b);
ExprPtr expr_or(ExprPtr a, ExprPtr b);
ExprPtr expr_not(ExprPtr a);
ExprPtr expr_regex(ExprPtr text, ExprPtr pattern, ExprPtr flags = nullptr);

bool expr_equal(const ExprPtr& a, const ExprPtr& b);
void expr_variables(const ExprPtr& e, std::vector<std::string>& out);

// ---------------------------------------------------------------------------
// Graph patterns.
// ---------------------------------------------------------------------------

struct Pattern;
using PatternPtr = std::shared_ptr<const Pattern>;

struct ValuesBlock {
    std::vector<std::string> vars;
    // nullopt = UNDEF
    std::vector<std::vector<std::optional<rdf::Term>>> rows;

    friend bool operator==(const ValuesBlock&, const ValuesBlock&) = default;
};

struct Pattern {
    enum class Kind { Basic, Service, Union, Join, Filter, Values, NamedGraph };
    Kind kind = Kind::Basic;

    rdf::Bgp bgp;                         // Basic
    std::string service_endpoint;         // Service: absolute IRI
    bool service_silent = false;
    std::vector<PatternPtr> children;     // Union/Join members; [0] for Service/Filter/NamedGraph
    ExprPtr filter;                       // Filter
    ValuesBlock values;                   // Values
    std::optional<std::string> graph_var; // NamedGraph target (exactly one of these two)
    std::optional<std::string> graph_iri;

    const PatternPtr& child() const { return children.front(); }
};

PatternPtr make_basic(rdf::Bgp bgp);
PatternPtr make_service(std::string endpoint, PatternPtr body, bool silent = false);
PatternPtr make_union(std::vector<PatternPtr> branches);
PatternPtr make_join(std::vector<PatternPtr> parts);
PatternPtr make_filter(PatternPtr body, ExprPtr condition);
PatternPtr make_values(ValuesBlock block);
PatternPtr make_named_graph_var(std::string var, PatternPtr body);
PatternPtr make_named_graph_iri(std::string iri, PatternPtr body);

bool pattern_equal(const PatternPtr& a, const PatternPtr& b);

/// In-scope variable names in first-appearance order (filter-only variables excluded).
std::vector<std::string> pattern_variables(const Pattern& p);

// ---------------------------------------------------------------------------
// Queries.
// ---------------------------------------------------------------------------

struct CountSpec {
    bool distinct = false;
    std::optional<std::string> var; // nullopt = COUNT(*)
    std::string alias;

    friend bool operator==(const CountSpec&, const CountSpec&) = default;
};

struct Query {
    enum class Form { Select, Ask };
    Form form = Form::Select;
    bool distinct = false;
    bool select_star = false;
    std::vector<std::string> projection; // plain variables, in order
    std::optional<CountSpec> count;
    std::vector<std::string> group_by;
    PatternPtr pattern;
    std::optional<long long> limit;
    std::optional<long long> offset;
    std::vector<std::pair<std::string, std::string>> prefixes; // as parsed, for re-serialization
};

/// Structural equality modulo prefix tables.
bool query_equal(const Query& a, const Query& b);

} // namespace fedsparql::sparql
