#pragma once

#include "fedsparql/sparql/ast.hpp"

#include <stdexcept>
#include <string>

namespace fedsparql::sparql {

/// Categories let callers (and agent-facing tool errors) tell apart plain
/// syntax errors, prefix problems, malformed SERVICE clauses and features
/// that are outside the supported subset.
enum class ParseErrorKind { Syntax, UndefinedPrefix, MalformedService, UnsupportedFeature };

class QueryParseError : public std::runtime_error {
  public:
    QueryParseError(ParseErrorKind kind, std::string message, std::size_t line, std::size_t column)
        : std::runtime_error(message + " at line " + std::to_string(line) + ", column " +
                             std::to_string(column)),
          kind_(kind), line_(line), column_(column) {}

    ParseErrorKind kind() const { return kind_; }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

  private:
    ParseErrorKind kind_;
    std::size_t line_, column_;
};

/// Parses the supported SPARQL subset: SELECT/ASK, DISTINCT, COUNT aggregates
/// with GROUP BY, BGP, SERVICE [SILENT], UNION, FILTER, VALUES, GRAPH,
/// LIMIT/OFFSET. Anything else raises UnsupportedFeature naming the feature.
Query parse_query(const std::string& text);

} // namespace fedsparql::sparql
