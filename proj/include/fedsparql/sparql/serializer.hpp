#pragma once

#include "fedsparql/sparql/ast.hpp"

#include <map>
#include <string>

namespace fedsparql::sparql {

/// Serializes to SPARQL text accepted by mainstream endpoints. Emits absolute
/// IRIs in angle brackets unless a prefix table (prefix -> namespace IRI) is
/// supplied. parse_query(serialize_query(q)) is structurally equal to q.
std::string serialize_query(const Query& q,
                            const std::map<std::string, std::string>* prefixes = nullptr);

std::string serialize_pattern(const Pattern& p,
                              const std::map<std::string, std::string>* prefixes = nullptr);

std::string serialize_expr(const Expr& e,
                           const std::map<std::string, std::string>* prefixes = nullptr);

} // namespace fedsparql::sparql
