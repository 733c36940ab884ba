#pragma once

#include "fedsparql/rdf/graph.hpp"

#include <map>
#include <stdexcept>
#include <string>

namespace fedsparql::rdf {

/// Syntax error with the 1-based position where parsing failed.
class TurtleParseError : public std::runtime_error {
  public:
    TurtleParseError(std::string message, std::size_t line, std::size_t column)
        : std::runtime_error(message + " at line " + std::to_string(line) + ", column " +
                             std::to_string(column)),
          line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

  private:
    std::size_t line_, column_;
};

struct TurtleOptions {
    /// Blank-node labels are file-scoped; when a document id is given they are
    /// skolemized to "<hash(document_id)>_<label>" so that hashing and shard
    /// assignment stay stable across loads.
    std::string document_id;
    std::string base_iri;
};

/// Parses a Turtle document (prefixes, literals, blank nodes, collections).
/// Named graphs are not supported.
Graph parse_turtle(const std::string& text, const TurtleOptions& opts = {});

/// Serializes with absolute IRIs unless a prefix table (prefix -> namespace)
/// is supplied. parse_turtle(serialize_turtle(g)) is isomorphic to g.
std::string serialize_turtle(const Graph& g,
                             const std::map<std::string, std::string>& prefixes = {});

/// One triple per line, canonical escaping; the shard dump format.
std::string serialize_ntriples(const Graph& g);

Graph load_turtle_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

} // namespace fedsparql::rdf
