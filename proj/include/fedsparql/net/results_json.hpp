#pragma once

#include "fedsparql/rdf/solution.hpp"

#include <json.hpp>

namespace fedsparql::net {

/// W3C SPARQL 1.1 JSON results: {"head":{"vars":[...]},"results":{"bindings":[...]}}.
nlohmann::json solutions_to_json(const rdf::SolutionSet& s);

/// ASK form: {"head":{},"boolean":b}.
nlohmann::json ask_to_json(bool value);

struct DecodedResults {
    std::optional<rdf::SolutionSet> solutions;
    std::optional<bool> ask;
};

/// Throws std::runtime_error on documents that are not SPARQL JSON results.
/// Accepts the legacy "typed-literal" term type.
DecodedResults decode_results_json(const nlohmann::json& doc);

nlohmann::json term_to_json(const rdf::Term& t);
rdf::Term term_from_json(const nlohmann::json& j);

} // namespace fedsparql::net
