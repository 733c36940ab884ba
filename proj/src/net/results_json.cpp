#include "fedsparql/net/results_json.hpp"

#include "fedsparql/rdf/vocab.hpp"

#include <stdexcept>

namespace fedsparql::net {

using nlohmann::json;
using rdf::Term;

json term_to_json(const Term& t) {
    json j;
    switch (t.kind()) {
    case rdf::TermKind::Iri:
        j["type"] = "uri";
        j["value"] = t.value();
        break;
    case rdf::TermKind::Blank:
        j["type"] = "bnode";
        j["value"] = t.value();
        break;
    case rdf::TermKind::Literal:
        j["type"] = "literal";
        j["value"] = t.value();
        if (!t.language().empty())
            j["xml:lang"] = t.language();
        else if (t.datatype() != vocab::xsd_string)
            j["datatype"] = t.datatype();
        break;
    }
    return j;
}

Term term_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type") || !j.contains("value"))
        throw std::runtime_error("malformed term in SPARQL JSON results");
    const std::string type = j.at("type").get<std::string>();
    const std::string value = j.at("value").get<std::string>();
    if (type == "uri") return Term::iri(value);
    if (type == "bnode") return Term::blank(value);
    if (type == "literal" || type == "typed-literal") {
        if (j.contains("xml:lang")) return Term::lang_literal(value, j.at("xml:lang").get<std::string>());
        if (j.contains("datatype")) return Term::literal(value, j.at("datatype").get<std::string>());
        return Term::literal(value);
    }
    throw std::runtime_error("unknown term type in SPARQL JSON results: " + type);
}

json solutions_to_json(const rdf::SolutionSet& s) {
    json bindings = json::array();
    for (const rdf::Binding& b : s.rows) {
        json row = json::object();
        for (const auto& [name, term] : b.vars) row[name] = term_to_json(term);
        bindings.push_back(std::move(row));
    }
    return json{{"head", {{"vars", s.variables}}}, {"results", {{"bindings", bindings}}}};
}

json ask_to_json(bool value) { return json{{"head", json::object()}, {"boolean", value}}; }

DecodedResults decode_results_json(const json& doc) {
    DecodedResults out;
    if (!doc.is_object() || !doc.contains("head"))
        throw std::runtime_error("missing 'head' in SPARQL JSON results");
    if (doc.contains("boolean")) {
        if (!doc.at("boolean").is_boolean()) throw std::runtime_error("non-boolean ASK result");
        out.ask = doc.at("boolean").get<bool>();
        return out;
    }
    if (!doc.contains("results") || !doc.at("results").is_object() ||
        !doc.at("results").contains("bindings"))
        throw std::runtime_error("missing 'results.bindings' in SPARQL JSON results");

    rdf::SolutionSet s;
    if (doc.at("head").contains("vars"))
        for (const auto& v : doc.at("head").at("vars")) s.variables.push_back(v.get<std::string>());
    const json& bindings = doc.at("results").at("bindings");
    if (!bindings.is_array()) throw std::runtime_error("'bindings' is not an array");
    for (const json& row : bindings) {
        if (!row.is_object()) throw std::runtime_error("binding row is not an object");
        rdf::Binding b;
        for (auto it = row.begin(); it != row.end(); ++it)
            b.vars.emplace(it.key(), term_from_json(it.value()));
        s.rows.push_back(std::move(b));
    }
    out.solutions = std::move(s);
    return out;
}

} // namespace fedsparql::net
