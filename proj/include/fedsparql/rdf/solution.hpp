#pragma once

#include "fedsparql/rdf/term.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fedsparql::rdf {

/// One solution mapping: variable name -> bound term. Variables absent from
/// the map are unbound in this row.
struct Binding {
    std::map<std::string, Term> vars;

    const Term* lookup(const std::string& name) const {
        auto it = vars.find(name);
        return it == vars.end() ? nullptr : &it->second;
    }

    /// Two bindings are compatible when shared variables agree.
    bool compatible(const Binding& other) const;

    /// Union of two compatible bindings.
    Binding merged(const Binding& other) const;

    friend bool operator==(const Binding&, const Binding&) = default;
    friend auto operator<=>(const Binding&, const Binding&) = default;
};

/// Multiset of bindings with a declared variable list (SPARQL results header).
struct SolutionSet {
    std::vector<std::string> variables;
    std::vector<Binding> rows;

    std::size_t size() const { return rows.size(); }
    bool empty() const { return rows.empty(); }

    /// Restricts every row (and the header) to the given variables.
    SolutionSet projected(const std::vector<std::string>& onto) const;

    /// Canonical one-line encoding of a row restricted to `variables`,
    /// used for hashing/dedup and set comparison.
    std::string row_key(const Binding& b) const;
};

/// Set-semantics equality after projecting both sides onto the shared
/// variable header; this is the comparison used by acceptance checks.
bool set_equal(const SolutionSet& a, const SolutionSet& b);

/// Distinct row keys of a solution set (set view).
std::set<std::string> row_key_set(const SolutionSet& s);

} // namespace fedsparql::rdf
