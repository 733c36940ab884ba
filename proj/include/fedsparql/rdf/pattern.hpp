#pragma once

#include "fedsparql/rdf/term.hpp"

#include <string>
#include <variant>
#include <vector>

namespace fedsparql::rdf {

struct Variable {
    std::string name; // without the ? sigil

    friend auto operator<=>(const Variable&, const Variable&) = default;
    friend bool operator==(const Variable&, const Variable&) = default;
};

using TermOrVar = std::variant<Term, Variable>;

inline bool is_var(const TermOrVar& tv) { return std::holds_alternative<Variable>(tv); }
inline const Variable& as_var(const TermOrVar& tv) { return std::get<Variable>(tv); }
inline const Term& as_term(const TermOrVar& tv) { return std::get<Term>(tv); }

struct TriplePattern {
    TermOrVar subject;
    TermOrVar predicate;
    TermOrVar object;

    int constant_slots() const {
        return (is_var(subject) ? 0 : 1) + (is_var(predicate) ? 0 : 1) + (is_var(object) ? 0 : 1);
    }

    friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

/// Basic graph pattern: an ordered list of triple patterns read as a conjunction.
struct Bgp {
    std::vector<TriplePattern> patterns;

    bool empty() const { return patterns.empty(); }
    std::size_t size() const { return patterns.size(); }

    /// Variable names in first-appearance order (subject, predicate, object per pattern).
    std::vector<std::string> variables() const;

    friend bool operator==(const Bgp&, const Bgp&) = default;
};

} // namespace fedsparql::rdf
