#pragma once

#include "fedsparql/rdf/term.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_set>
#include <vector>

namespace fedsparql::rdf {

/// In-memory RDF graph with set semantics. Keeps insertion order for
/// deterministic serialization, plus predicate, subject and class-instance
/// indexes. Intended usage: build once, then share read-only.
class Graph {
  public:
    /// Returns false (and leaves the graph unchanged) when the triple is a duplicate.
    bool insert(Triple t);

    bool contains(const Triple& t) const { return seen_.count(t) > 0; }
    std::size_t size() const { return triples_.size(); }
    bool empty() const { return triples_.empty(); }
    const std::vector<Triple>& triples() const { return triples_; }
    const Triple& at(std::uint32_t i) const { return triples_[i]; }

    const std::vector<std::uint32_t>* by_predicate(const Term& p) const;
    const std::vector<std::uint32_t>* by_subject(const Term& s) const;

    /// Subjects s with (s, rdf:type, class_iri) in the graph, in first-seen order.
    const std::vector<Term>* instances_of(const Term& class_iri) const;
    /// Classes c with (subject, rdf:type, c) in the graph.
    std::vector<Term> types_of(const Term& subject) const;
    bool is_instance_of(const Term& subject, const Term& class_iri) const;

    /// Iterates triples matching the given constant slots (nullopt = wildcard),
    /// choosing the cheapest index available. Callback: void(const Triple&).
    template <typename F>
    void for_matches(const std::optional<Term>& s, const std::optional<Term>& p,
                     const std::optional<Term>& o, F&& fn) const {
        const std::vector<std::uint32_t>* candidates = nullptr;
        if (s) {
            candidates = by_subject(*s);
            if (!candidates) return;
        } else if (p) {
            candidates = by_predicate(*p);
            if (!candidates) return;
        }
        auto matches = [&](const Triple& t) {
            return (!s || t.subject() == *s) && (!p || t.predicate() == *p) &&
                   (!o || t.object() == *o);
        };
        if (candidates) {
            for (std::uint32_t i : *candidates)
                if (matches(triples_[i])) fn(triples_[i]);
        } else {
            for (const Triple& t : triples_)
                if (matches(t)) fn(t);
        }
    }

    /// Distinct predicates in first-seen order.
    std::vector<Term> predicates() const;

    /// Merges all triples of `other` into this graph.
    void merge(const Graph& other);

  private:
    std::vector<Triple> triples_;
    std::unordered_set<Triple, TripleHash> seen_;
    std::map<Term, std::vector<std::uint32_t>> by_pred_;
    std::map<Term, std::vector<std::uint32_t>> by_subj_;
    std::map<Term, std::vector<Term>> instances_; // class -> subjects
    std::map<Term, std::vector<Term>> types_;     // subject -> classes
};

} // namespace fedsparql::rdf
