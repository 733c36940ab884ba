#include "fedsparql/rdf/graph.hpp"

#include <algorithm>

namespace fedsparql::rdf {

bool Graph::insert(Triple t) {
    auto [it, added] = seen_.insert(t);
    if (!added) return false;
    auto idx = static_cast<std::uint32_t>(triples_.size());
    by_pred_[t.predicate()].push_back(idx);
    by_subj_[t.subject()].push_back(idx);
    if (t.predicate().is_iri() && t.predicate().value() == vocab::rdf_type && !t.object().is_literal()) {
        instances_[t.object()].push_back(t.subject());
        types_[t.subject()].push_back(t.object());
    }
    triples_.push_back(std::move(t));
    return true;
}

const std::vector<std::uint32_t>* Graph::by_predicate(const Term& p) const {
    auto it = by_pred_.find(p);
    return it == by_pred_.end() ? nullptr : &it->second;
}

const std::vector<std::uint32_t>* Graph::by_subject(const Term& s) const {
    auto it = by_subj_.find(s);
    return it == by_subj_.end() ? nullptr : &it->second;
}

const std::vector<Term>* Graph::instances_of(const Term& class_iri) const {
    auto it = instances_.find(class_iri);
    return it == instances_.end() ? nullptr : &it->second;
}

std::vector<Term> Graph::types_of(const Term& subject) const {
    auto it = types_.find(subject);
    return it == types_.end() ? std::vector<Term>{} : it->second;
}

bool Graph::is_instance_of(const Term& subject, const Term& class_iri) const {
    auto it = types_.find(subject);
    if (it == types_.end()) return false;
    return std::find(it->second.begin(), it->second.end(), class_iri) != it->second.end();
}

std::vector<Term> Graph::predicates() const {
    std::vector<Term> out;
    std::unordered_set<Term, TermHash> seen;
    for (const Triple& t : triples_)
        if (seen.insert(t.predicate()).second) out.push_back(t.predicate());
    return out;
}

void Graph::merge(const Graph& other) {
    for (const Triple& t : other.triples()) insert(t);
}

} // namespace fedsparql::rdf
