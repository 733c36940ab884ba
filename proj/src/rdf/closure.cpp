#include "fedsparql/rdf/closure.hpp"

namespace fedsparql::rdf {

Graph infer_type_closure(const Graph& data, const Graph& ontology) {
    std::map<Term, std::vector<Term>> domains; // predicate -> classes
    std::map<Term, std::vector<Term>> ranges;
    for (const Triple& t : ontology.triples()) {
        if (!t.object().is_iri()) continue;
        if (t.predicate().value() == vocab::rdfs_domain)
            domains[t.subject()].push_back(t.object());
        else if (t.predicate().value() == vocab::rdfs_range)
            ranges[t.subject()].push_back(t.object());
    }

    Graph out;
    for (const Triple& t : data.triples()) out.insert(t);

    Term rdf_type = Term::iri(std::string(vocab::rdf_type));
    bool changed = true;
    while (changed) {
        changed = false;
        // Snapshot: inserting while iterating would invalidate triples().
        std::vector<Triple> fresh;
        for (const Triple& t : out.triples()) {
            if (auto it = domains.find(t.predicate()); it != domains.end())
                for (const Term& c : it->second) {
                    Triple typed(t.subject(), rdf_type, c);
                    if (!out.contains(typed)) fresh.push_back(std::move(typed));
                }
            if (!t.object().is_literal())
                if (auto it = ranges.find(t.predicate()); it != ranges.end())
                    for (const Term& c : it->second) {
                        Triple typed(t.object(), rdf_type, c);
                        if (!out.contains(typed)) fresh.push_back(std::move(typed));
                    }
        }
        for (Triple& t : fresh) changed |= out.insert(std::move(t));
    }
    return out;
}

} // namespace fedsparql::rdf
