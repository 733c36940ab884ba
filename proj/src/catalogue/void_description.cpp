#include "fedsparql/catalogue/void_description.hpp"

#include "fedsparql/rdf/turtle.hpp"
#include "fedsparql/rdf/vocab.hpp"

#include <map>
#include <set>

namespace fedsparql::catalogue {

using rdf::Graph;
using rdf::Term;
using rdf::Triple;

namespace {

Term iri(std::string_view v) { return Term::iri(std::string(v)); }
Term count_literal(std::uint64_t n) {
    return Term::literal(std::to_string(n), std::string(vocab::xsd_integer));
}

std::optional<std::uint64_t> count_of(const Graph& g, const Term& s, std::string_view p) {
    std::optional<std::uint64_t> out;
    g.for_matches(s, iri(p), std::nullopt, [&](const Triple& t) {
        if (t.object().is_literal()) out = std::strtoull(t.object().value().c_str(), nullptr, 10);
    });
    return out;
}

} // namespace

Graph VoidDescription::to_graph() const {
    Graph g;
    Term ds = Term::iri(dataset_node);
    g.insert(Triple(ds, iri(vocab::rdf_type), iri(vocab::void_Dataset)));
    g.insert(Triple(ds, iri(vocab::void_triples), count_literal(triples)));
    g.insert(Triple(ds, iri(vocab::void_distinctSubjects), count_literal(distinct_subjects)));
    g.insert(Triple(ds, iri(vocab::void_distinctObjects), count_literal(distinct_objects)));
    int n = 0;
    for (const auto& [cls, entities] : class_partitions) {
        Term part = Term::blank("cp" + std::to_string(n++));
        g.insert(Triple(ds, iri(vocab::void_classPartition), part));
        g.insert(Triple(part, iri(vocab::void_class), Term::iri(cls)));
        g.insert(Triple(part, iri(vocab::void_entities), count_literal(entities)));
    }
    n = 0;
    for (const auto& [prop, cnt] : property_partitions) {
        Term part = Term::blank("pp" + std::to_string(n++));
        g.insert(Triple(ds, iri(vocab::void_propertyPartition), part));
        g.insert(Triple(part, iri(vocab::void_property), Term::iri(prop)));
        g.insert(Triple(part, iri(vocab::void_triples), count_literal(cnt)));
    }
    n = 0;
    for (const Linkset& ls : linksets) {
        Term node = Term::blank("ls" + std::to_string(n++));
        g.insert(Triple(node, iri(vocab::rdf_type), iri(vocab::void_Linkset)));
        g.insert(Triple(ds, iri(vocab::void_subset), node));
        g.insert(Triple(node, iri(vocab::void_linkPredicate), Term::iri(ls.link_predicate)));
        g.insert(Triple(node, iri(vocab::void_objectsTarget), Term::iri(ls.objects_target)));
        g.insert(Triple(node, iri(vocab::void_triples), count_literal(ls.triples)));
    }
    return g;
}

std::string VoidDescription::to_turtle() const {
    std::map<std::string, std::string> prefixes{
        {"void", "http://rdfs.org/ns/void#"},
        {"rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"},
    };
    return rdf::serialize_turtle(to_graph(), prefixes);
}

std::optional<VoidDescription> VoidDescription::from_graph(const Graph& g,
                                                           const std::string& node_hint) {
    // Locate the dataset node.
    std::optional<Term> ds;
    if (!node_hint.empty()) {
        Term candidate = Term::iri(node_hint);
        if (g.by_subject(candidate)) ds = candidate;
    }
    if (!ds) {
        const auto* datasets = g.instances_of(iri(vocab::void_Dataset));
        if (datasets && !datasets->empty()) ds = datasets->front();
    }
    if (!ds) {
        // Fall back to any subject carrying void:triples (e.g. service
        // descriptions linking an untyped dataset node).
        g.for_matches(std::nullopt, iri(vocab::void_triples), std::nullopt, [&](const Triple& t) {
            if (!ds) ds = t.subject();
        });
    }
    if (!ds) return std::nullopt;

    VoidDescription out;
    out.dataset_node = ds->is_iri() ? ds->value() : ("_:" + ds->value());
    if (auto n = count_of(g, *ds, vocab::void_triples)) out.triples = *n;
    if (auto n = count_of(g, *ds, vocab::void_distinctSubjects)) out.distinct_subjects = *n;
    if (auto n = count_of(g, *ds, vocab::void_distinctObjects)) out.distinct_objects = *n;

    g.for_matches(*ds, iri(vocab::void_classPartition), std::nullopt, [&](const Triple& t) {
        std::optional<std::string> cls;
        g.for_matches(t.object(), iri(vocab::void_class), std::nullopt,
                      [&](const Triple& c) { cls = c.object().value(); });
        auto entities = count_of(g, t.object(), vocab::void_entities);
        if (cls) out.class_partitions.emplace_back(*cls, entities.value_or(0));
    });
    g.for_matches(*ds, iri(vocab::void_propertyPartition), std::nullopt, [&](const Triple& t) {
        std::optional<std::string> prop;
        g.for_matches(t.object(), iri(vocab::void_property), std::nullopt,
                      [&](const Triple& c) { prop = c.object().value(); });
        auto cnt = count_of(g, t.object(), vocab::void_triples);
        if (prop) out.property_partitions.emplace_back(*prop, cnt.value_or(0));
    });
    g.for_matches(*ds, iri(vocab::void_subset), std::nullopt, [&](const Triple& t) {
        Linkset ls;
        bool is_linkset = false;
        g.for_matches(t.object(), std::nullopt, std::nullopt, [&](const Triple& p) {
            const std::string& pred = p.predicate().value();
            if (pred == vocab::rdf_type && p.object().value() == vocab::void_Linkset)
                is_linkset = true;
            else if (pred == vocab::void_linkPredicate)
                ls.link_predicate = p.object().value();
            else if (pred == vocab::void_objectsTarget)
                ls.objects_target = p.object().value();
            else if (pred == vocab::void_triples && p.object().is_literal())
                ls.triples = std::strtoull(p.object().value().c_str(), nullptr, 10);
        });
        if (is_linkset) out.linksets.push_back(std::move(ls));
    });
    return out;
}

VoidDescription describe_graph(const Graph& g, const std::string& dataset_node) {
    VoidDescription out;
    out.dataset_node = dataset_node;
    out.triples = g.size();

    std::map<std::string, std::set<std::string>> class_members; // class -> subject keys
    std::map<std::string, std::uint64_t> prop_counts;
    std::set<std::string> subjects, objects;
    for (const Triple& t : g.triples()) {
        prop_counts[t.predicate().value()] += 1;
        subjects.insert(t.subject().ntriples());
        objects.insert(t.object().ntriples());
        if (t.predicate().value() == vocab::rdf_type && !t.object().is_literal())
            class_members[t.object().value()].insert(t.subject().ntriples());
    }
    for (const auto& [cls, members] : class_members)
        out.class_partitions.emplace_back(cls, members.size());
    for (const auto& [prop, cnt] : prop_counts) out.property_partitions.emplace_back(prop, cnt);
    out.distinct_subjects = subjects.size();
    out.distinct_objects = objects.size();
    return out;
}

} // namespace fedsparql::catalogue
