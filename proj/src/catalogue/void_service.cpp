#include "fedsparql/catalogue/void_service.hpp"

#include "fedsparql/net/url.hpp"
#include "fedsparql/rdf/turtle.hpp"
#include "fedsparql/rdf/vocab.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace fedsparql::catalogue {

using net::EndpointError;
using net::ErrorKind;
using net::QueryOutcome;
using net::QueryRequest;
using rdf::Graph;
using rdf::Term;
using rdf::Triple;

std::string to_string(VoidSource s) {
    switch (s) {
    case VoidSource::Cache: return "cache";
    case VoidSource::Retrieved: return "retrieved";
    case VoidSource::Computed: return "computed";
    }
    return "unknown";
}

namespace {

constexpr const char* kVoidSubgraphBody =
    "{ ?s a <http://rdfs.org/ns/void#Dataset> . ?s ?p ?o } UNION "
    "{ ?d a <http://rdfs.org/ns/void#Dataset> . ?d <http://rdfs.org/ns/void#classPartition> ?s . "
    "?s ?p ?o } UNION "
    "{ ?d a <http://rdfs.org/ns/void#Dataset> . ?d <http://rdfs.org/ns/void#propertyPartition> ?s . "
    "?s ?p ?o } UNION "
    "{ ?d a <http://rdfs.org/ns/void#Dataset> . ?d <http://rdfs.org/ns/void#subset> ?s . ?s ?p ?o }";

/// Rebuilds a graph from ?s ?p ?o rows.
Graph rows_to_graph(const rdf::SolutionSet& rows) {
    Graph g;
    for (const rdf::Binding& b : rows.rows) {
        const Term* s = b.lookup("s");
        const Term* p = b.lookup("p");
        const Term* o = b.lookup("o");
        if (!s || !p || !o || s->is_literal() || !p->is_iri()) continue;
        g.insert(Triple(*s, *p, *o));
    }
    return g;
}

std::optional<std::uint64_t> single_count(const QueryOutcome& out, const std::string& var) {
    if (!out.ok() || !out.solutions || out.solutions->rows.size() != 1) return std::nullopt;
    const Term* t = out.solutions->rows[0].lookup(var);
    if (!t || !t->is_literal()) return std::nullopt;
    return std::strtoull(t->value().c_str(), nullptr, 10);
}

std::string namespace_of(const std::string& iri) {
    auto hash = iri.rfind('#');
    if (hash != std::string::npos) return iri.substr(0, hash + 1);
    auto slash = iri.rfind('/');
    if (slash != std::string::npos && slash > 8) return iri.substr(0, slash + 1);
    return iri;
}

} // namespace

VoidResult VoidService::get(const std::string& endpoint_url, const VoidOptions& opts) {
    // Stage 1: cache.
    if (!opts.refresh) {
        if (auto cached = catalogue_.cached_void(endpoint_url)) {
            if (auto desc = VoidDescription::from_graph(*cached)) {
                bool needs_linksets = opts.extended && desc->linksets.empty() &&
                                      catalogue_.size() > 1;
                if (!needs_linksets)
                    return VoidResult{*desc, VoidSource::Cache, rdf::serialize_turtle(*cached)};
                compute_linksets(endpoint_url, *desc, opts);
                Graph g = desc->to_graph();
                catalogue_.store_void(endpoint_url, g);
                return VoidResult{*desc, VoidSource::Cache, rdf::serialize_turtle(g)};
            }
        }
    }

    // Stage 2: published descriptions.
    if (auto retrieved = retrieve(endpoint_url, opts.timeout)) {
        if (opts.extended) compute_linksets(endpoint_url, *retrieved, opts);
        Graph g = retrieved->to_graph();
        catalogue_.store_void(endpoint_url, g);
        return VoidResult{*retrieved, VoidSource::Retrieved, rdf::serialize_turtle(g)};
    }

    // Stage 3: recompute.
    VoidDescription computed = compute(endpoint_url, opts);
    if (opts.extended) compute_linksets(endpoint_url, computed, opts);
    Graph g = computed.to_graph();
    catalogue_.store_void(endpoint_url, g);
    return VoidResult{std::move(computed), VoidSource::Computed, rdf::serialize_turtle(g)};
}

std::optional<VoidDescription> VoidService::retrieve(const std::string& endpoint_url,
                                                     std::chrono::milliseconds timeout) {
    // (1) well-known URL on the endpoint's origin.
    if (auto url = net::parse_url(endpoint_url)) {
        if (auto text = net::http_get_text(url->origin() + "/.well-known/void", timeout)) {
            try {
                Graph g = rdf::parse_turtle(*text);
                if (auto desc = VoidDescription::from_graph(g)) return desc;
            } catch (const rdf::TurtleParseError&) {
                // fall through to the next stage
            }
        }
    }

    QueryRequest req;
    req.timeout = timeout;

    // (2) VoID triples in the default graph.
    req.query = std::string("SELECT ?s ?p ?o WHERE { ") + kVoidSubgraphBody + " }";
    QueryOutcome direct = client_.execute(endpoint_url, req);
    if (direct.ok() && direct.solutions && !direct.solutions->empty()) {
        if (auto desc = VoidDescription::from_graph(rows_to_graph(*direct.solutions))) return desc;
    }

    // (3) VoID triples in named graphs.
    req.query = std::string("SELECT ?s ?p ?o WHERE { GRAPH ?g { ") + kVoidSubgraphBody + " } }";
    QueryOutcome named = client_.execute(endpoint_url, req);
    if (named.ok() && named.solutions && !named.solutions->empty()) {
        if (auto desc = VoidDescription::from_graph(rows_to_graph(*named.solutions))) return desc;
    }

    // (4) service-description links (sd:defaultDataset).
    if (auto text = net::http_get_text(endpoint_url, timeout)) {
        try {
            Graph g = rdf::parse_turtle(*text);
            std::optional<Term> ds;
            g.for_matches(std::nullopt, Term::iri(std::string(vocab::sd_defaultDataset)),
                          std::nullopt, [&](const Triple& t) {
                              if (!ds) ds = t.object();
                          });
            if (ds) {
                std::string hint = ds->is_iri() ? ds->value() : "";
                if (auto desc = VoidDescription::from_graph(g, hint))
                    if (desc->triples > 0) return desc;
            }
        } catch (const rdf::TurtleParseError&) {
        }
    }
    return std::nullopt;
}

VoidDescription VoidService::compute(const std::string& endpoint_url, const VoidOptions& opts) {
    VoidDescription out;
    out.dataset_node = endpoint_url + "#dataset";

    QueryRequest req;
    req.timeout = opts.timeout;

    req.query = "SELECT (COUNT(*) AS ?n) WHERE { ?s ?p ?o }";
    QueryOutcome total = client_.execute(endpoint_url, req);

    if (!total.ok() && (total.error->kind == ErrorKind::Unavailable ||
                        total.error->kind == ErrorKind::Timeout))
        throw VoidError("cannot compute VoID for " + endpoint_url + ": " + total.error->message,
                        *total.error);

    if (total.ok()) {
        // Aggregate (self-descriptive query) path.
        if (auto n = single_count(total, "n")) out.triples = *n;

        req.query = "SELECT ?c (COUNT(DISTINCT ?s) AS ?n) WHERE { ?s a ?c } GROUP BY ?c";
        QueryOutcome classes = client_.execute(endpoint_url, req);
        if (classes.ok() && classes.solutions) {
            for (const rdf::Binding& b : classes.solutions->rows) {
                const Term* c = b.lookup("c");
                const Term* n = b.lookup("n");
                if (c && n && c->is_iri())
                    out.class_partitions.emplace_back(c->value(),
                                                      std::strtoull(n->value().c_str(), nullptr, 10));
            }
        } else {
            out.incomplete = true;
        }

        req.query = "SELECT ?p (COUNT(*) AS ?n) WHERE { ?s ?p ?o } GROUP BY ?p";
        QueryOutcome props = client_.execute(endpoint_url, req);
        if (props.ok() && props.solutions) {
            for (const rdf::Binding& b : props.solutions->rows) {
                const Term* p = b.lookup("p");
                const Term* n = b.lookup("n");
                if (p && n && p->is_iri())
                    out.property_partitions.emplace_back(
                        p->value(), std::strtoull(n->value().c_str(), nullptr, 10));
            }
        } else {
            out.incomplete = true;
        }

        req.query = "SELECT (COUNT(DISTINCT ?s) AS ?n) WHERE { ?s ?p ?o }";
        if (auto n = single_count(client_.execute(endpoint_url, req), "n"))
            out.distinct_subjects = *n;
        else
            out.incomplete = true;

        req.query = "SELECT (COUNT(DISTINCT ?o) AS ?n) WHERE { ?s ?p ?o }";
        if (auto n = single_count(client_.execute(endpoint_url, req), "n"))
            out.distinct_objects = *n;
        else
            out.incomplete = true;

        std::sort(out.class_partitions.begin(), out.class_partitions.end());
        std::sort(out.property_partitions.begin(), out.property_partitions.end());
        return out;
    }

    // Fallback: page through the data and count locally. Page sizes adapt to
    // server-side caps; the extra one-row probe distinguishes a cap from the
    // true end of data.
    Graph scanned;
    std::size_t offset = 0;
    while (true) {
        req.query = "SELECT ?s ?p ?o WHERE { ?s ?p ?o } LIMIT " +
                    std::to_string(opts.scan_page_size) + " OFFSET " + std::to_string(offset);
        QueryOutcome page = client_.execute(endpoint_url, req);
        if (!page.ok())
            throw VoidError("paged scan of " + endpoint_url + " failed: " + page.error->message,
                            *page.error);
        std::size_t got = page.solutions ? page.solutions->rows.size() : 0;
        if (got == 0) break;
        Graph page_graph = rows_to_graph(*page.solutions);
        scanned.merge(page_graph);
        offset += got;
        if (got < opts.scan_page_size) {
            req.query = "SELECT ?s ?p ?o WHERE { ?s ?p ?o } LIMIT 1 OFFSET " +
                        std::to_string(offset);
            QueryOutcome probe = client_.execute(endpoint_url, req);
            if (!probe.ok() || !probe.solutions || probe.solutions->empty()) break;
        }
    }
    VoidDescription counted = describe_graph(scanned, out.dataset_node);
    std::sort(counted.class_partitions.begin(), counted.class_partitions.end());
    std::sort(counted.property_partitions.begin(), counted.property_partitions.end());
    return counted;
}

void VoidService::compute_linksets(const std::string& endpoint_url, VoidDescription& desc,
                                   const VoidOptions& opts) {
    desc.linksets.clear();
    std::vector<CatalogueEntry> others;
    for (const CatalogueEntry& e : catalogue_.entries())
        if (e.url != endpoint_url) others.push_back(e);
    if (others.empty()) return;

    // Pull (predicate, object-IRI) pairs once.
    QueryRequest req;
    req.timeout = opts.timeout;
    req.query = "SELECT ?p ?o WHERE { ?s ?p ?o }";
    QueryOutcome rows = client_.execute(endpoint_url, req);
    if (!rows.ok() || !rows.solutions) {
        desc.incomplete = true;
        return;
    }
    std::map<std::string, std::vector<std::string>> objects_by_predicate;
    for (const rdf::Binding& b : rows.solutions->rows) {
        const Term* p = b.lookup("p");
        const Term* o = b.lookup("o");
        if (p && o && p->is_iri() && o->is_iri())
            objects_by_predicate[p->value()].push_back(o->value());
    }

    for (const CatalogueEntry& other : others) {
        if (opts.exact_linksets) {
            // Membership checks: which object IRIs occur as subjects over there.
            for (const auto& [pred, objects] : objects_by_predicate) {
                std::set<std::string> distinct(objects.begin(), objects.end());
                std::set<std::string> present;
                std::vector<std::string> batch;
                auto flush = [&]() {
                    if (batch.empty()) return;
                    std::string values;
                    for (const std::string& o : batch) values += "<" + o + "> ";
                    QueryRequest q;
                    q.timeout = opts.timeout;
                    q.query = "SELECT DISTINCT ?x WHERE { VALUES ?x { " + values +
                              "} ?x ?p ?o }";
                    QueryOutcome hit = client_.execute(other.url, q);
                    if (hit.ok() && hit.solutions)
                        for (const rdf::Binding& b : hit.solutions->rows)
                            if (const Term* x = b.lookup("x")) present.insert(x->value());
                    batch.clear();
                };
                for (const std::string& o : distinct) {
                    batch.push_back(o);
                    if (batch.size() == 50) flush();
                }
                flush();
                if (present.empty()) continue;
                std::uint64_t count = 0;
                for (const std::string& o : objects)
                    if (present.count(o)) ++count;
                desc.linksets.push_back({pred, other.url, count});
            }
        } else {
            // Namespace approximation against the target's class partitions.
            VoidOptions plain;
            plain.timeout = opts.timeout;
            std::set<std::string> target_ns;
            try {
                VoidResult target = get(other.url, plain);
                for (const auto& [cls, _] : target.description.class_partitions)
                    target_ns.insert(namespace_of(cls));
            } catch (const VoidError&) {
                desc.incomplete = true;
                continue;
            }
            if (target_ns.empty()) continue;
            for (const auto& [pred, objects] : objects_by_predicate) {
                std::uint64_t count = 0;
                for (const std::string& o : objects)
                    if (target_ns.count(namespace_of(o))) ++count;
                if (count > 0) desc.linksets.push_back({pred, other.url, count});
            }
        }
    }
    std::sort(desc.linksets.begin(), desc.linksets.end(), [](const auto& a, const auto& b) {
        return std::tie(a.link_predicate, a.objects_target) <
               std::tie(b.link_predicate, b.objects_target);
    });
}

} // namespace fedsparql::catalogue
