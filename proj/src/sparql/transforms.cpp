#include "fedsparql/sparql/transforms.hpp"

#include <algorithm>

namespace fedsparql::sparql {

int count_services(const Pattern& p) {
    int n = p.kind == Pattern::Kind::Service ? 1 : 0;
    for (const auto& c : p.children) n += count_services(*c);
    return n;
}

int count_services(const Query& q) { return q.pattern ? count_services(*q.pattern) : 0; }

std::vector<std::string> service_endpoints(const Pattern& p) {
    std::vector<std::string> out;
    auto walk = [&](auto&& self, const Pattern& node) -> void {
        if (node.kind == Pattern::Kind::Service &&
            std::find(out.begin(), out.end(), node.service_endpoint) == out.end())
            out.push_back(node.service_endpoint);
        for (const auto& c : node.children) self(self, *c);
    };
    walk(walk, p);
    return out;
}

namespace {

PatternPtr strip_service(const PatternPtr& p, const std::string& endpoint) {
    if (p->kind == Pattern::Kind::Service && p->service_endpoint == endpoint) return p->child();
    auto copy = std::make_shared<Pattern>(*p);
    for (auto& c : copy->children) c = strip_service(c, endpoint);
    return copy;
}

} // namespace

std::pair<std::string, Query> unwrap_single_service(const Query& q) {
    int n = count_services(q);
    if (n != 1)
        throw TransformError("unwrap_single_service requires exactly one SERVICE node, found " +
                             std::to_string(n));
    std::string endpoint = service_endpoints(*q.pattern).front();
    Query out = q;
    out.pattern = strip_service(q.pattern, endpoint);
    return {endpoint, std::move(out)};
}

PatternPtr build_trivial_federation(const rdf::Bgp& bgp, const std::vector<std::string>& endpoints) {
    if (endpoints.empty()) throw TransformError("trivial federation requires at least one endpoint");
    if (bgp.empty()) throw TransformError("trivial federation requires a non-empty BGP");

    std::vector<PatternPtr> components;
    components.reserve(bgp.size());
    for (const rdf::TriplePattern& tp : bgp.patterns) {
        rdf::Bgp single;
        single.patterns.push_back(tp);
        std::vector<PatternPtr> branches;
        branches.reserve(endpoints.size());
        for (const std::string& e : endpoints)
            branches.push_back(make_service(e, make_basic(single)));
        components.push_back(branches.size() == 1 ? branches.front()
                                                  : make_union(std::move(branches)));
    }
    return components.size() == 1 ? components.front() : make_join(std::move(components));
}

namespace {

bool contains_service(const Pattern& p) { return count_services(p) > 0; }

void scan_splits(const Pattern& p, SplitReport& report) {
    if (p.kind == Pattern::Kind::Join && p.children.size() >= 2) {
        // Disjoint SERVICE sub-patterns joined together, spanning >= 2 endpoints.
        bool all_have_service = true;
        std::set<std::string> eps;
        for (const auto& c : p.children) {
            if (!contains_service(*c)) all_have_service = false;
            for (const std::string& e : service_endpoints(*c)) eps.insert(e);
        }
        if (all_have_service && eps.size() >= 2) report.conjunctive = true;
    }
    if (p.kind == Pattern::Kind::Union && p.children.size() >= 2) {
        // UNION-concatenated SERVICE copies of the same body across endpoints.
        bool all_services = true;
        std::set<std::string> eps;
        for (const auto& c : p.children) {
            if (c->kind != Pattern::Kind::Service) {
                all_services = false;
                break;
            }
            eps.insert(c->service_endpoint);
        }
        if (all_services && eps.size() == p.children.size()) {
            bool same_body = true;
            for (std::size_t i = 1; i < p.children.size(); ++i)
                if (!pattern_equal(p.children[i]->child(), p.children[0]->child()))
                    same_body = false;
            if (same_body) report.disjunctive = true;
        }
    }
    for (const auto& c : p.children) scan_splits(*c, report);
}

} // namespace

SplitReport classify_splits(const Pattern& p) {
    SplitReport report;
    report.endpoints = service_endpoints(p);
    scan_splits(p, report);
    return report;
}

bool is_trivial_federation(const Pattern& p, const std::vector<std::string>& endpoints) {
    if (endpoints.empty()) return false;
    std::set<std::string> expected(endpoints.begin(), endpoints.end());

    std::vector<const Pattern*> components;
    if (p.kind == Pattern::Kind::Join)
        for (const auto& c : p.children) components.push_back(c.get());
    else
        components.push_back(&p);

    for (const Pattern* comp : components) {
        std::vector<const Pattern*> branches;
        if (comp->kind == Pattern::Kind::Union) {
            for (const auto& b : comp->children) branches.push_back(b.get());
        } else if (comp->kind == Pattern::Kind::Service && expected.size() == 1) {
            branches.push_back(comp); // single-endpoint UNION collapses
        } else {
            return false;
        }
        std::set<std::string> seen;
        const Pattern* body = nullptr;
        for (const Pattern* b : branches) {
            if (b->kind != Pattern::Kind::Service) return false;
            const Pattern& inner = *b->child();
            if (inner.kind != Pattern::Kind::Basic || inner.bgp.size() != 1) return false;
            if (!body)
                body = &inner;
            else if (!(inner.bgp == body->bgp))
                return false;
            seen.insert(b->service_endpoint);
        }
        if (seen != expected) return false;
    }
    return true;
}

} // namespace fedsparql::sparql
