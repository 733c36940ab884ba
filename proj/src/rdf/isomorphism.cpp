#include "fedsparql/rdf/isomorphism.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace fedsparql::rdf {

namespace {

// Triple with blank nodes replaced by a placeholder; grounds the comparison
// of non-bnode structure and gives candidate signatures for matching.
std::string skeleton(const Triple& t) {
    auto enc = [](const Term& x) { return x.is_blank() ? std::string("_") : x.ntriples(); };
    return enc(t.subject()) + " " + enc(t.predicate()) + " " + enc(t.object());
}

std::vector<std::string> bnode_labels(const Graph& g) {
    std::set<std::string> s;
    for (const Triple& t : g.triples()) {
        if (t.subject().is_blank()) s.insert(t.subject().value());
        if (t.object().is_blank()) s.insert(t.object().value());
    }
    return {s.begin(), s.end()};
}

Term rename(const Term& t, const std::map<std::string, std::string>& m) {
    if (!t.is_blank()) return t;
    auto it = m.find(t.value());
    return it == m.end() ? t : Term::blank(it->second);
}

bool mapped_subset(const Graph& a, const Graph& b, const std::map<std::string, std::string>& m) {
    for (const Triple& t : a.triples()) {
        if (!b.contains(Triple(rename(t.subject(), m), t.predicate(), rename(t.object(), m))))
            return false;
    }
    return true;
}

bool search(const std::vector<std::string>& la, const std::vector<std::string>& lb,
            std::size_t i, std::map<std::string, std::string>& m, std::set<std::string>& used,
            const Graph& a, const Graph& b) {
    if (i == la.size()) return mapped_subset(a, b, m);
    for (const std::string& cand : lb) {
        if (used.count(cand)) continue;
        m[la[i]] = cand;
        used.insert(cand);
        if (search(la, lb, i + 1, m, used, a, b)) return true;
        used.erase(cand);
        m.erase(la[i]);
    }
    return false;
}

} // namespace

bool isomorphic(const Graph& a, const Graph& b) {
    if (a.size() != b.size()) return false;
    // Ground structure must agree exactly.
    std::multiset<std::string> sa, sb;
    for (const Triple& t : a.triples()) sa.insert(skeleton(t));
    for (const Triple& t : b.triples()) sb.insert(skeleton(t));
    if (sa != sb) return false;

    auto la = bnode_labels(a);
    auto lb = bnode_labels(b);
    if (la.size() != lb.size()) return false;
    if (la.empty()) return true; // skeletons equal and no bnodes => graphs equal

    std::map<std::string, std::string> m;
    std::set<std::string> used;
    return search(la, lb, 0, m, used, a, b);
}

} // namespace fedsparql::rdf
