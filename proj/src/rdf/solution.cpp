#include "fedsparql/rdf/solution.hpp"

#include "fedsparql/rdf/pattern.hpp"

#include <algorithm>

namespace fedsparql::rdf {

bool Binding::compatible(const Binding& other) const {
    const Binding* small = this;
    const Binding* large = &other;
    if (small->vars.size() > large->vars.size()) std::swap(small, large);
    for (const auto& [name, term] : small->vars) {
        auto it = large->vars.find(name);
        if (it != large->vars.end() && it->second != term) return false;
    }
    return true;
}

Binding Binding::merged(const Binding& other) const {
    Binding out = *this;
    for (const auto& [name, term] : other.vars) out.vars.emplace(name, term);
    return out;
}

SolutionSet SolutionSet::projected(const std::vector<std::string>& onto) const {
    SolutionSet out;
    out.variables = onto;
    out.rows.reserve(rows.size());
    for (const Binding& b : rows) {
        Binding nb;
        for (const std::string& v : onto) {
            auto it = b.vars.find(v);
            if (it != b.vars.end()) nb.vars.emplace(v, it->second);
        }
        out.rows.push_back(std::move(nb));
    }
    return out;
}

std::string SolutionSet::row_key(const Binding& b) const {
    std::string key;
    for (const std::string& v : variables) {
        auto it = b.vars.find(v);
        key += it == b.vars.end() ? std::string("~") : it->second.ntriples();
        key += '\x1f';
    }
    return key;
}

std::set<std::string> row_key_set(const SolutionSet& s) {
    std::set<std::string> keys;
    for (const Binding& b : s.rows) keys.insert(s.row_key(b));
    return keys;
}

bool set_equal(const SolutionSet& a, const SolutionSet& b) {
    // Compare on the union of headers so that a variable bound on one side
    // but missing from the other makes the sets differ.
    std::vector<std::string> header = a.variables;
    for (const std::string& v : b.variables)
        if (std::find(header.begin(), header.end(), v) == header.end()) header.push_back(v);
    SolutionSet pa = a.projected(header);
    SolutionSet pb = b.projected(header);
    return row_key_set(pa) == row_key_set(pb);
}

std::vector<std::string> Bgp::variables() const {
    std::vector<std::string> out;
    auto add = [&](const TermOrVar& tv) {
        if (!is_var(tv)) return;
        const std::string& n = as_var(tv).name;
        if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    };
    for (const TriplePattern& tp : patterns) {
        add(tp.subject);
        add(tp.predicate);
        add(tp.object);
    }
    return out;
}

} // namespace fedsparql::rdf
