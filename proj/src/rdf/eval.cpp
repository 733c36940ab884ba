#include "fedsparql/rdf/eval.hpp"

#include <algorithm>
#include <numeric>

namespace fedsparql::rdf {

namespace {

// Pattern slot under a partial binding: constant, bound variable (acts as a
// constant), or free variable.
std::optional<Term> resolve(const TermOrVar& tv, const Binding& b) {
    if (!is_var(tv)) return as_term(tv);
    if (const Term* t = b.lookup(as_var(tv).name)) return *t;
    return std::nullopt;
}

bool bind_slot(const TermOrVar& tv, const Term& ground, Binding& b) {
    if (!is_var(tv)) return as_term(tv) == ground;
    auto [it, added] = b.vars.emplace(as_var(tv).name, ground);
    return added || it->second == ground;
}

void match_pattern(const Graph& g, const TriplePattern& tp, const Binding& in,
                   std::vector<Binding>& out) {
    auto s = resolve(tp.subject, in);
    auto p = resolve(tp.predicate, in);
    auto o = resolve(tp.object, in);
    g.for_matches(s, p, o, [&](const Triple& t) {
        Binding b = in;
        if (bind_slot(tp.subject, t.subject(), b) && bind_slot(tp.predicate, t.predicate(), b) &&
            bind_slot(tp.object, t.object(), b))
            out.push_back(std::move(b));
    });
}

} // namespace

SolutionSet eval_bgp(const Graph& g, const Bgp& bgp) {
    SolutionSet result;
    result.variables = bgp.variables();

    // Evaluate constants-heavy patterns first; output order stays deterministic
    // because the ordering and the underlying indexes are.
    std::vector<std::size_t> order(bgp.patterns.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return bgp.patterns[a].constant_slots() > bgp.patterns[b].constant_slots();
    });

    std::vector<Binding> frontier{Binding{}};
    for (std::size_t idx : order) {
        std::vector<Binding> next;
        for (const Binding& b : frontier) match_pattern(g, bgp.patterns[idx], b, next);
        frontier = std::move(next);
        if (frontier.empty()) break;
    }
    result.rows = std::move(frontier);
    return result;
}

SolutionSet join_solutions(const SolutionSet& left, const SolutionSet& right) {
    SolutionSet out;
    out.variables = left.variables;
    for (const std::string& v : right.variables)
        if (std::find(out.variables.begin(), out.variables.end(), v) == out.variables.end())
            out.variables.push_back(v);

    // Shared variables present in both headers.
    std::vector<std::string> shared;
    for (const std::string& v : left.variables)
        if (std::find(right.variables.begin(), right.variables.end(), v) != right.variables.end())
            shared.push_back(v);

    auto key_of = [&](const Binding& b) {
        std::string key;
        for (const std::string& v : shared) {
            auto it = b.vars.find(v);
            key += it == b.vars.end() ? std::string("~") : it->second.ntriples();
            key += '\x1f';
        }
        return key;
    };

    // Hash the smaller side; unbound shared variables fall back to a
    // compatibility scan since they match any key.
    std::multimap<std::string, const Binding*> index;
    bool right_indexed = right.rows.size() <= left.rows.size();
    const auto& build = right_indexed ? right.rows : left.rows;
    const auto& probe = right_indexed ? left.rows : right.rows;
    bool any_unbound_shared = false;
    for (const Binding& b : build) {
        for (const std::string& v : shared)
            if (!b.vars.count(v)) any_unbound_shared = true;
        index.emplace(key_of(b), &b);
    }
    for (const Binding& p : probe) {
        for (const std::string& v : shared)
            if (!p.vars.count(v)) any_unbound_shared = true;
    }

    if (shared.empty() || any_unbound_shared) {
        for (const Binding& l : left.rows)
            for (const Binding& r : right.rows)
                if (l.compatible(r)) out.rows.push_back(l.merged(r));
        return out;
    }

    for (const Binding& p : probe) {
        auto [lo, hi] = index.equal_range(key_of(p));
        for (auto it = lo; it != hi; ++it) {
            const Binding& other = *it->second;
            if (right_indexed)
                out.rows.push_back(p.merged(other));
            else
                out.rows.push_back(other.merged(p));
        }
    }
    return out;
}

} // namespace fedsparql::rdf
