#include "fedsparql/sparql/eval.hpp"

#include <algorithm>
#include <cstdlib>
#include <regex>
#include <set>

namespace fedsparql::sparql {

using rdf::Binding;
using rdf::SolutionSet;
using rdf::Term;

bool is_numeric_literal(const Term& t) {
    if (!t.is_literal()) return false;
    const std::string& dt = t.datatype();
    return dt == vocab::xsd_integer || dt == vocab::xsd_decimal || dt == vocab::xsd_double ||
           dt == vocab::xsd_float;
}

namespace {

std::optional<double> numeric_value(const Term& t) {
    if (!is_numeric_literal(t)) return std::nullopt;
    const char* s = t.value().c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end == s || (end && *end != '\0')) return std::nullopt;
    return v;
}

bool is_plain_string(const Term& t) {
    return t.is_literal() && t.datatype() == vocab::xsd_string;
}

// Three-valued logic value for expression evaluation: a term, or an error.
using ExprValue = std::optional<Term>;

ExprValue eval_term(const Expr& e, const Binding& b) {
    switch (e.kind) {
    case Expr::Kind::Var: {
        const Term* t = b.lookup(e.var);
        if (!t) return std::nullopt; // unbound -> error
        return *t;
    }
    case Expr::Kind::Const: return e.value;
    default: return std::nullopt; // boolean sub-expressions handled by ebv path
    }
}

std::optional<bool> ebv_of_term(const Term& t) {
    if (!t.is_literal()) return std::nullopt;
    if (t.datatype() == vocab::xsd_boolean) {
        if (t.value() == "true" || t.value() == "1") return true;
        if (t.value() == "false" || t.value() == "0") return false;
        return std::nullopt;
    }
    if (auto n = numeric_value(t)) return *n != 0.0;
    if (is_plain_string(t) || t.datatype() == vocab::rdf_langString) return !t.value().empty();
    return std::nullopt;
}

std::optional<bool> compare_terms(const std::string& op, const Term& l, const Term& r) {
    auto ln = numeric_value(l);
    auto rn = numeric_value(r);
    if (ln && rn) {
        if (op == "=") return *ln == *rn;
        if (op == "!=") return *ln != *rn;
        if (op == "<") return *ln < *rn;
        if (op == "<=") return *ln <= *rn;
        if (op == ">") return *ln > *rn;
        if (op == ">=") return *ln >= *rn;
        return std::nullopt;
    }
    if (op == "=" || op == "!=") {
        bool eq;
        if (l == r) {
            eq = true;
        } else if (l.is_literal() && r.is_literal()) {
            // Distinct literals outside a shared value space: type error.
            if ((is_numeric_literal(l) && !is_numeric_literal(r)) ||
                (!is_numeric_literal(l) && is_numeric_literal(r)))
                return std::nullopt;
            if (l.datatype() != r.datatype()) return std::nullopt;
            eq = false; // same datatype, different lexical form / language
        } else {
            eq = false; // different kinds, or differing IRIs / blank labels
        }
        return op == "=" ? eq : !eq;
    }
    // Ordering beyond numbers: strings and booleans.
    if (is_plain_string(l) && is_plain_string(r)) {
        int c = l.value().compare(r.value());
        if (op == "<") return c < 0;
        if (op == "<=") return c <= 0;
        if (op == ">") return c > 0;
        if (op == ">=") return c >= 0;
    }
    if (l.is_literal() && r.is_literal() && l.datatype() == vocab::xsd_boolean &&
        r.datatype() == vocab::xsd_boolean) {
        int lv = l.value() == "true" ? 1 : 0;
        int rv = r.value() == "true" ? 1 : 0;
        if (op == "<") return lv < rv;
        if (op == "<=") return lv <= rv;
        if (op == ">") return lv > rv;
        if (op == ">=") return lv >= rv;
    }
    return std::nullopt;
}

std::optional<bool> eval_bool(const Expr& e, const Binding& b) {
    switch (e.kind) {
    case Expr::Kind::And: {
        auto l = eval_bool(*e.a, b);
        auto r = eval_bool(*e.b, b);
        if (l && !*l) return false;
        if (r && !*r) return false;
        if (l && r) return *l && *r;
        return std::nullopt; // error && true = error
    }
    case Expr::Kind::Or: {
        auto l = eval_bool(*e.a, b);
        auto r = eval_bool(*e.b, b);
        if (l && *l) return true;
        if (r && *r) return true;
        if (l && r) return *l || *r;
        return std::nullopt; // error || false = error
    }
    case Expr::Kind::Not: {
        auto v = eval_bool(*e.a, b);
        if (!v) return std::nullopt;
        return !*v;
    }
    case Expr::Kind::Compare: {
        ExprValue l = eval_term(*e.a, b);
        ExprValue r = eval_term(*e.b, b);
        if (!l || !r) return std::nullopt;
        return compare_terms(e.op, *l, *r);
    }
    case Expr::Kind::Regex: {
        ExprValue text = eval_term(*e.a, b);
        ExprValue pat = eval_term(*e.b, b);
        if (!text || !pat || !text->is_literal() || !pat->is_literal()) return std::nullopt;
        auto flags = std::regex::ECMAScript;
        if (e.c) {
            ExprValue f = eval_term(*e.c, b);
            if (!f || !f->is_literal()) return std::nullopt;
            if (f->value().find('i') != std::string::npos) flags |= std::regex::icase;
        }
        try {
            std::regex re(pat->value(), flags);
            return std::regex_search(text->value(), re);
        } catch (const std::regex_error&) {
            return std::nullopt;
        }
    }
    case Expr::Kind::Var:
    case Expr::Kind::Const: {
        ExprValue v = eval_term(e, b);
        if (!v) return std::nullopt;
        return ebv_of_term(*v);
    }
    }
    return std::nullopt;
}

SolutionSet values_solutions(const ValuesBlock& block) {
    SolutionSet out;
    out.variables = block.vars;
    for (const auto& row : block.rows) {
        Binding b;
        for (std::size_t i = 0; i < block.vars.size() && i < row.size(); ++i)
            if (row[i]) b.vars.emplace(block.vars[i], *row[i]);
        out.rows.push_back(std::move(b));
    }
    return out;
}

} // namespace

std::optional<bool> filter_accepts(const Expr& e, const Binding& b) { return eval_bool(e, b); }

rdf::SolutionSet eval_pattern(const Dataset& ds, const rdf::Graph& active, const Pattern& p,
                              const EvalOptions& opts) {
    switch (p.kind) {
    case Pattern::Kind::Basic: return rdf::eval_bgp(active, p.bgp);
    case Pattern::Kind::Join: {
        SolutionSet acc;
        acc.rows.push_back(Binding{});
        for (const auto& c : p.children)
            acc = rdf::join_solutions(acc, eval_pattern(ds, active, *c, opts));
        return acc;
    }
    case Pattern::Kind::Union: {
        SolutionSet out;
        for (const auto& c : p.children) {
            SolutionSet part = eval_pattern(ds, active, *c, opts);
            for (const std::string& v : part.variables)
                if (std::find(out.variables.begin(), out.variables.end(), v) == out.variables.end())
                    out.variables.push_back(v);
            for (Binding& b : part.rows) out.rows.push_back(std::move(b));
        }
        return out;
    }
    case Pattern::Kind::Filter: {
        SolutionSet in = eval_pattern(ds, active, *p.child(), opts);
        SolutionSet out;
        out.variables = in.variables;
        for (Binding& b : in.rows) {
            auto v = filter_accepts(*p.filter, b);
            if (v && *v) out.rows.push_back(std::move(b));
        }
        return out;
    }
    case Pattern::Kind::Values: return values_solutions(p.values);
    case Pattern::Kind::Service: {
        if (!opts.service_resolver)
            throw EvalError("SERVICE pattern cannot be evaluated against a plain graph");
        auto res = opts.service_resolver(p.service_endpoint, *p.child());
        if (!res) {
            if (p.service_silent) {
                SolutionSet empty;
                empty.variables = pattern_variables(*p.child());
                return empty;
            }
            throw EvalError("SERVICE delegation to <" + p.service_endpoint + "> failed");
        }
        return *res;
    }
    case Pattern::Kind::NamedGraph: {
        SolutionSet out;
        if (p.graph_iri) {
            auto it = ds.named.find(*p.graph_iri);
            if (it == ds.named.end()) {
                out.variables = pattern_variables(*p.child());
                return out;
            }
            return eval_pattern(ds, *it->second, *p.child(), opts);
        }
        // Variable: union over named graphs with the variable bound.
        out.variables.push_back(*p.graph_var);
        for (const std::string& v : pattern_variables(*p.child()))
            if (std::find(out.variables.begin(), out.variables.end(), v) == out.variables.end())
                out.variables.push_back(v);
        for (const auto& [name, g] : ds.named) {
            SolutionSet part = eval_pattern(ds, *g, *p.child(), opts);
            Term graph_term = Term::iri(name);
            for (const Binding& b : part.rows) {
                if (const Term* bound = b.lookup(*p.graph_var); bound && *bound != graph_term)
                    continue;
                Binding nb = b;
                nb.vars.emplace(*p.graph_var, graph_term);
                out.rows.push_back(std::move(nb));
            }
        }
        return out;
    }
    }
    return {};
}

Modifiers modifiers_of(const Query& q) {
    Modifiers m;
    m.distinct = q.distinct;
    m.select_star = q.select_star;
    m.projection = q.projection;
    m.count = q.count;
    m.group_by = q.group_by;
    m.limit = q.limit;
    m.offset = q.offset;
    return m;
}

rdf::SolutionSet apply_modifiers(rdf::SolutionSet rows, const Modifiers& m,
                                 const std::vector<std::string>& visible_vars) {
    SolutionSet out;

    if (m.count) {
        const CountSpec& spec = *m.count;
        auto count_group = [&](const std::vector<const Binding*>& group) -> long long {
            if (!spec.var) {
                if (!spec.distinct) return static_cast<long long>(group.size());
                std::set<std::string> distinct_rows;
                SolutionSet probe;
                probe.variables = visible_vars;
                for (const Binding* b : group) distinct_rows.insert(probe.row_key(*b));
                return static_cast<long long>(distinct_rows.size());
            }
            if (!spec.distinct) {
                long long n = 0;
                for (const Binding* b : group)
                    if (b->lookup(*spec.var)) ++n;
                return n;
            }
            std::set<Term> seen;
            for (const Binding* b : group)
                if (const Term* t = b->lookup(*spec.var)) seen.insert(*t);
            return static_cast<long long>(seen.size());
        };

        if (m.group_by.empty()) {
            std::vector<const Binding*> all;
            all.reserve(rows.rows.size());
            for (const Binding& b : rows.rows) all.push_back(&b);
            Binding result;
            result.vars.emplace(spec.alias, Term::literal(std::to_string(count_group(all)),
                                                          std::string(vocab::xsd_integer)));
            out.variables = {spec.alias};
            out.rows.push_back(std::move(result));
        } else {
            // Deterministic group order: by encoded group key.
            std::map<std::string, std::vector<const Binding*>> groups;
            SolutionSet key_probe;
            key_probe.variables = m.group_by;
            for (const Binding& b : rows.rows) groups[key_probe.row_key(b)].push_back(&b);
            out.variables = m.group_by;
            out.variables.push_back(spec.alias);
            for (const auto& [key, members] : groups) {
                Binding result;
                for (const std::string& v : m.group_by)
                    if (const Term* t = members.front()->lookup(v)) result.vars.emplace(v, *t);
                result.vars.emplace(spec.alias, Term::literal(std::to_string(count_group(members)),
                                                              std::string(vocab::xsd_integer)));
                out.rows.push_back(std::move(result));
            }
        }
    } else {
        // Plain projection.
        std::vector<std::string> proj = m.select_star || m.projection.empty() ? visible_vars
                                                                              : m.projection;
        out = rows.projected(proj);
    }

    if (m.distinct) {
        std::set<std::string> seen;
        std::vector<Binding> kept;
        for (Binding& b : out.rows)
            if (seen.insert(out.row_key(b)).second) kept.push_back(std::move(b));
        out.rows = std::move(kept);
    }

    if (m.offset && *m.offset > 0) {
        if (static_cast<std::size_t>(*m.offset) >= out.rows.size())
            out.rows.clear();
        else
            out.rows.erase(out.rows.begin(), out.rows.begin() + *m.offset);
    }
    if (m.limit && out.rows.size() > static_cast<std::size_t>(*m.limit))
        out.rows.resize(static_cast<std::size_t>(*m.limit));

    return out;
}

QueryResult eval_query(const Dataset& ds, const Query& q, const EvalOptions& opts) {
    if (!ds.default_graph) throw EvalError("dataset has no default graph");
    SolutionSet rows = eval_pattern(ds, *ds.default_graph, *q.pattern, opts);

    QueryResult result;
    if (q.form == Query::Form::Ask) {
        result.is_ask = true;
        result.ask = !rows.rows.empty();
        return result;
    }
    result.solutions = apply_modifiers(std::move(rows), modifiers_of(q), pattern_variables(*q.pattern));
    return result;
}

} // namespace fedsparql::sparql
