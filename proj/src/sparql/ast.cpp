#include "fedsparql/sparql/ast.hpp"

#include <algorithm>

namespace fedsparql::sparql {

namespace {
std::shared_ptr<Expr> new_expr(Expr::Kind k) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    return e;
}
std::shared_ptr<Pattern> new_pattern(Pattern::Kind k) {
    auto p = std::make_shared<Pattern>();
    p->kind = k;
    return p;
}
} // namespace

ExprPtr expr_var(std::string name) {
    auto e = new_expr(Expr::Kind::Var);
    e->var = std::move(name);
    return e;
}

ExprPtr expr_const(rdf::Term value) {
    auto e = new_expr(Expr::Kind::Const);
    e->value = std::move(value);
    return e;
}

ExprPtr expr_compare(std::string op, ExprPtr a, ExprPtr b) {
    auto e = new_expr(Expr::Kind::Compare);
    e->op = std::move(op);
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}

ExprPtr expr_and(ExprPtr a, ExprPtr b) {
    auto e = new_expr(Expr::Kind::And);
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}

ExprPtr expr_or(ExprPtr a, ExprPtr b) {
    auto e = new_expr(Expr::Kind::Or);
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}

ExprPtr expr_not(ExprPtr a) {
    auto e = new_expr(Expr::Kind::Not);
    e->a = std::move(a);
    return e;
}

ExprPtr expr_regex(ExprPtr text, ExprPtr pattern, ExprPtr flags) {
    auto e = new_expr(Expr::Kind::Regex);
    e->a = std::move(text);
    e->b = std::move(pattern);
    e->c = std::move(flags);
    return e;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case Expr::Kind::Var: return a->var == b->var;
    case Expr::Kind::Const: return a->value == b->value;
    case Expr::Kind::Compare:
        return a->op == b->op && expr_equal(a->a, b->a) && expr_equal(a->b, b->b);
    case Expr::Kind::And:
    case Expr::Kind::Or: return expr_equal(a->a, b->a) && expr_equal(a->b, b->b);
    case Expr::Kind::Not: return expr_equal(a->a, b->a);
    case Expr::Kind::Regex:
        return expr_equal(a->a, b->a) && expr_equal(a->b, b->b) && expr_equal(a->c, b->c);
    }
    return false;
}

void expr_variables(const ExprPtr& e, std::vector<std::string>& out) {
    if (!e) return;
    if (e->kind == Expr::Kind::Var) {
        if (std::find(out.begin(), out.end(), e->var) == out.end()) out.push_back(e->var);
        return;
    }
    expr_variables(e->a, out);
    expr_variables(e->b, out);
    expr_variables(e->c, out);
}

PatternPtr make_basic(rdf::Bgp bgp) {
    auto p = new_pattern(Pattern::Kind::Basic);
    p->bgp = std::move(bgp);
    return p;
}

PatternPtr make_service(std::string endpoint, PatternPtr body, bool silent) {
    auto p = new_pattern(Pattern::Kind::Service);
    p->service_endpoint = std::move(endpoint);
    p->service_silent = silent;
    p->children.push_back(std::move(body));
    return p;
}

PatternPtr make_union(std::vector<PatternPtr> branches) {
    auto p = new_pattern(Pattern::Kind::Union);
    p->children = std::move(branches);
    return p;
}

PatternPtr make_join(std::vector<PatternPtr> parts) {
    auto p = new_pattern(Pattern::Kind::Join);
    p->children = std::move(parts);
    return p;
}

PatternPtr make_filter(PatternPtr body, ExprPtr condition) {
    auto p = new_pattern(Pattern::Kind::Filter);
    p->children.push_back(std::move(body));
    p->filter = std::move(condition);
    return p;
}

PatternPtr make_values(ValuesBlock block) {
    auto p = new_pattern(Pattern::Kind::Values);
    p->values = std::move(block);
    return p;
}

PatternPtr make_named_graph_var(std::string var, PatternPtr body) {
    auto p = new_pattern(Pattern::Kind::NamedGraph);
    p->graph_var = std::move(var);
    p->children.push_back(std::move(body));
    return p;
}

PatternPtr make_named_graph_iri(std::string iri, PatternPtr body) {
    auto p = new_pattern(Pattern::Kind::NamedGraph);
    p->graph_iri = std::move(iri);
    p->children.push_back(std::move(body));
    return p;
}

bool pattern_equal(const PatternPtr& a, const PatternPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind) return false;
    if (a->children.size() != b->children.size()) return false;
    for (std::size_t i = 0; i < a->children.size(); ++i)
        if (!pattern_equal(a->children[i], b->children[i])) return false;
    switch (a->kind) {
    case Pattern::Kind::Basic: return a->bgp == b->bgp;
    case Pattern::Kind::Service:
        return a->service_endpoint == b->service_endpoint && a->service_silent == b->service_silent;
    case Pattern::Kind::Filter: return expr_equal(a->filter, b->filter);
    case Pattern::Kind::Values: return a->values == b->values;
    case Pattern::Kind::NamedGraph: return a->graph_var == b->graph_var && a->graph_iri == b->graph_iri;
    default: return true;
    }
}

namespace {
void collect_vars(const Pattern& p, std::vector<std::string>& out) {
    auto add = [&](const std::string& v) {
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    };
    switch (p.kind) {
    case Pattern::Kind::Basic:
        for (const std::string& v : p.bgp.variables()) add(v);
        break;
    case Pattern::Kind::Values:
        for (const std::string& v : p.values.vars) add(v);
        break;
    case Pattern::Kind::NamedGraph:
        if (p.graph_var) add(*p.graph_var);
        collect_vars(*p.child(), out);
        break;
    default:
        for (const auto& c : p.children) collect_vars(*c, out);
        break;
    }
}
} // namespace

std::vector<std::string> pattern_variables(const Pattern& p) {
    std::vector<std::string> out;
    collect_vars(p, out);
    return out;
}

bool query_equal(const Query& a, const Query& b) {
    return a.form == b.form && a.distinct == b.distinct && a.select_star == b.select_star &&
           a.projection == b.projection && a.count == b.count && a.group_by == b.group_by &&
           a.limit == b.limit && a.offset == b.offset && pattern_equal(a.pattern, b.pattern);
}

} // namespace fedsparql::sparql
