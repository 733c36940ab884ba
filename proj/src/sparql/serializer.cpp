#include "fedsparql/sparql/serializer.hpp"

#include <cctype>
#include <sstream>

namespace fedsparql::sparql {

namespace {

using Prefixes = std::map<std::string, std::string>;

std::string term_text(const rdf::Term& t, const Prefixes* prefixes) {
    if (t.is_iri() && prefixes) {
        for (const auto& [pfx, ns] : *prefixes) {
            if (t.value().rfind(ns, 0) == 0) {
                std::string local = t.value().substr(ns.size());
                bool plain = !local.empty();
                for (char c : local)
                    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
                        plain = false;
                if (plain) return pfx + ":" + local;
            }
        }
    }
    return t.ntriples();
}

std::string slot_text(const rdf::TermOrVar& tv, const Prefixes* prefixes) {
    if (rdf::is_var(tv)) return "?" + rdf::as_var(tv).name;
    return term_text(rdf::as_term(tv), prefixes);
}

std::string verb_text(const rdf::TermOrVar& tv, const Prefixes* prefixes) {
    if (!rdf::is_var(tv) && rdf::as_term(tv).is_iri() &&
        rdf::as_term(tv).value() == vocab::rdf_type)
        return "a";
    return slot_text(tv, prefixes);
}

void write_bgp(std::ostringstream& out, const rdf::Bgp& bgp, const Prefixes* prefixes) {
    bool first = true;
    for (const rdf::TriplePattern& tp : bgp.patterns) {
        if (!first) out << " ";
        first = false;
        out << slot_text(tp.subject, prefixes) << " " << verb_text(tp.predicate, prefixes) << " "
            << slot_text(tp.object, prefixes) << " .";
    }
}

void write_pattern(std::ostringstream& out, const Pattern& p, const Prefixes* prefixes) {
    switch (p.kind) {
    case Pattern::Kind::Basic:
        write_bgp(out, p.bgp, prefixes);
        break;
    case Pattern::Kind::Service:
        out << "SERVICE " << (p.service_silent ? "SILENT " : "") << "<" << p.service_endpoint
            << "> { ";
        write_pattern(out, *p.child(), prefixes);
        out << " }";
        break;
    case Pattern::Kind::Union: {
        bool first = true;
        for (const auto& c : p.children) {
            if (!first) out << " UNION ";
            first = false;
            out << "{ ";
            write_pattern(out, *c, prefixes);
            out << " }";
        }
        break;
    }
    case Pattern::Kind::Join: {
        bool first = true;
        for (const auto& c : p.children) {
            if (!first) out << " ";
            first = false;
            if (c->kind == Pattern::Kind::Basic) {
                write_bgp(out, c->bgp, prefixes);
            } else if (c->kind == Pattern::Kind::Union || c->kind == Pattern::Kind::Join ||
                       c->kind == Pattern::Kind::Filter) {
                // Braces keep the child's grouping unambiguous inside the join.
                if (c->kind == Pattern::Kind::Union) {
                    write_pattern(out, *c, prefixes);
                } else {
                    out << "{ ";
                    write_pattern(out, *c, prefixes);
                    out << " }";
                }
            } else {
                write_pattern(out, *c, prefixes);
            }
        }
        break;
    }
    case Pattern::Kind::Filter:
        write_pattern(out, *p.child(), prefixes);
        out << " FILTER (" << serialize_expr(*p.filter, prefixes) << ")";
        break;
    case Pattern::Kind::Values: {
        out << "VALUES ";
        if (p.values.vars.size() == 1) {
            out << "?" << p.values.vars[0] << " { ";
            for (const auto& row : p.values.rows)
                out << (row[0] ? term_text(*row[0], prefixes) : "UNDEF") << " ";
            out << "}";
        } else {
            out << "( ";
            for (const auto& v : p.values.vars) out << "?" << v << " ";
            out << ") { ";
            for (const auto& row : p.values.rows) {
                out << "( ";
                for (const auto& cell : row) out << (cell ? term_text(*cell, prefixes) : "UNDEF") << " ";
                out << ") ";
            }
            out << "}";
        }
        break;
    }
    case Pattern::Kind::NamedGraph:
        out << "GRAPH ";
        if (p.graph_var)
            out << "?" << *p.graph_var;
        else
            out << "<" << *p.graph_iri << ">";
        out << " { ";
        write_pattern(out, *p.child(), prefixes);
        out << " }";
        break;
    }
}

} // namespace

std::string serialize_expr(const Expr& e, const Prefixes* prefixes) {
    switch (e.kind) {
    case Expr::Kind::Var: return "?" + e.var;
    case Expr::Kind::Const: return term_text(e.value, prefixes);
    case Expr::Kind::Compare:
        return "(" + serialize_expr(*e.a, prefixes) + " " + e.op + " " +
               serialize_expr(*e.b, prefixes) + ")";
    case Expr::Kind::And:
        return "(" + serialize_expr(*e.a, prefixes) + " && " + serialize_expr(*e.b, prefixes) + ")";
    case Expr::Kind::Or:
        return "(" + serialize_expr(*e.a, prefixes) + " || " + serialize_expr(*e.b, prefixes) + ")";
    case Expr::Kind::Not: return "!(" + serialize_expr(*e.a, prefixes) + ")";
    case Expr::Kind::Regex: {
        std::string out = "REGEX(" + serialize_expr(*e.a, prefixes) + ", " +
                          serialize_expr(*e.b, prefixes);
        if (e.c) out += ", " + serialize_expr(*e.c, prefixes);
        return out + ")";
    }
    }
    return {};
}

std::string serialize_pattern(const Pattern& p, const Prefixes* prefixes) {
    std::ostringstream out;
    write_pattern(out, p, prefixes);
    return out.str();
}

std::string serialize_query(const Query& q, const Prefixes* prefixes) {
    std::ostringstream out;
    if (prefixes)
        for (const auto& [pfx, ns] : *prefixes) out << "PREFIX " << pfx << ": <" << ns << ">\n";

    if (q.form == Query::Form::Ask) {
        out << "ASK { ";
        write_pattern(out, *q.pattern, prefixes);
        out << " }";
    } else {
        out << "SELECT ";
        if (q.distinct) out << "DISTINCT ";
        if (q.select_star) {
            out << "* ";
        } else {
            for (const std::string& v : q.projection) out << "?" << v << " ";
            if (q.count) {
                out << "(COUNT(" << (q.count->distinct ? "DISTINCT " : "");
                if (!q.count->var)
                    out << "*";
                else
                    out << "?" << *q.count->var;
                out << ") AS ?" << q.count->alias << ") ";
            }
        }
        out << "WHERE { ";
        write_pattern(out, *q.pattern, prefixes);
        out << " }";
        if (!q.group_by.empty()) {
            out << " GROUP BY";
            for (const std::string& v : q.group_by) out << " ?" << v;
        }
    }
    if (q.limit) out << " LIMIT " << *q.limit;
    if (q.offset) out << " OFFSET " << *q.offset;
    return out.str();
}

} // namespace fedsparql::sparql
