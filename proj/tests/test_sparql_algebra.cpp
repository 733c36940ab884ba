#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fedsparql/rdf/turtle.hpp"
#include "fedsparql/sparql/eval.hpp"
#include "fedsparql/sparql/parser.hpp"
#include "fedsparql/sparql/serializer.hpp"
#include "fedsparql/sparql/transforms.hpp"

#include <random>

using namespace fedsparql;
using namespace fedsparql::sparql;
using rdf::Term;
using rdf::TriplePattern;
using rdf::Variable;

namespace {

// Two-SERVICE federated query over DBLP and Wikidata.
const char* kFederatedPublicationsQuery = R"(
PREFIX dblp:   <https://dblp.org/rdf/schema#>
PREFIX bibo:   <http://purl.org/ontology/bibo/>
PREFIX wdt:    <http://www.wikidata.org/prop/direct/>
SELECT DISTINCT ?dblpPub ?title ?doi ?wikidataItem
WHERE {
 SERVICE <https://dblp.org/sparql> {
   ?dblpPub a bibo:Article ;
           dblp:author ?author ;
           dblp:title  ?title ;
           bibo:doi ?doi .
           ?author dblp:name "Tim Berners-Lee" . }
 SERVICE <https://query.wikidata.org/sparql> {
   ?wikidataItem wdt:P356 ?doi . } }
)";

Term ex(const std::string& local) { return Term::iri("http://example.org/" + local); }

rdf::Bgp ship_bgp() {
    rdf::Bgp bgp;
    bgp.patterns.push_back(TriplePattern{Variable{"s"}, Term::iri(std::string(vocab::rdf_type)),
                                         ex("ship")});
    bgp.patterns.push_back(
        TriplePattern{Variable{"s"}, ex("disposition_of_ship"), Term::literal("Captured")});
    return bgp;
}

} // namespace

TEST_CASE("parsing the two-SERVICE federated query") {
    Query q = parse_query(kFederatedPublicationsQuery);
    CHECK(q.form == Query::Form::Select);
    CHECK(q.distinct);
    CHECK(q.projection == std::vector<std::string>{"dblpPub", "title", "doi", "wikidataItem"});
    CHECK(count_services(q) == 2);
    auto eps = service_endpoints(*q.pattern);
    REQUIRE(eps.size() == 2);
    CHECK(eps[0] == "https://dblp.org/sparql");
    CHECK(eps[1] == "https://query.wikidata.org/sparql");

    SUBCASE("round-trips structurally") {
        Query back = parse_query(serialize_query(q));
        CHECK(query_equal(q, back));
    }
    SUBCASE("classified as a conjunctive split, not disjunctive") {
        SplitReport r = classify_splits(*q.pattern);
        CHECK(r.conjunctive);
        CHECK_FALSE(r.disjunctive);
        CHECK(r.endpoints.size() == 2);
    }
    SUBCASE("unwrap rejects two SERVICE nodes") {
        CHECK_THROWS_AS((void)unwrap_single_service(q), TransformError);
    }
}

TEST_CASE("simple star query has one pattern and no SERVICE") {
    Query q = parse_query("SELECT * WHERE { ?s ?p ?o }");
    CHECK(q.select_star);
    REQUIRE(q.pattern->kind == Pattern::Kind::Basic);
    CHECK(q.pattern->bgp.size() == 1);
    CHECK(count_services(q) == 0);
}

TEST_CASE("unsupported features are rejected by name") {
    auto expect_unsupported = [](const char* text, const char* needle) {
        try {
            (void)parse_query(text);
            FAIL_CHECK("expected unsupported-feature error for: " << text);
        } catch (const QueryParseError& e) {
            CHECK(e.kind() == ParseErrorKind::UnsupportedFeature);
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_unsupported("SELECT * WHERE { ?s ?p ?o OPTIONAL { ?s ?q ?v } }", "OPTIONAL");
    expect_unsupported("SELECT * WHERE { ?s <http://x/p>/<http://x/q> ?o }", "property path");
    expect_unsupported("SELECT * WHERE { ?s ?p ?o } ORDER BY ?s", "ORDER");
    expect_unsupported("SELECT (SUM(?x) AS ?t) WHERE { ?s ?p ?x }", "SUM");
    expect_unsupported("SELECT * WHERE { SERVICE ?e { ?s ?p ?o } }", "variable endpoint");
}

TEST_CASE("parse error kinds are distinguishable") {
    try {
        (void)parse_query("SELECT {");
        FAIL("expected syntax error");
    } catch (const QueryParseError& e) {
        CHECK(e.kind() == ParseErrorKind::Syntax);
        CHECK(e.line() == 1);
        CHECK(e.column() > 1);
    }
    try {
        (void)parse_query("SELECT * WHERE { ?s dblp:author ?o }");
        FAIL("expected prefix error");
    } catch (const QueryParseError& e) {
        CHECK(e.kind() == ParseErrorKind::UndefinedPrefix);
        CHECK(std::string(e.what()).find("dblp") != std::string::npos);
    }
    try {
        (void)parse_query("SELECT * WHERE { SERVICE { ?s ?p ?o } }");
        FAIL("expected malformed SERVICE error");
    } catch (const QueryParseError& e) {
        CHECK(e.kind() == ParseErrorKind::MalformedService);
    }
}

TEST_CASE("LIMIT 0 is preserved in serialized text") {
    Query q = parse_query("SELECT ?s WHERE { ?s ?p ?o } LIMIT 0");
    CHECK(q.limit == 0);
    CHECK(serialize_query(q).find("LIMIT 0") != std::string::npos);
}

TEST_CASE("unwrap_single_service") {
    Query q = parse_query("SELECT ?s WHERE { SERVICE <http://e.example/sparql> { ?s ?p ?o } }");
    auto [endpoint, unwrapped] = unwrap_single_service(q);
    CHECK(endpoint == "http://e.example/sparql");
    CHECK(count_services(unwrapped) == 0);
    CHECK(unwrapped.projection == std::vector<std::string>{"s"});
    Query expected = parse_query("SELECT ?s WHERE { ?s ?p ?o }");
    CHECK(query_equal(unwrapped, expected));

    SUBCASE("zero SERVICE nodes is a precondition violation") {
        CHECK_THROWS_AS((void)unwrap_single_service(expected), TransformError);
    }

    SUBCASE("a UNION below the SERVICE is retained") {
        Query u = parse_query("SELECT * WHERE { SERVICE <http://e.example/sparql> {"
                              " { ?s <http://x/p> ?o } UNION { ?s <http://x/q> ?o } } }");
        auto [ep, body] = unwrap_single_service(u);
        CHECK(ep == "http://e.example/sparql");
        CHECK(body.pattern->kind == Pattern::Kind::Union);
        Query expected_union = parse_query(
            "SELECT * WHERE { { ?s <http://x/p> ?o } UNION { ?s <http://x/q> ?o } }");
        CHECK(query_equal(body, expected_union));
    }
}

TEST_CASE("build_trivial_federation") {
    rdf::Bgp bgp = ship_bgp();

    SUBCASE("single endpoint collapses the UNION") {
        rdf::Bgp one;
        one.patterns.push_back(bgp.patterns[0]);
        PatternPtr p = build_trivial_federation(one, {"http://a/sparql"});
        CHECK(p->kind == Pattern::Kind::Service);
        CHECK(count_services(*p) == 1);
    }

    SUBCASE("n x |E| SERVICE nodes") {
        PatternPtr p = build_trivial_federation(bgp, {"http://a/sparql", "http://b/sparql"});
        CHECK(count_services(*p) == 4);
        PatternPtr six = build_trivial_federation(
            bgp, {"http://e1/", "http://e2/", "http://e3/", "http://e4/", "http://e5/", "http://e6/"});
        CHECK(count_services(*six) == 12);
    }

    SUBCASE("empty endpoint list is an error") {
        CHECK_THROWS_AS((void)build_trivial_federation(bgp, {}), TransformError);
    }

    SUBCASE("classifies as both split kinds when n >= 2 and |E| >= 2") {
        PatternPtr p = build_trivial_federation(bgp, {"http://a/sparql", "http://b/sparql"});
        SplitReport r = classify_splits(*p);
        CHECK(r.conjunctive);
        CHECK(r.disjunctive);
    }

    SUBCASE("trivial-federation classifier") {
        std::vector<std::string> eps{"http://a/sparql", "http://b/sparql", "http://c/sparql"};
        PatternPtr p = build_trivial_federation(bgp, eps);
        CHECK(is_trivial_federation(*p, eps));
        // Over a strict subset of the endpoints: not trivial.
        PatternPtr sub = build_trivial_federation(bgp, {"http://a/sparql", "http://b/sparql"});
        CHECK_FALSE(is_trivial_federation(*sub, eps));
        // The two-SERVICE federated query is not a trivial federation.
        Query q = parse_query(kFederatedPublicationsQuery);
        CHECK_FALSE(is_trivial_federation(*q.pattern, service_endpoints(*q.pattern)));
    }
}

TEST_CASE("single-SERVICE round trip preserves the solution set") {
    // Evaluating the unwrapped body over g equals evaluating the SERVICE
    // query with the endpoint resolving to g.
    rdf::Graph g = rdf::parse_turtle("@prefix ex: <http://example.org/> .\n"
                                     "ex:s1 a ex:ship . ex:s2 a ex:ship .");
    Query wrapped = parse_query("SELECT ?s WHERE { SERVICE <http://self/sparql> { ?s a <http://example.org/ship> } }");
    auto [ep, body] = unwrap_single_service(wrapped);

    Dataset ds;
    ds.default_graph = &g;
    EvalOptions opts;
    opts.service_resolver = [&](const std::string& endpoint,
                                const Pattern& p) -> std::optional<rdf::SolutionSet> {
        if (endpoint != "http://self/sparql") return std::nullopt;
        return eval_pattern(ds, g, p, {});
    };
    auto via_service = eval_query(ds, wrapped, opts);
    auto direct = eval_query(ds, body, {});
    CHECK(rdf::set_equal(via_service.solutions, direct.solutions));
    CHECK(via_service.solutions.size() == 2);
}

// ---------------------------------------------------------------------------
// Local evaluator semantics.
// ---------------------------------------------------------------------------

namespace {

rdf::Graph people_graph() {
    return rdf::parse_turtle(R"ttl(
@prefix ex: <http://example.org/> .
ex:alice a ex:Person ; ex:age 42 ; ex:name "Alice" .
ex:bob a ex:Person ; ex:age 33 ; ex:name "Bob"@en .
ex:carol a ex:Person ; ex:age 7 ; ex:name "Carol" .
)ttl");
}

rdf::SolutionSet run_select(const rdf::Graph& g, const std::string& text) {
    Dataset ds;
    ds.default_graph = &g;
    return eval_query(ds, parse_query(text), {}).solutions;
}

} // namespace

TEST_CASE("filter evaluation") {
    rdf::Graph g = people_graph();

    CHECK(run_select(g, "PREFIX ex: <http://example.org/> "
                        "SELECT ?p WHERE { ?p ex:age ?a FILTER(?a > 30) }").size() == 2);
    CHECK(run_select(g, "PREFIX ex: <http://example.org/> "
                        "SELECT ?p WHERE { ?p ex:age ?a FILTER(?a >= 33 && ?a < 42) }").size() == 1);
    CHECK(run_select(g, "PREFIX ex: <http://example.org/> "
                        "SELECT ?p WHERE { ?p ex:name ?n FILTER(REGEX(?n, \"^[AB]\", \"i\")) }")
              .size() == 2);
    // Type error (string compared with number) drops the row instead of failing.
    CHECK(run_select(g, "PREFIX ex: <http://example.org/> "
                        "SELECT ?p WHERE { ?p ex:name ?n FILTER(?n > 5) }").empty());
    CHECK(run_select(g, "PREFIX ex: <http://example.org/> "
                        "SELECT ?p WHERE { ?p ex:name ?n FILTER(?n = \"Alice\") }").size() == 1);
    // error || true = true: the name row that is numeric-incomparable still passes via the second arm.
    CHECK(run_select(g, "PREFIX ex: <http://example.org/> "
                        "SELECT ?p WHERE { ?p ex:name ?n FILTER(?n > 5 || ?n = \"Alice\") }")
              .size() == 1);
}

TEST_CASE("union, values and modifiers") {
    rdf::Graph g = people_graph();

    auto rows = run_select(g, "PREFIX ex: <http://example.org/> SELECT ?x WHERE {"
                              " { ?x ex:age 42 } UNION { ?x ex:age 33 } }");
    CHECK(rows.size() == 2);

    rows = run_select(g, "PREFIX ex: <http://example.org/> SELECT ?x ?a WHERE {"
                         " VALUES ?x { ex:alice ex:carol } ?x ex:age ?a }");
    CHECK(rows.size() == 2);

    rows = run_select(g, "PREFIX ex: <http://example.org/> SELECT ?x WHERE {"
                         " ?x a ex:Person } LIMIT 2 OFFSET 2");
    CHECK(rows.size() == 1);

    rows = run_select(g, "PREFIX ex: <http://example.org/> SELECT DISTINCT ?c WHERE {"
                         " ?x a ?c }");
    CHECK(rows.size() == 1);
}

TEST_CASE("count aggregates") {
    rdf::Graph g = people_graph();

    auto rows = run_select(g, "PREFIX ex: <http://example.org/> "
                              "SELECT (COUNT(*) AS ?n) WHERE { ?x a ex:Person }");
    REQUIRE(rows.size() == 1);
    CHECK(rows.rows[0].lookup("n")->value() == "3");

    rows = run_select(g, "PREFIX ex: <http://example.org/> "
                         "SELECT ?c (COUNT(DISTINCT ?x) AS ?n) WHERE { ?x a ?c } GROUP BY ?c");
    REQUIRE(rows.size() == 1);
    CHECK(rows.rows[0].lookup("n")->value() == "3");
    CHECK(rows.variables == std::vector<std::string>{"c", "n"});

    // COUNT of a sometimes-unbound variable counts bound occurrences only.
    rows = run_select(g, "PREFIX ex: <http://example.org/> SELECT (COUNT(?y) AS ?n) WHERE {"
                         " { ?x ex:age 42 } UNION { ?x ex:age 33 . ?x ex:name ?y } }");
    REQUIRE(rows.size() == 1);
    CHECK(rows.rows[0].lookup("n")->value() == "1");
}

TEST_CASE("ASK and named graphs") {
    rdf::Graph g = people_graph();
    rdf::Graph meta = rdf::parse_turtle("@prefix ex: <http://example.org/> .\n"
                                        "ex:ds ex:about ex:people .");
    Dataset ds;
    ds.default_graph = &g;
    ds.named["urn:meta"] = &meta;

    auto ask = eval_query(ds, parse_query("ASK {}"), {});
    CHECK(ask.is_ask);
    CHECK(ask.ask);

    auto r = eval_query(ds, parse_query("SELECT ?g ?s WHERE { GRAPH ?g { ?s ?p ?o } }"), {});
    REQUIRE(r.solutions.size() == 1);
    CHECK(r.solutions.rows[0].lookup("g")->value() == "urn:meta");

    auto r2 = eval_query(ds, parse_query("SELECT ?s WHERE { GRAPH <urn:meta> { ?s ?p ?o } }"), {});
    CHECK(r2.solutions.size() == 1);
    auto r3 = eval_query(ds, parse_query("SELECT ?s WHERE { GRAPH <urn:other> { ?s ?p ?o } }"), {});
    CHECK(r3.solutions.empty());
}

// ---------------------------------------------------------------------------
// Round-trip property over generated ASTs.
// ---------------------------------------------------------------------------

namespace {

struct AstGen {
    std::mt19937 rng;
    explicit AstGen(unsigned seed) : rng(seed) {}

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

    Term term() {
        switch (pick(5)) {
        case 0: return ex("r" + std::to_string(pick(4)));
        case 1: return Term::literal("v" + std::to_string(pick(4)));
        case 2: return Term::literal(std::to_string(pick(90)), std::string(vocab::xsd_integer));
        case 3: return Term::lang_literal("wert", "de");
        default: return Term::iri(std::string(vocab::rdf_type));
        }
    }

    rdf::TermOrVar slot(bool allow_literal) {
        if (pick(2) == 0) return Variable{std::string(1, static_cast<char>('a' + pick(3)))};
        Term t = term();
        if (!allow_literal)
            while (t.is_literal()) t = term();
        return t;
    }

    rdf::Bgp bgp(int max_patterns) {
        rdf::Bgp out;
        int n = 1 + pick(max_patterns);
        for (int i = 0; i < n; ++i) {
            rdf::TermOrVar p = slot(false);
            if (!rdf::is_var(p) && !rdf::as_term(p).is_iri()) p = ex("p" + std::to_string(pick(3)));
            out.patterns.push_back(TriplePattern{slot(false), p, slot(true)});
        }
        return out;
    }

    ExprPtr expr(int depth) {
        if (depth == 0 || pick(3) == 0) {
            ExprPtr l = pick(2) == 0 ? expr_var(std::string(1, static_cast<char>('a' + pick(3))))
                                     : expr_const(term());
            const char* ops[] = {"=", "!=", "<", "<=", ">", ">="};
            ExprPtr r = expr_const(term());
            return expr_compare(ops[pick(6)], l, r);
        }
        switch (pick(4)) {
        case 0: return expr_and(expr(depth - 1), expr(depth - 1));
        case 1: return expr_or(expr(depth - 1), expr(depth - 1));
        case 2: return expr_not(expr(depth - 1));
        default:
            return expr_regex(expr_var("a"), expr_const(Term::literal("^x")),
                              pick(2) ? expr_const(Term::literal("i")) : nullptr);
        }
    }

    // Elements the parser would produce: no two adjacent Basic children in a Join.
    PatternPtr pattern(int depth) {
        std::vector<PatternPtr> elements;
        int n = 1 + pick(3);
        bool last_basic = false;
        for (int i = 0; i < n; ++i) {
            PatternPtr e = element(depth);
            if (e->kind == Pattern::Kind::Basic) {
                if (last_basic) continue;
                last_basic = true;
            } else {
                last_basic = false;
            }
            elements.push_back(std::move(e));
        }
        PatternPtr out = elements.size() == 1 ? elements.front() : make_join(std::move(elements));
        if (pick(4) == 0) out = make_filter(out, expr(1));
        return out;
    }

    PatternPtr element(int depth) {
        if (depth == 0) return make_basic(bgp(2));
        switch (pick(5)) {
        case 0: {
            std::vector<PatternPtr> branches;
            int n = 2 + pick(2);
            for (int i = 0; i < n; ++i) branches.push_back(pattern(depth - 1));
            return make_union(std::move(branches));
        }
        case 1:
            return make_service("http://e" + std::to_string(pick(3)) + ".example/sparql",
                                pattern(depth - 1), pick(3) == 0);
        case 2: {
            ValuesBlock vb;
            vb.vars = {"a"};
            int n = 1 + pick(3);
            for (int i = 0; i < n; ++i)
                vb.rows.push_back({pick(4) == 0 ? std::optional<Term>{} : std::optional<Term>{term()}});
            return make_values(std::move(vb));
        }
        default: return make_basic(bgp(3));
        }
    }

    Query query() {
        Query q;
        q.pattern = pattern(2 + pick(2)); // depth <= 4 counting nested groups
        if (pick(3) == 0) q.form = Query::Form::Ask;
        if (q.form == Query::Form::Select) {
            q.select_star = true;
            q.distinct = pick(2) == 0;
            if (pick(2) == 0) q.limit = pick(10);
            if (pick(3) == 0) q.offset = pick(5);
            if (pick(4) == 0) {
                CountSpec c;
                c.alias = "n";
                c.distinct = pick(2) == 0;
                q.count = c;
                q.select_star = false;
            }
        }
        return q;
    }
};

} // namespace

TEST_CASE("property: generated ASTs round-trip through text") {
    AstGen gen(2024);
    for (int i = 0; i < 200; ++i) {
        Query q = gen.query();
        std::string text = serialize_query(q);
        CAPTURE(text);
        Query back = parse_query(text);
        REQUIRE(query_equal(q, back));
    }
}

TEST_CASE("prefixed serialization stays parseable and equivalent") {
    Query q = parse_query(kFederatedPublicationsQuery);
    std::map<std::string, std::string> prefixes{{"dblp", "https://dblp.org/rdf/schema#"},
                                                {"bibo", "http://purl.org/ontology/bibo/"}};
    Query back = parse_query(serialize_query(q, &prefixes));
    CHECK(query_equal(q, back));
}
