#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fedsparql/fed/engine.hpp"
#include "fedsparql/rdf/turtle.hpp"
#include "fedsparql/sim/simulator.hpp"
#include "fedsparql/sparql/parser.hpp"
#include "fedsparql/sparql/serializer.hpp"
#include "fedsparql/sparql/transforms.hpp"

using namespace fedsparql;
using namespace std::chrono_literals;
using fed::FederatedPlan;
using fed::FederationEngine;
using fed::FedError;
using fed::JoinStrategy;
using fed::PlanPtr;
using fed::PlanUnit;
using rdf::Term;
using rdf::TriplePattern;
using rdf::Variable;

namespace {

const char* kFederatedPublicationsQuery = R"(
PREFIX dblp: <https://dblp.org/rdf/schema#>
PREFIX bibo: <http://purl.org/ontology/bibo/>
PREFIX wdt:  <http://www.wikidata.org/prop/direct/>
SELECT DISTINCT ?dblpPub ?title ?doi ?wikidataItem WHERE {
 SERVICE <https://dblp.org/sparql> {
   ?dblpPub a bibo:Article ; dblp:author ?author ; dblp:title ?title ; bibo:doi ?doi .
   ?author dblp:name "Tim Berners-Lee" . }
 SERVICE <https://query.wikidata.org/sparql> { ?wikidataItem wdt:P356 ?doi . } }
)";

Term ex(const std::string& local) { return Term::iri("http://example.org/" + local); }

rdf::Graph ships_graph() {
    return rdf::parse_turtle(R"ttl(
@prefix ex: <http://example.org/> .
ex:s1 a ex:ship ; ex:disposition_of_ship "Captured" ; ex:year 1805 .
ex:s2 a ex:ship ; ex:disposition_of_ship "Captured" ; ex:year 1812 .
ex:s3 a ex:ship ; ex:disposition_of_ship "Sunk" ; ex:year 1799 .
ex:s4 a ex:ship ; ex:disposition_of_ship "Scrapped" ; ex:year 1820 .
)ttl");
}

rdf::Bgp ship_bgp() {
    rdf::Bgp bgp;
    bgp.patterns.push_back(TriplePattern{Variable{"s"}, Term::iri(std::string(vocab::rdf_type)),
                                         ex("ship")});
    bgp.patterns.push_back(
        TriplePattern{Variable{"s"}, ex("disposition_of_ship"), Term::literal("Captured")});
    return bgp;
}

/// Splits a graph round-robin into n disjoint shards.
std::vector<rdf::Graph> split_graph(const rdf::Graph& g, std::size_t n) {
    std::vector<rdf::Graph> shards(n);
    std::size_t i = 0;
    for (const rdf::Triple& t : g.triples()) shards[i++ % n].insert(t);
    return shards;
}

struct CountsByKind {
    int fetch = 0, join = 0, uni = 0, filter = 0, modifiers = 0;
};

void count_units(const PlanPtr& u, CountsByKind& c) {
    switch (u->kind) {
    case PlanUnit::Kind::RemoteFetch: c.fetch++; return;
    case PlanUnit::Kind::LocalJoin:
        c.join++;
        count_units(u->left, c);
        count_units(u->right, c);
        return;
    case PlanUnit::Kind::LocalUnion:
        c.uni++;
        for (const auto& ch : u->children) count_units(ch, c);
        return;
    case PlanUnit::Kind::LocalFilter:
        c.filter++;
        count_units(u->child, c);
        return;
    case PlanUnit::Kind::LocalModifiers:
        c.modifiers++;
        count_units(u->child, c);
        return;
    }
}

sparql::Query trivial_query(const rdf::Bgp& bgp, const std::vector<std::string>& endpoints,
                            bool count = false) {
    sparql::Query q;
    q.pattern = sparql::build_trivial_federation(bgp, endpoints);
    if (count) {
        sparql::CountSpec spec;
        spec.alias = "n";
        q.count = spec;
    } else {
        q.select_star = true;
    }
    return q;
}

} // namespace

TEST_CASE("decompose shapes") {
    SUBCASE("two-SERVICE publication query: 2 fetches joined on ?doi") {
        sparql::Query q = sparql::parse_query(kFederatedPublicationsQuery);
        FederatedPlan plan = fed::decompose(q);
        CountsByKind c;
        count_units(plan.root, c);
        CHECK(c.fetch == 2);
        CHECK(c.join == 1);
        CHECK(c.uni == 0);
        CHECK(plan.remote_fetch_count == 2);
        // Find the join and check shared vars.
        PlanPtr node = plan.root;
        while (node->kind != PlanUnit::Kind::LocalJoin) node = node->child;
        CHECK(node->shared_vars == std::vector<std::string>{"doi"});
    }

    SUBCASE("no shared variables degenerates to a cross product") {
        sparql::Query q = sparql::parse_query(
            "SELECT * WHERE { SERVICE <http://a.example/sparql> { ?x <http://x/p> ?y } "
            "SERVICE <http://b.example/sparql> { ?u <http://x/q> ?v } }");
        FederatedPlan plan = fed::decompose(q);
        PlanPtr node = plan.root;
        while (node->kind != PlanUnit::Kind::LocalJoin) node = node->child;
        CHECK(node->shared_vars.empty());
    }

    SUBCASE("trivial federation of 2 patterns over 3 endpoints") {
        sparql::Query q = trivial_query(ship_bgp(),
                                        {"http://e1/sparql", "http://e2/sparql", "http://e3/sparql"});
        FederatedPlan plan = fed::decompose(q);
        CountsByKind c;
        count_units(plan.root, c);
        CHECK(c.fetch == 6);
        CHECK(c.uni == 2);
        CHECK(c.join == 1);
    }

    SUBCASE("zero-SERVICE and nested SERVICE are named errors") {
        try {
            (void)fed::decompose(sparql::parse_query("SELECT * WHERE { ?s ?p ?o }"));
            FAIL("expected zero-service error");
        } catch (const FedError& e) {
            CHECK(e.kind() == FedError::Kind::ZeroService);
        }
        try {
            (void)fed::decompose(sparql::parse_query(
                "SELECT * WHERE { SERVICE <http://a/s> { SERVICE <http://b/s> { ?s ?p ?o } } "
                "SERVICE <http://c/s> { ?x ?y ?z } }"));
            FAIL("expected nested-service error");
        } catch (const FedError& e) {
            CHECK(e.kind() == FedError::Kind::NestedService);
        }
    }

    SUBCASE("endpoint-local filters are pushed into the fetch") {
        sparql::Query q = sparql::parse_query(
            "SELECT * WHERE { SERVICE <http://a.example/sparql> { ?x <http://x/p> ?y } "
            "SERVICE <http://b.example/sparql> { ?y <http://x/q> ?v } FILTER(?v > 3) }");
        FederatedPlan plan = fed::decompose(q);
        CountsByKind c;
        count_units(plan.root, c);
        CHECK(c.filter == 0); // pushed into the b.example fetch
    }

    SUBCASE("cross-SERVICE filters stay local") {
        sparql::Query q = sparql::parse_query(
            "SELECT * WHERE { SERVICE <http://a.example/sparql> { ?x <http://x/p> ?y } "
            "SERVICE <http://b.example/sparql> { ?u <http://x/q> ?v } FILTER(?y = ?v) }");
        FederatedPlan plan = fed::decompose(q);
        CountsByKind c;
        count_units(plan.root, c);
        CHECK(c.filter == 1);
    }
}

TEST_CASE("federated execution equals the local oracle") {
    rdf::Graph g = ships_graph();
    auto shards = split_graph(g, 2);
    sim::Simulator sva(shards[0]);
    sim::Simulator svb(shards[1]);
    std::string ua = sva.start();
    std::string ub = svb.start();

    catalogue::Catalogue cat;
    cat.register_endpoint(ua, "shard-a", "");
    cat.register_endpoint(ub, "shard-b", "");
    net::EndpointClient client;
    FederationEngine engine(client, &cat);

    rdf::Bgp bgp = ship_bgp();
    sparql::Query q = trivial_query(bgp, {ua, ub});
    rdf::SolutionSet oracle = rdf::eval_bgp(g, bgp);
    REQUIRE(oracle.size() == 2);

    SUBCASE("hash strategy") {
        auto run = engine.run_federated(q, 20s);
        REQUIRE(run.solutions.has_value());
        CHECK(rdf::set_equal(*run.solutions, oracle));
        CHECK(run.stats.trivial_federation);
        CHECK(run.stats.remote_fetches == 4);

        // Consulted endpoints are exactly the SERVICE targets here.
        auto consulted = run.stats.endpoints_consulted();
        CHECK(consulted.size() == 2);
    }

    SUBCASE("bound strategy gives the identical solution set") {
        fed::EngineOptions opts;
        opts.strategy = JoinStrategy::Bound;
        auto run = engine.run_federated(q, 20s, opts);
        REQUIRE(run.solutions.has_value());
        CHECK(rdf::set_equal(*run.solutions, oracle));

        // VALUES-injected subqueries hit the wire.
        bool saw_values = false;
        for (const auto& entry : sva.request_log())
            if (entry.query.find("VALUES") != std::string::npos) saw_values = true;
        for (const auto& entry : svb.request_log())
            if (entry.query.find("VALUES") != std::string::npos) saw_values = true;
        CHECK(saw_values);
    }

    SUBCASE("bound strategy falls back to hash when VALUES is refused") {
        sim::SimConfig no_values;
        no_values.features.values = false;
        sim::Simulator svc(shards[1], no_values);
        std::string uc = svc.start();
        catalogue::Catalogue cat2;
        cat2.register_endpoint(ua, "a", "");
        cat2.register_endpoint(uc, "c", "");
        FederationEngine engine2(client, &cat2);
        sparql::Query q2 = trivial_query(bgp, {ua, uc});
        fed::EngineOptions opts;
        opts.strategy = JoinStrategy::Bound;
        auto run = engine2.run_federated(q2, 20s, opts);
        REQUIRE(run.solutions.has_value());
        CHECK(rdf::set_equal(*run.solutions, oracle));
    }

    SUBCASE("COUNT through the engine equals the oracle count") {
        sparql::Query qc = trivial_query(bgp, {ua, ub}, /*count=*/true);
        auto run = engine.run_federated(qc, 20s);
        REQUIRE(run.solutions.has_value());
        REQUIRE(run.solutions->rows.size() == 1);
        CHECK(run.solutions->rows[0].lookup("n")->value() == std::to_string(oracle.size()));
    }

    SUBCASE("determinism: two runs, set-equal results") {
        auto r1 = engine.run_federated(q, 20s);
        auto r2 = engine.run_federated(q, 20s);
        CHECK(rdf::set_equal(*r1.solutions, *r2.solutions));
    }
}

TEST_CASE("single-SERVICE dispatch unwraps and sends directly") {
    rdf::Graph g = ships_graph();
    sim::Simulator sv(g);
    std::string url = sv.start();
    catalogue::Catalogue cat;
    cat.register_endpoint(url, "only", "");
    // A second registered endpoint, so a one-SERVICE query cannot be the
    // trivial federation over the full catalogue.
    cat.register_endpoint("http://other.example/sparql", "other", "");
    net::EndpointClient client;
    FederationEngine engine(client, &cat);

    auto run = engine.run_federated(
        "SELECT ?s WHERE { SERVICE <" + url + "> { ?s <http://example.org/disposition_of_ship> "
        "\"Captured\" } }",
        10s);
    REQUIRE(run.solutions.has_value());
    CHECK(run.solutions->rows.size() == 2);

    auto log = sv.request_log();
    REQUIRE(log.size() == 1);
    CHECK(log[0].query.find("SERVICE") == std::string::npos); // unwrapped on the wire
    CHECK(run.stats.endpoints.at(url).requests == 1);
    CHECK_FALSE(run.stats.trivial_federation);
}

TEST_CASE("failure semantics") {
    rdf::Graph g = ships_graph();
    auto shards = split_graph(g, 2);
    sim::Simulator sva(shards[0]);
    sim::SimConfig down_cfg;
    down_cfg.availability = sim::Availability::Down;
    sim::Simulator svb(shards[1], down_cfg);
    std::string ua = sva.start();
    std::string ub = svb.start();
    net::EndpointClient client;
    FederationEngine engine(client);

    rdf::Bgp single;
    single.patterns.push_back(ship_bgp().patterns[0]);

    SUBCASE("SILENT branch over a down endpoint contributes the empty set") {
        sparql::PatternPtr p = sparql::make_union(
            {sparql::make_service(ua, sparql::make_basic(single), true),
             sparql::make_service(ub, sparql::make_basic(single), true)});
        sparql::Query q;
        q.select_star = true;
        q.pattern = p;
        auto run = engine.run_federated(q, 10s);
        REQUIRE(run.solutions.has_value());
        CHECK(rdf::set_equal(*run.solutions, rdf::eval_bgp(shards[0], single)));
    }

    SUBCASE("non-SILENT failure carries the typed endpoint error") {
        sparql::Query q = trivial_query(single, {ua, ub});
        try {
            (void)engine.run_federated(q, 10s);
            FAIL("expected execution error");
        } catch (const FedError& e) {
            CHECK(e.kind() == FedError::Kind::Execution);
            REQUIRE(e.cause().has_value());
            CHECK(e.cause()->kind == net::ErrorKind::Unavailable);
            CHECK_FALSE(e.stats.endpoints.empty());
        }
    }
}

TEST_CASE("independent fetches run concurrently") {
    rdf::Graph g = ships_graph();
    auto shards = split_graph(g, 4);
    std::vector<std::unique_ptr<sim::Simulator>> sims;
    std::vector<std::string> urls;
    for (std::size_t i = 0; i < 4; ++i) {
        sim::SimConfig cfg;
        if (i == 0) cfg.latency = 2000ms;
        sims.push_back(std::make_unique<sim::Simulator>(shards[i], cfg));
        urls.push_back(sims.back()->start());
    }
    net::EndpointClient client;
    FederationEngine engine(client);

    rdf::Bgp single;
    single.patterns.push_back(ship_bgp().patterns[0]);
    sparql::Query q = trivial_query(single, urls);

    auto started = std::chrono::steady_clock::now();
    auto run = engine.run_federated(q, 30s);
    auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);
    REQUIRE(run.solutions.has_value());
    CHECK(rdf::set_equal(*run.solutions, rdf::eval_bgp(g, single)));
    CHECK(wall.count() >= 2000); // the slow endpoint is on the critical path once
    CHECK(wall.count() < 2600);  // but not 4 x 2 s
}

TEST_CASE("deadline budgeting fails cleanly") {
    rdf::Graph g = ships_graph();
    sim::SimConfig cfg;
    cfg.latency = 1500ms;
    sim::Simulator sva(g, cfg);
    sim::Simulator svb(g);
    std::string ua = sva.start();
    std::string ub = svb.start();
    net::EndpointClient client;
    FederationEngine engine(client);

    rdf::Bgp single;
    single.patterns.push_back(ship_bgp().patterns[0]);
    sparql::Query q = trivial_query(single, {ua, ub});
    try {
        (void)engine.run_federated(q, 300ms);
        FAIL("expected deadline/execution failure");
    } catch (const FedError& e) {
        bool acceptable = e.kind() == FedError::Kind::Deadline ||
                          (e.kind() == FedError::Kind::Execution && e.cause() &&
                           e.cause()->kind == net::ErrorKind::Timeout);
        CHECK(acceptable);
    }
}

TEST_CASE("trivial-federation statistics classifier") {
    catalogue::Catalogue cat;
    cat.register_endpoint("http://e1.example/sparql", "a", "");
    cat.register_endpoint("http://e2.example/sparql", "b", "");
    cat.register_endpoint("http://e3.example/sparql", "c", "");
    net::EndpointClient client;
    FederationEngine engine(client, &cat);

    sparql::Query q = trivial_query(
        ship_bgp(), {"http://e1.example/sparql", "http://e2.example/sparql",
                     "http://e3.example/sparql"});
    CHECK(engine.stats_classify_trivial(q));

    sparql::Query subset = trivial_query(
        ship_bgp(), {"http://e1.example/sparql", "http://e2.example/sparql"});
    CHECK_FALSE(engine.stats_classify_trivial(subset));

    sparql::Query pub = sparql::parse_query(kFederatedPublicationsQuery);
    CHECK_FALSE(engine.stats_classify_trivial(pub));
}
