#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fedsparql/net/endpoint_client.hpp"
#include "fedsparql/rdf/eval.hpp"
#include "fedsparql/rdf/turtle.hpp"
#include "fedsparql/sim/simulator.hpp"

#include <httplib.h>

#include <thread>

using namespace fedsparql;
using namespace std::chrono_literals;

namespace {

rdf::Graph fixture_graph() {
    return rdf::parse_turtle(R"ttl(
@prefix ex: <http://example.org/> .
ex:alice a ex:Person ; ex:name "Alice" ; ex:knows ex:bob .
ex:bob a ex:Person ; ex:name "Bob" ; ex:knows ex:carol .
ex:carol a ex:Person ; ex:name "Carol" .
ex:dana a ex:Robot ; ex:name "Dana" .
)ttl");
}

net::QueryRequest request(std::string query, std::chrono::milliseconds timeout = 5000ms) {
    net::QueryRequest req;
    req.query = std::move(query);
    req.timeout = timeout;
    return req;
}

} // namespace

TEST_CASE("simulator answers match the local oracle") {
    rdf::Graph g = fixture_graph();
    sim::Simulator sv(g);
    std::string url = sv.start();
    net::EndpointClient client;

    auto out = client.execute(url, request("SELECT * WHERE { ?s ?p ?o }"));
    REQUIRE(out.ok());
    REQUIRE(out.solutions.has_value());
    CHECK(out.solutions->rows.size() == g.size());

    SUBCASE("a typed query equals eval_bgp over the served graph") {
        auto r = client.execute(url, request(
            "SELECT ?s WHERE { ?s <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> "
            "<http://example.org/Person> }"));
        REQUIRE(r.ok());
        rdf::Bgp bgp;
        bgp.patterns.push_back(rdf::TriplePattern{
            rdf::Variable{"s"}, rdf::Term::iri(std::string(vocab::rdf_type)),
            rdf::Term::iri("http://example.org/Person")});
        CHECK(rdf::set_equal(*r.solutions, rdf::eval_bgp(g, bgp)));
    }

    SUBCASE("ASK {} over any graph is true") {
        auto r = client.execute(url, request("ASK {}"));
        REQUIRE(r.ok());
        CHECK(r.ask == true);
    }

    SUBCASE("repeat execution is idempotent") {
        auto a = client.execute(url, request("SELECT ?s WHERE { ?s ?p ?o }"));
        auto b = client.execute(url, request("SELECT ?s WHERE { ?s ?p ?o }"));
        REQUIRE(a.ok());
        REQUIRE(b.ok());
        CHECK(rdf::set_equal(*a.solutions, *b.solutions));
        CHECK(a.solutions->rows.size() == b.solutions->rows.size());
    }

    SUBCASE("request log sees one entry per query, unwrapped text on the wire") {
        sv.clear_log();
        (void)client.execute(url, request("ASK {}"));
        (void)client.execute(url, request("SELECT * WHERE { ?s ?p ?o }"));
        (void)client.execute(url, request("SELECT * WHERE { ?s ?p ?o } LIMIT 1"));
        auto log = sv.request_log();
        REQUIRE(log.size() == 3);
        CHECK(log[0].query == "ASK {}");
        CHECK(log[2].status == 200);
    }
}

TEST_CASE("feature restrictions produce keyword-bearing 400s") {
    rdf::Graph g = fixture_graph();

    SUBCASE("SERVICE blocked") {
        sim::SimConfig cfg;
        cfg.features.service = false;
        sim::Simulator sv(g, cfg);
        std::string url = sv.start();
        net::EndpointClient client;
        auto out = client.execute(
            url, request("SELECT * WHERE { SERVICE <" + url + "> { ?s ?p ?o } }"));
        REQUIRE_FALSE(out.ok());
        CHECK(out.error->kind == net::ErrorKind::FeatureUnsupported);
        CHECK(out.error->message.find("SERVICE") != std::string::npos);
        CHECK(out.error->status == 400);
    }

    SUBCASE("VALUES blocked, detected by the probe") {
        sim::SimConfig cfg;
        cfg.features.values = false;
        sim::Simulator sv(g, cfg);
        std::string url = sv.start();
        net::EndpointClient client;
        auto probed = client.probe_capabilities(url);
        REQUIRE(std::holds_alternative<net::Capabilities>(probed));
        auto caps = std::get<net::Capabilities>(probed);
        CHECK_FALSE(caps.values);
        CHECK(caps.service);
        CHECK(caps.aggregates);
    }

    SUBCASE("aggregates blocked") {
        sim::SimConfig cfg;
        cfg.features.aggregates = false;
        sim::Simulator sv(g, cfg);
        std::string url = sv.start();
        net::EndpointClient client;
        auto out = client.execute(url, request("SELECT (COUNT(*) AS ?n) WHERE { ?s ?p ?o }"));
        REQUIRE_FALSE(out.ok());
        CHECK(out.error->kind == net::ErrorKind::FeatureUnsupported);
        CHECK(out.error->message.find("COUNT") != std::string::npos);
    }

    SUBCASE("fully-featured endpoint probes all-true") {
        sim::Simulator sv(g);
        std::string url = sv.start();
        net::EndpointClient client;
        auto probed = client.probe_capabilities(url);
        REQUIRE(std::holds_alternative<net::Capabilities>(probed));
        auto caps = std::get<net::Capabilities>(probed);
        CHECK(caps.values);
        CHECK(caps.service);
        CHECK(caps.aggregates);
        CHECK_FALSE(caps.result_limit.has_value());
    }
}

TEST_CASE("result caps are observable") {
    rdf::Graph g = fixture_graph();
    sim::SimConfig cfg;
    cfg.result_limit = 3;
    sim::Simulator sv(g, cfg);
    std::string url = sv.start();
    net::EndpointClient client;

    auto out = client.execute(url, request("SELECT * WHERE { ?s ?p ?o }"));
    REQUIRE(out.ok());
    CHECK(out.solutions->rows.size() == 3); // min(true rows, cap)

    auto probed = client.probe_capabilities(url);
    REQUIRE(std::holds_alternative<net::Capabilities>(probed));
    auto caps = std::get<net::Capabilities>(probed);
    REQUIRE(caps.result_limit.has_value());
    CHECK(*caps.result_limit <= 3);
}

TEST_CASE("availability and latency injection") {
    rdf::Graph g = fixture_graph();

    SUBCASE("down endpoint classifies unavailable and logs nothing") {
        sim::SimConfig cfg;
        cfg.availability = sim::Availability::Down;
        sim::Simulator sv(g, cfg);
        std::string url = sv.start();
        net::EndpointClient client;
        auto out = client.execute(url, request("ASK {}", 2000ms));
        REQUIRE_FALSE(out.ok());
        CHECK(out.error->kind == net::ErrorKind::Unavailable);
        CHECK(sv.request_log().empty());
        // One retry with backoff happened before giving up.
        CHECK(out.elapsed >= 250ms);
    }

    SUBCASE("latency beyond the deadline classifies timeout, within slack") {
        sim::SimConfig cfg;
        cfg.latency = 1200ms;
        sim::Simulator sv(g, cfg);
        std::string url = sv.start();
        net::EndpointClient client;
        auto start = std::chrono::steady_clock::now();
        auto out = client.execute(url, request("ASK {}", 300ms));
        auto wall = std::chrono::steady_clock::now() - start;
        REQUIRE_FALSE(out.ok());
        CHECK(out.error->kind == net::ErrorKind::Timeout);
        CHECK(out.error->elapsed >= 250ms);
        CHECK(wall <= 1300ms); // timeout + 1 s slack
    }

    SUBCASE("latency below the deadline just delays the answer") {
        sim::SimConfig cfg;
        cfg.latency = 300ms;
        sim::Simulator sv(g, cfg);
        std::string url = sv.start();
        net::EndpointClient client;
        auto out = client.execute(url, request("ASK {}", 5000ms));
        REQUIRE(out.ok());
        CHECK(out.elapsed >= 300ms);
    }

    SUBCASE("flaky with probability 1 behaves like down") {
        sim::SimConfig cfg;
        cfg.availability = sim::Availability::Flaky;
        cfg.flaky_probability = 1.0;
        sim::Simulator sv(g, cfg);
        std::string url = sv.start();
        net::EndpointClient client;
        auto out = client.execute(url, request("ASK {}", 2000ms));
        REQUIRE_FALSE(out.ok());
        CHECK(out.error->kind == net::ErrorKind::Unavailable);
    }

    SUBCASE("availability can be toggled at runtime") {
        sim::Simulator sv(g);
        std::string url = sv.start();
        net::EndpointClient client;
        REQUIRE(client.execute(url, request("ASK {}")).ok());
        sv.set_availability(sim::Availability::Down);
        CHECK_FALSE(client.execute(url, request("ASK {}", 2000ms)).ok());
        sv.set_availability(sim::Availability::Up);
        CHECK(client.execute(url, request("ASK {}")).ok());
    }
}

TEST_CASE("long queries switch to POST and still execute") {
    rdf::Graph g = fixture_graph();
    sim::Simulator sv(g);
    std::string url = sv.start();
    net::EndpointClient client;

    // Inflate beyond the GET threshold with a harmless UNION chain.
    std::string query = "SELECT * WHERE { { ?s ?p ?o } ";
    while (query.size() < net::EndpointClient::kGetThresholdBytes + 200)
        query += "UNION { ?s <http://example.org/knows> ?o } ";
    query += "}";
    auto out = client.execute(url, request(query));
    REQUIRE(out.ok());
    CHECK(out.solutions->rows.size() >= g.size());
}

TEST_CASE("malformed responses and parse failures classify correctly") {
    SUBCASE("non-JSON 200 body is malformed-results") {
        httplib::Server bogus;
        bogus.Get("/sparql", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("this is not json", "text/plain");
        });
        int port = bogus.bind_to_any_port("127.0.0.1");
        std::thread t([&] { bogus.listen_after_bind(); });
        bogus.wait_until_ready();
        net::EndpointClient client;
        auto out = client.execute("http://127.0.0.1:" + std::to_string(port) + "/sparql",
                                  request("ASK {}"));
        REQUIRE_FALSE(out.ok());
        CHECK(out.error->kind == net::ErrorKind::MalformedResults);
        bogus.stop();
        t.join();
    }

    SUBCASE("syntactically broken query yields a 4xx http-status error") {
        rdf::Graph g = fixture_graph();
        sim::Simulator sv(g);
        std::string url = sv.start();
        net::EndpointClient client;
        auto out = client.execute(url, request("SELECT {"));
        REQUIRE_FALSE(out.ok());
        CHECK(out.error->kind == net::ErrorKind::HttpStatus);
        CHECK(out.error->status == 400);
    }
}

TEST_CASE("client row cap flags truncation") {
    rdf::Graph g = fixture_graph();
    sim::Simulator sv(g);
    std::string url = sv.start();
    net::EndpointClient client;
    net::QueryRequest req = request("SELECT * WHERE { ?s ?p ?o }");
    req.row_cap = 2;
    auto out = client.execute(url, req);
    REQUIRE(out.ok());
    CHECK(out.truncated);
    CHECK(out.solutions->rows.size() == 2);
}
