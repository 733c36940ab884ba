#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fedsparql/catalogue/catalogue.hpp"
#include "fedsparql/catalogue/void_service.hpp"
#include "fedsparql/rdf/turtle.hpp"
#include "fedsparql/sim/simulator.hpp"

#include <filesystem>
#include <map>
#include <set>

using namespace fedsparql;
using catalogue::Catalogue;
using catalogue::VoidDescription;
using catalogue::VoidOptions;
using catalogue::VoidService;
using catalogue::VoidSource;

namespace {

// Five triples, two classes.
const char* kSmallFixture = R"ttl(
@prefix ex: <http://example.org/> .
ex:a a ex:Ship ; ex:name "A" .
ex:b a ex:Ship .
ex:c a ex:Port ; ex:name "C" .
)ttl";

// Independent brute-force counting oracle; deliberately re-derives every
// statistic straight from the triple list.
struct BruteCounts {
    std::uint64_t triples = 0;
    std::map<std::string, std::set<std::string>> class_entities;
    std::map<std::string, std::uint64_t> property_triples;
    std::set<std::string> subjects, objects;
};

BruteCounts brute_force(const rdf::Graph& g) {
    BruteCounts out;
    for (const rdf::Triple& t : g.triples()) {
        ++out.triples;
        out.property_triples[t.predicate().value()] += 1;
        out.subjects.insert(t.subject().ntriples());
        out.objects.insert(t.object().ntriples());
        if (t.predicate().value() == vocab::rdf_type && t.object().is_iri())
            out.class_entities[t.object().value()].insert(t.subject().ntriples());
    }
    return out;
}

void check_against_oracle(const VoidDescription& desc, const rdf::Graph& g) {
    BruteCounts oracle = brute_force(g);
    CHECK(desc.triples == oracle.triples);
    CHECK(desc.distinct_subjects == oracle.subjects.size());
    CHECK(desc.distinct_objects == oracle.objects.size());
    REQUIRE(desc.class_partitions.size() == oracle.class_entities.size());
    for (const auto& [cls, n] : desc.class_partitions) {
        REQUIRE(oracle.class_entities.count(cls) == 1);
        CHECK(n == oracle.class_entities.at(cls).size());
    }
    REQUIRE(desc.property_partitions.size() == oracle.property_triples.size());
    std::uint64_t prop_sum = 0;
    for (const auto& [prop, n] : desc.property_partitions) {
        REQUIRE(oracle.property_triples.count(prop) == 1);
        CHECK(n == oracle.property_triples.at(prop));
        prop_sum += n;
    }
    // Partition completeness: property counts add up to the total.
    CHECK(prop_sum == desc.triples);
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("fedsparql_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string str() const { return path.string(); }
};

} // namespace

TEST_CASE("registry basics") {
    Catalogue cat;
    cat.register_endpoint("http://127.0.0.1:1/sparql", "one", "First endpoint.");
    cat.register_endpoint("http://127.0.0.1:2/sparql", "two", "Second endpoint.");
    CHECK(cat.entries().size() == 2);
    CHECK_THROWS_AS(cat.register_endpoint("http://127.0.0.1:1/sparql", "dup", ""),
                    catalogue::DuplicateEndpoint);
    CHECK_THROWS_AS(cat.register_endpoint("not a url", "x", ""), std::invalid_argument);

    SUBCASE("registry file round-trips across restart") {
        TempDir dir;
        cat.set_cache_dir(dir.str() + "/void");
        net::Capabilities caps;
        caps.values = false;
        caps.result_limit = 100;
        cat.set_capabilities("http://127.0.0.1:1/sparql", caps);
        std::string reg = dir.str() + "/registry.json";
        cat.save(reg);

        Catalogue back = Catalogue::load(reg);
        REQUIRE(back.entries().size() == 2);
        auto e = back.find("http://127.0.0.1:1/sparql");
        REQUIRE(e.has_value());
        CHECK(e->label == "one");
        CHECK(e->description == "First endpoint.");
        REQUIRE(e->capabilities.has_value());
        CHECK_FALSE(e->capabilities->values);
        CHECK(e->capabilities->result_limit == 100);
    }
}

TEST_CASE("void description graph round-trip") {
    rdf::Graph g = rdf::parse_turtle(kSmallFixture);
    VoidDescription d = catalogue::describe_graph(g, "http://x/sparql#dataset");
    check_against_oracle(d, g);

    auto back = VoidDescription::from_graph(d.to_graph());
    REQUIRE(back.has_value());
    CHECK(back->triples == d.triples);
    CHECK(back->distinct_subjects == d.distinct_subjects);
    CHECK(back->distinct_objects == d.distinct_objects);
    CHECK(std::set(back->class_partitions.begin(), back->class_partitions.end()) ==
          std::set(d.class_partitions.begin(), d.class_partitions.end()));
    CHECK(std::set(back->property_partitions.begin(), back->property_partitions.end()) ==
          std::set(d.property_partitions.begin(), d.property_partitions.end()));
}

TEST_CASE("compute_void equals brute force") {
    rdf::Graph g = rdf::parse_turtle(kSmallFixture);
    REQUIRE(g.size() == 5);

    TempDir dir;
    Catalogue cat;
    cat.set_cache_dir(dir.str());
    net::EndpointClient client;
    VoidService service(cat, client);

    SUBCASE("via aggregate queries") {
        sim::Simulator sv(g);
        std::string url = sv.start();
        cat.register_endpoint(url, "fixture", "");
        VoidDescription d = service.compute(url, {});
        check_against_oracle(d, g);
    }

    SUBCASE("empty graph computes zero everything") {
        sim::Simulator sv(rdf::Graph{});
        std::string url = sv.start();
        cat.register_endpoint(url, "empty", "");
        VoidDescription d = service.compute(url, {});
        CHECK(d.triples == 0);
        CHECK(d.class_partitions.empty());
        CHECK(d.property_partitions.empty());
    }

    SUBCASE("aggregate-free endpoints fall back to a paged scan, same counts") {
        sim::SimConfig cfg;
        cfg.features.aggregates = false;
        cfg.result_limit = 2; // also exercise server-side caps during paging
        sim::Simulator sv(g, cfg);
        std::string url = sv.start();
        cat.register_endpoint(url, "no-agg", "");
        VoidOptions opts;
        opts.scan_page_size = 3;
        VoidDescription d = service.compute(url, opts);
        check_against_oracle(d, g);
    }
}

TEST_CASE("retrieve_void stage selection") {
    rdf::Graph g = rdf::parse_turtle(kSmallFixture);
    TempDir dir;
    Catalogue cat;
    cat.set_cache_dir(dir.str());
    net::EndpointClient client;
    VoidService service(cat, client);

    SUBCASE("well-known URL wins first") {
        sim::SimConfig cfg;
        cfg.publish_void = sim::VoidPublish::WellKnown;
        sim::Simulator sv(g, cfg);
        std::string url = sv.start();
        auto d = service.retrieve(url, std::chrono::milliseconds(5000));
        REQUIRE(d.has_value());
        check_against_oracle(*d, g);
    }

    SUBCASE("default-graph publication is found by query") {
        sim::SimConfig cfg;
        cfg.publish_void = sim::VoidPublish::DefaultGraph;
        sim::Simulator sv(g, cfg);
        std::string url = sv.start();
        auto d = service.retrieve(url, std::chrono::milliseconds(5000));
        REQUIRE(d.has_value());
        check_against_oracle(*d, g);
    }

    SUBCASE("named-graph publication is found via GRAPH ?g") {
        sim::SimConfig cfg;
        cfg.publish_void = sim::VoidPublish::NamedGraph;
        sim::Simulator sv(g, cfg);
        std::string url = sv.start();
        auto d = service.retrieve(url, std::chrono::milliseconds(5000));
        REQUIRE(d.has_value());
        check_against_oracle(*d, g);
    }

    SUBCASE("no publication anywhere yields nothing") {
        sim::Simulator sv(g);
        std::string url = sv.start();
        CHECK_FALSE(service.retrieve(url, std::chrono::milliseconds(5000)).has_value());
    }
}

TEST_CASE("get_void_descriptions is step-wise and caches") {
    rdf::Graph g = rdf::parse_turtle(kSmallFixture);
    TempDir dir;
    Catalogue cat;
    cat.set_cache_dir(dir.str());
    net::EndpointClient client;
    VoidService service(cat, client);

    SUBCASE("cold cache with published VoID: retrieved, then cache with zero requests") {
        sim::SimConfig cfg;
        cfg.publish_void = sim::VoidPublish::WellKnown;
        sim::Simulator sv(g, cfg);
        std::string url = sv.start();
        cat.register_endpoint(url, "pub", "");

        auto first = service.get(url);
        CHECK(first.source == VoidSource::Retrieved);
        check_against_oracle(first.description, g);

        sv.clear_log();
        auto second = service.get(url);
        CHECK(second.source == VoidSource::Cache);
        CHECK(sv.request_log().empty()); // no endpoint requests on a cache hit
        CHECK(second.description.triples == first.description.triples);

        // --refresh bypasses the cache and hits the endpoint again.
        VoidOptions refresh;
        refresh.refresh = true;
        auto third = service.get(url, refresh);
        CHECK(third.source == VoidSource::Retrieved);
        CHECK_FALSE(sv.request_log().empty());
    }

    SUBCASE("cold cache without published VoID: computed, cache file appears") {
        sim::Simulator sv(g);
        std::string url = sv.start();
        cat.register_endpoint(url, "nopub", "");

        auto result = service.get(url);
        CHECK(result.source == VoidSource::Computed);
        check_against_oracle(result.description, g);
        CHECK(std::filesystem::exists(cat.void_cache_path(url)));

        auto again = service.get(url);
        CHECK(again.source == VoidSource::Cache);
    }

    SUBCASE("unreachable endpoint with cold cache raises a typed error") {
        cat.register_endpoint("http://127.0.0.1:9/sparql", "down", "");
        try {
            (void)service.get("http://127.0.0.1:9/sparql");
            FAIL("expected VoidError");
        } catch (const catalogue::VoidError& e) {
            CHECK(e.underlying().kind == net::ErrorKind::Unavailable);
        }
    }
}

TEST_CASE("extended descriptions carry linksets for cross-shard object IRIs") {
    // Shard A holds ships pointing at ports; shard B holds the ports.
    rdf::Graph ships = rdf::parse_turtle(R"ttl(
@prefix ex: <http://example.org/> .
ex:s1 a ex:Ship ; ex:home_port ex:p1 .
ex:s2 a ex:Ship ; ex:home_port ex:p2 .
)ttl");
    rdf::Graph ports = rdf::parse_turtle(R"ttl(
@prefix ex: <http://example.org/> .
ex:p1 a ex:Port . ex:p2 a ex:Port .
)ttl");

    TempDir dir;
    Catalogue cat;
    cat.set_cache_dir(dir.str());
    net::EndpointClient client;
    VoidService service(cat, client);

    sim::Simulator sva(ships);
    sim::Simulator svb(ports);
    std::string ua = sva.start();
    std::string ub = svb.start();
    cat.register_endpoint(ua, "ships", "");
    cat.register_endpoint(ub, "ports", "");

    // Brute-force oracle: home_port objects of A that occur as subjects in B.
    std::set<std::string> b_subjects;
    for (const rdf::Triple& t : ports.triples()) b_subjects.insert(t.subject().value());
    std::uint64_t expected = 0;
    for (const rdf::Triple& t : ships.triples())
        if (t.predicate().value() == "http://example.org/home_port" && t.object().is_iri() &&
            b_subjects.count(t.object().value()))
            ++expected;
    REQUIRE(expected == 2);

    SUBCASE("exact mode matches the brute-force intersection") {
        VoidOptions opts;
        opts.extended = true;
        opts.exact_linksets = true;
        auto result = service.get(ua, opts);
        REQUIRE_FALSE(result.description.linksets.empty());
        std::uint64_t got = 0;
        for (const auto& ls : result.description.linksets)
            if (ls.link_predicate == "http://example.org/home_port" && ls.objects_target == ub)
                got = ls.triples;
        CHECK(got == expected);
    }

    SUBCASE("approximate mode finds a non-empty linkset too") {
        VoidOptions opts;
        opts.extended = true;
        auto result = service.get(ua, opts);
        bool found = false;
        for (const auto& ls : result.description.linksets)
            if (ls.link_predicate == "http://example.org/home_port" && ls.triples > 0) found = true;
        CHECK(found);
    }

    SUBCASE("extended result round-trips through the turtle cache") {
        VoidOptions opts;
        opts.extended = true;
        opts.exact_linksets = true;
        auto first = service.get(ua, opts);
        auto second = service.get(ua, opts);
        CHECK(second.source == VoidSource::Cache);
        CHECK(second.description.linksets.size() == first.description.linksets.size());
    }
}
