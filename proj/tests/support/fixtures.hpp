#pragma once

// Deterministic (dataset, workload) fixture generator used by the acceptance
// suite: a small maritime schema with four classes, per-class literal
// predicates and cross-class links, plus BGP workloads whose parameters are
// drawn from the generated data so every query has a non-empty answer.

#include "fedsparql/rdf/graph.hpp"
#include "fedsparql/rdf/vocab.hpp"
#include "fedsparql/util/fnv1a.hpp"

#include <json.hpp>

#include <random>
#include <set>
#include <string>
#include <vector>

namespace fixtures {

using fedsparql::rdf::Graph;
using fedsparql::rdf::Term;
using fedsparql::rdf::Triple;

inline Term ex(const std::string& local) { return Term::iri("http://example.org/" + local); }
inline Term rdf_type() { return Term::iri(std::string(fedsparql::vocab::rdf_type)); }

struct Fixture {
    Graph data;
    Graph ontology;
    std::string workload_jsonl;
    int n_queries = 0;
};

// Classes: ship(0) -> port(1) -> country(2); ship -> operator(3).
inline const char* kClassNames[4] = {"ship", "port", "country", "operator"};

inline Fixture make_fixture(unsigned seed, std::size_t approx_triples, int n_queries) {
    std::mt19937 rng(seed);
    Fixture fx;

    // Ontology: domains for every predicate, ranges for the links.
    auto domain = [&](const std::string& p, const std::string& c) {
        fx.ontology.insert(Triple(ex(p), Term::iri(std::string(fedsparql::vocab::rdfs_domain)),
                                  ex(c)));
    };
    auto range = [&](const std::string& p, const std::string& c) {
        fx.ontology.insert(Triple(ex(p), Term::iri(std::string(fedsparql::vocab::rdfs_range)),
                                  ex(c)));
    };
    for (int c = 0; c < 4; ++c) {
        domain("code_" + std::to_string(c), kClassNames[c]);
        domain("name_" + std::to_string(c), kClassNames[c]);
    }
    domain("home_port", "ship");
    range("home_port", "port");
    domain("located_in", "port");
    range("located_in", "country");
    domain("operated_by", "ship");
    range("operated_by", "operator");

    // Entity counts: ships 45%, ports 25%, countries 10%, operators 20%,
    // at least 12 each. Ships carry 5 triples, ports 4, the rest 3.
    std::size_t budget = std::max<std::size_t>(approx_triples, 100);
    std::size_t entities = budget * 10 / 43;
    std::size_t counts[4] = {std::max<std::size_t>(12, entities * 45 / 100),
                             std::max<std::size_t>(12, entities * 25 / 100),
                             std::max<std::size_t>(12, entities * 10 / 100),
                             std::max<std::size_t>(12, entities * 20 / 100)};

    auto entity = [&](int cls, std::size_t i) {
        return ex(std::string(kClassNames[cls]) + "/" + std::to_string(i));
    };
    auto code_groups = [&](int cls) {
        return std::max<std::size_t>(3, counts[cls] / 4);
    };

    for (int cls = 0; cls < 4; ++cls) {
        std::string cs = std::to_string(cls);
        for (std::size_t i = 0; i < counts[cls]; ++i) {
            Term s = entity(cls, i);
            fx.data.insert(Triple(s, rdf_type(), ex(kClassNames[cls])));
            fx.data.insert(Triple(s, ex("code_" + cs),
                                  Term::literal(std::to_string(i % code_groups(cls)),
                                                std::string(fedsparql::vocab::xsd_integer))));
            fx.data.insert(
                Triple(s, ex("name_" + cs),
                       Term::literal("n" + cs + "_" + std::to_string(i % code_groups(cls)))));
        }
    }
    for (std::size_t i = 0; i < counts[0]; ++i) {
        fx.data.insert(Triple(entity(0, i), ex("home_port"), entity(1, rng() % counts[1])));
        fx.data.insert(Triple(entity(0, i), ex("operated_by"), entity(3, rng() % counts[3])));
    }
    for (std::size_t i = 0; i < counts[1]; ++i)
        fx.data.insert(Triple(entity(1, i), ex("located_in"), entity(2, rng() % counts[2])));

    // Workload: parameters drawn from the data above.
    const std::string prefix = "PREFIX ex: <http://example.org/> ";
    nlohmann::json lines = nlohmann::json::array();
    fx.n_queries = n_queries;
    for (int qi = 0; qi < n_queries; ++qi) {
        std::string sparql, question;
        switch (qi % 6) {
        case 0: {
            int cls = static_cast<int>(rng() % 4);
            std::string v = std::to_string(rng() % code_groups(cls));
            sparql = prefix + "SELECT ?s WHERE { ?s a ex:" + kClassNames[cls] + " . ?s ex:code_" +
                     std::to_string(cls) + " " + v + " }";
            question = "Which " + std::string(kClassNames[cls]) + "s carry code " + v + "?";
            break;
        }
        case 1:
            sparql = prefix +
                     "SELECT ?s ?p WHERE { ?s a ex:ship . ?s ex:home_port ?p . ?p a ex:port }";
            question = "Which ships call which ports home?";
            break;
        case 2:
            sparql = prefix + "SELECT ?s ?c WHERE { ?s ex:home_port ?p . ?p ex:located_in ?c }";
            question = "In which countries are the ships' home ports?";
            break;
        case 3: {
            int cls = static_cast<int>(rng() % 2) + 1; // port or country
            sparql = prefix + "SELECT ?s WHERE { ?s a ex:" + kClassNames[cls] + " }";
            question = std::string("List every ") + kClassNames[cls] + ".";
            break;
        }
        case 4: {
            std::string v = "n3_" + std::to_string(rng() % code_groups(3));
            sparql = prefix + "SELECT ?s WHERE { ?s a ex:operator . ?s ex:name_3 \"" + v + "\" }";
            question = "Which operators are named " + v + "?";
            break;
        }
        default:
            sparql = prefix +
                     "SELECT ?s ?n WHERE { ?s a ex:ship . ?s ex:operated_by ?o . ?o ex:name_3 ?n }";
            question = "Who operates the ships?";
            break;
        }
        lines.push_back({{"id", "q" + std::to_string(qi)},
                         {"question", question},
                         {"sparql", sparql}});
    }
    std::string jsonl;
    for (const auto& l : lines) jsonl += l.dump() + "\n";
    fx.workload_jsonl = jsonl;
    return fx;
}

} // namespace fixtures
