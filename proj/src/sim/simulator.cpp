#include "fedsparql/sim/simulator.hpp"

#include "fedsparql/catalogue/void_description.hpp"
#include "fedsparql/net/results_json.hpp"
#include "fedsparql/rdf/turtle.hpp"
#include "fedsparql/sparql/eval.hpp"
#include "fedsparql/sparql/parser.hpp"
#include "fedsparql/sparql/serializer.hpp"

#include <httplib.h>

#include <deque>
#include <mutex>
#include <random>
#include <thread>

namespace fedsparql::sim {

namespace {

constexpr const char* kVoidGraphName = "urn:endpoint:void";

bool same_endpoint(const std::string& a, const std::string& b) {
    auto trim = [](const std::string& s) {
        return !s.empty() && s.back() == '/' ? s.substr(0, s.size() - 1) : s;
    };
    return trim(a) == trim(b);
}

struct FeatureScan {
    bool has_values = false;
    bool has_service = false;
};

void scan_features(const sparql::Pattern& p, FeatureScan& out) {
    if (p.kind == sparql::Pattern::Kind::Values) out.has_values = true;
    if (p.kind == sparql::Pattern::Kind::Service) out.has_service = true;
    for (const auto& c : p.children) scan_features(*c, out);
}

} // namespace

struct Simulator::Impl {
    rdf::Graph data;
    SimConfig cfg;
    std::string endpoint_url;

    rdf::Graph serving;    // data, plus VoID triples in DefaultGraph mode
    rdf::Graph void_graph; // VoID description of `data`

    httplib::Server server;
    std::thread server_thread;
    bool running = false;

    mutable std::mutex state_mutex; // availability, latency, rng
    Availability availability = Availability::Up;
    double flaky_probability = 0.0;
    std::chrono::milliseconds latency{0};
    std::mt19937 rng;

    mutable std::mutex log_mutex;
    std::deque<LogEntry> log;

    explicit Impl(rdf::Graph g, SimConfig c) : data(std::move(g)), cfg(std::move(c)), rng(cfg.rng_seed) {
        availability = cfg.availability;
        flaky_probability = cfg.flaky_probability;
        latency = cfg.latency;
    }

    void append_log(const std::string& query, int status) {
        std::lock_guard lk(log_mutex);
        log.push_back({std::chrono::system_clock::now(), query, status});
        while (log.size() > cfg.log_capacity) log.pop_front();
    }

    /// Returns true when this request should be dropped on the floor.
    bool drop_request() {
        std::lock_guard lk(state_mutex);
        if (availability == Availability::Down) return true;
        if (availability == Availability::Flaky) {
            std::uniform_real_distribution<double> d(0.0, 1.0);
            return d(rng) < flaky_probability;
        }
        return false;
    }

    void inject_latency() {
        std::chrono::milliseconds pause{0};
        {
            std::lock_guard lk(state_mutex);
            pause = latency;
        }
        if (pause.count() > 0) std::this_thread::sleep_for(pause);
    }

    static void abort_connection(httplib::Response& res) {
        // Advertise a body, then refuse to produce it; the peer sees the
        // connection die, which is what an unavailable endpoint looks like.
        res.set_content_provider(
            1, "application/octet-stream",
            [](size_t, size_t, httplib::DataSink&) { return false; });
    }

    std::string service_description() const {
        rdf::Graph g;
        rdf::Term svc = rdf::Term::iri(endpoint_url);
        g.insert(rdf::Triple(svc, rdf::Term::iri(std::string(vocab::rdf_type)),
                             rdf::Term::iri(std::string(vocab::sd_Service))));
        g.insert(rdf::Triple(svc, rdf::Term::iri(std::string(vocab::sd_endpoint)), svc));
        return rdf::serialize_turtle(g);
    }

    void handle_query(const std::string& query_text, httplib::Response& res) {
        sparql::Query query;
        try {
            query = sparql::parse_query(query_text);
        } catch (const sparql::QueryParseError& e) {
            res.status = 400;
            res.set_content(e.what(), "text/plain");
            return;
        }

        FeatureScan scan;
        scan_features(*query.pattern, scan);
        if (scan.has_values && !cfg.features.values) {
            res.status = 400;
            res.set_content("VALUES is not supported by this endpoint", "text/plain");
            return;
        }
        if (scan.has_service && !cfg.features.service) {
            res.status = 400;
            res.set_content("SERVICE is not supported by this endpoint", "text/plain");
            return;
        }
        if ((query.count || !query.group_by.empty()) && !cfg.features.aggregates) {
            res.status = 400;
            res.set_content("aggregates (COUNT, GROUP BY) are not supported by this endpoint",
                            "text/plain");
            return;
        }

        sparql::Dataset ds;
        ds.default_graph = cfg.publish_void == VoidPublish::DefaultGraph ? &serving : &data;
        if (cfg.publish_void == VoidPublish::NamedGraph) ds.named[kVoidGraphName] = &void_graph;

        sparql::EvalOptions opts;
        opts.service_resolver = [this, &ds, &opts](const std::string& endpoint,
                                                   const sparql::Pattern& body)
            -> std::optional<rdf::SolutionSet> {
            if (!same_endpoint(endpoint, endpoint_url)) return std::nullopt;
            return sparql::eval_pattern(ds, *ds.default_graph, body, opts);
        };

        try {
            sparql::QueryResult result = sparql::eval_query(ds, query, opts);
            if (result.is_ask) {
                res.status = 200;
                res.set_content(net::ask_to_json(result.ask).dump(), "application/sparql-results+json");
                return;
            }
            bool truncated = false;
            if (cfg.result_limit && result.solutions.rows.size() > *cfg.result_limit) {
                result.solutions.rows.resize(*cfg.result_limit);
                truncated = true;
            }
            if (truncated) res.set_header("X-Truncated", "true");
            res.status = 200;
            res.set_content(net::solutions_to_json(result.solutions).dump(),
                            "application/sparql-results+json");
        } catch (const sparql::EvalError& e) {
            res.status = 400;
            res.set_content(e.what(), "text/plain");
        }
    }

    void setup_routes() {
        auto sparql_handler = [this](const httplib::Request& req, httplib::Response& res) {
            if (drop_request()) {
                abort_connection(res);
                return;
            }
            inject_latency();
            std::string query_text;
            if (req.has_param("query")) {
                query_text = req.get_param_value("query");
            } else if (req.method == "POST") {
                auto it = req.headers.find("Content-Type");
                if (it != req.headers.end() &&
                    it->second.rfind("application/sparql-query", 0) == 0)
                    query_text = req.body;
            }
            if (query_text.empty()) {
                if (req.method == "GET") {
                    // SPARQL protocol: a bare GET yields the service description.
                    res.status = 200;
                    res.set_content(service_description(), "text/turtle");
                    append_log("GET " + req.path, res.status);
                    return;
                }
                res.status = 400;
                res.set_content("missing 'query' parameter", "text/plain");
                append_log("", res.status);
                return;
            }
            handle_query(query_text, res);
            append_log(query_text, res.status);
        };
        server.Get("/sparql", sparql_handler);
        server.Post("/sparql", sparql_handler);

        server.Get("/.well-known/void", [this](const httplib::Request& req, httplib::Response& res) {
            if (drop_request()) {
                abort_connection(res);
                return;
            }
            inject_latency();
            if (cfg.publish_void == VoidPublish::WellKnown) {
                res.status = 200;
                res.set_content(rdf::serialize_turtle(void_graph), "text/turtle");
            } else {
                res.status = 404;
                res.set_content("no VoID description published here", "text/plain");
            }
            append_log("GET " + req.path, res.status);
        });
    }
};

Simulator::Simulator(rdf::Graph graph, SimConfig config)
    : impl_(std::make_unique<Impl>(std::move(graph), std::move(config))) {}

Simulator::~Simulator() { stop(); }

std::string Simulator::start() {
    Impl& im = *impl_;
    im.setup_routes();
    int port = im.cfg.port;
    if (port == 0) {
        port = im.server.bind_to_any_port("127.0.0.1");
        if (port <= 0) throw std::runtime_error("simulator: failed to bind a port");
    } else {
        if (!im.server.bind_to_port("127.0.0.1", port))
            throw std::runtime_error("simulator: failed to bind port " + std::to_string(port));
    }
    im.cfg.port = port;
    im.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/sparql";

    catalogue::VoidDescription vd =
        catalogue::describe_graph(im.data, im.endpoint_url + "#dataset");
    im.void_graph = vd.to_graph();
    if (im.cfg.publish_void == VoidPublish::DefaultGraph) {
        im.serving = im.data;
        im.serving.merge(im.void_graph);
    }

    im.server_thread = std::thread([&im] { im.server.listen_after_bind(); });
    im.server.wait_until_ready();
    im.running = true;
    return im.endpoint_url;
}

void Simulator::stop() {
    if (impl_ && impl_->running) {
        impl_->server.stop();
        if (impl_->server_thread.joinable()) impl_->server_thread.join();
        impl_->running = false;
    }
}

const std::string& Simulator::url() const { return impl_->endpoint_url; }
int Simulator::port() const { return impl_->cfg.port; }

std::vector<LogEntry> Simulator::request_log() const {
    std::lock_guard lk(impl_->log_mutex);
    return {impl_->log.begin(), impl_->log.end()};
}

void Simulator::clear_log() {
    std::lock_guard lk(impl_->log_mutex);
    impl_->log.clear();
}

void Simulator::set_availability(Availability a, double flaky_probability) {
    std::lock_guard lk(impl_->state_mutex);
    impl_->availability = a;
    impl_->flaky_probability = flaky_probability;
}

void Simulator::set_latency(std::chrono::milliseconds latency) {
    std::lock_guard lk(impl_->state_mutex);
    impl_->latency = latency;
}

const rdf::Graph& Simulator::graph() const { return impl_->data; }
const SimConfig& Simulator::config() const { return impl_->cfg; }

} // namespace fedsparql::sim
