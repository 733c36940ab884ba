#include "fedsparql/net/endpoint_client.hpp"

#include "fedsparql/net/results_json.hpp"
#include "fedsparql/net/url.hpp"

#include <httplib.h>

#include <algorithm>
#include <condition_variable>
#include <map>
#include <mutex>
#include <thread>

namespace fedsparql::net {

std::string to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::Timeout: return "timeout";
    case ErrorKind::Unavailable: return "unavailable";
    case ErrorKind::HttpStatus: return "http-status";
    case ErrorKind::MalformedResults: return "malformed-results";
    case ErrorKind::FeatureUnsupported: return "feature-unsupported";
    }
    return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

std::chrono::milliseconds since(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
}

bool mentions_unsupported_keyword(const std::string& body) {
    static const char* keywords[] = {"VALUES",   "SERVICE", "COUNT",       "GROUP BY",
                                     "aggregate", "OPTIONAL", "property path", "unsupported",
                                     "not supported"};
    for (const char* kw : keywords)
        if (body.find(kw) != std::string::npos) return true;
    return false;
}

// Caps in-flight requests per endpoint origin.
class Gate {
  public:
    explicit Gate(int limit) : limit_(limit) {}
    void acquire() {
        std::unique_lock lk(m_);
        cv_.wait(lk, [&] { return active_ < limit_; });
        ++active_;
    }
    void release() {
        std::lock_guard lk(m_);
        --active_;
        cv_.notify_one();
    }

  private:
    std::mutex m_;
    std::condition_variable cv_;
    int active_ = 0;
    int limit_;
};

struct GateLease {
    Gate& gate;
    explicit GateLease(Gate& g) : gate(g) { gate.acquire(); }
    ~GateLease() { gate.release(); }
};

} // namespace

struct EndpointClient::Impl {
    ClientOptions opts;
    std::mutex gates_mutex;
    std::map<std::string, std::unique_ptr<Gate>> gates;

    Gate& gate_for(const std::string& origin) {
        std::lock_guard lk(gates_mutex);
        auto& slot = gates[origin];
        if (!slot) slot = std::make_unique<Gate>(opts.per_endpoint_concurrency);
        return *slot;
    }
};

EndpointClient::EndpointClient(ClientOptions opts) : impl_(std::make_unique<Impl>()) {
    impl_->opts = opts;
}

EndpointClient::~EndpointClient() = default;

namespace {

struct RawResponse {
    int status = 0;
    std::string body;
    bool connection_failed = false;
    httplib::Error error = httplib::Error::Success;
};

RawResponse send_once(const ParsedUrl& url, const std::string& query,
                      std::chrono::milliseconds budget) {
    httplib::Client cli(url.host, url.port);
    long long total_ms = std::max<long long>(1, budget.count());
    time_t secs = static_cast<time_t>(total_ms / 1000);
    long usec = static_cast<long>((total_ms % 1000) * 1000);
    cli.set_connection_timeout(secs, usec);
    cli.set_read_timeout(secs, usec);
    cli.set_write_timeout(secs, usec);
    cli.set_keep_alive(false);

    httplib::Headers headers{{"Accept", "application/sparql-results+json"}};

    std::string encoded = "query=" + url_encode(query);
    httplib::Result result = encoded.size() <= EndpointClient::kGetThresholdBytes
                                 ? cli.Get(url.path + "?" + encoded, headers)
                                 : cli.Post(url.path, headers, encoded,
                                            "application/x-www-form-urlencoded");
    RawResponse out;
    if (!result) {
        out.connection_failed = true;
        out.error = result.error();
        return out;
    }
    out.status = result->status;
    out.body = result->body;
    return out;
}

} // namespace

QueryOutcome EndpointClient::execute(const std::string& endpoint_url, const QueryRequest& req) {
    QueryOutcome out;
    auto fail = [&](ErrorKind kind, std::string message, std::chrono::milliseconds elapsed,
                    int status = 0) {
        out.error = EndpointError{kind, status, std::move(message), elapsed};
        out.elapsed = elapsed;
        return out;
    };

    auto url = parse_url(endpoint_url);
    if (!url)
        return fail(ErrorKind::Unavailable, "invalid endpoint URL: " + endpoint_url,
                    std::chrono::milliseconds{0});

    GateLease lease(impl_->gate_for(url->origin()));

    const auto start = Clock::now();
    int attempts_left = std::max(0, req.max_retries) + 1;
    RawResponse resp;
    while (true) {
        auto remaining = req.timeout - since(start);
        if (remaining.count() <= 0)
            return fail(ErrorKind::Timeout, "deadline exhausted before request completed",
                        since(start));
        resp = send_once(*url, req.query, remaining);
        --attempts_left;
        if (!resp.connection_failed) break;

        auto elapsed = since(start);
        bool timed_out = elapsed + std::chrono::milliseconds(50) >= req.timeout;
        if (timed_out)
            return fail(ErrorKind::Timeout,
                        "request exceeded the " + std::to_string(req.timeout.count()) +
                            " ms deadline",
                        elapsed);
        // Connection-level failure: retry with backoff, never on timeouts.
        if (attempts_left <= 0)
            return fail(ErrorKind::Unavailable,
                        "endpoint unreachable (" + httplib::to_string(resp.error) + ")", elapsed);
        std::this_thread::sleep_for(impl_->opts.retry_backoff);
    }

    auto elapsed = since(start);
    out.elapsed = elapsed;

    if (resp.status == 200) {
        try {
            auto doc = nlohmann::json::parse(resp.body);
            DecodedResults decoded = decode_results_json(doc);
            if (decoded.ask) {
                out.ask = decoded.ask;
                return out;
            }
            out.solutions = std::move(decoded.solutions);
            if (out.solutions->rows.size() > req.row_cap) {
                out.solutions->rows.resize(req.row_cap);
                out.truncated = true;
            }
            return out;
        } catch (const std::exception& e) {
            return fail(ErrorKind::MalformedResults, e.what(), elapsed);
        }
    }
    if (resp.status >= 400 && resp.status < 500 && mentions_unsupported_keyword(resp.body))
        return fail(ErrorKind::FeatureUnsupported, resp.body, elapsed, resp.status);
    return fail(ErrorKind::HttpStatus, "HTTP " + std::to_string(resp.status) + ": " + resp.body,
                elapsed, resp.status);
}

std::variant<Capabilities, EndpointError> EndpointClient::probe_capabilities(
    const std::string& endpoint_url) {
    Capabilities caps;
    QueryRequest probe;
    probe.timeout = std::chrono::milliseconds(10000);

    probe.query = "SELECT ?s WHERE { VALUES ?s { <urn:probe:values> } }";
    QueryOutcome values = execute(endpoint_url, probe);
    if (values.error && (values.error->kind == ErrorKind::Unavailable ||
                         values.error->kind == ErrorKind::Timeout))
        return *values.error;
    caps.values = values.ok();

    probe.query = "ASK { SERVICE SILENT <" + endpoint_url + "> { } }";
    QueryOutcome service = execute(endpoint_url, probe);
    caps.service = service.ok();

    probe.query = "SELECT (COUNT(*) AS ?n) WHERE { ?s ?p ?o }";
    QueryOutcome count = execute(endpoint_url, probe);
    caps.aggregates = count.ok() && count.solutions && count.solutions->size() == 1;

    probe.query = "SELECT ?s ?p ?o WHERE { ?s ?p ?o } LIMIT 100000";
    QueryOutcome scan = execute(endpoint_url, probe);
    if (scan.ok() && scan.solutions && caps.aggregates) {
        const rdf::Term* n = count.solutions->rows[0].lookup("n");
        if (n) {
            auto total = std::strtoull(n->value().c_str(), nullptr, 10);
            if (total > scan.solutions->rows.size())
                caps.result_limit = scan.solutions->rows.size();
        }
    }
    return caps;
}

std::optional<std::string> http_get_text(const std::string& url, std::chrono::milliseconds timeout,
                                         const std::string& accept) {
    auto parsed = parse_url(url);
    if (!parsed) return std::nullopt;
    httplib::Client cli(parsed->host, parsed->port);
    cli.set_connection_timeout(static_cast<time_t>(timeout.count() / 1000), static_cast<long>((timeout.count() % 1000) * 1000));
    cli.set_read_timeout(static_cast<time_t>(timeout.count() / 1000), static_cast<long>((timeout.count() % 1000) * 1000));
    httplib::Result result = cli.Get(parsed->path, httplib::Headers{{"Accept", accept}});
    if (!result || result->status != 200) return std::nullopt;
    return result->body;
}

} // namespace fedsparql::net
