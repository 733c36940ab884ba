#include "fedsparql/fed/engine.hpp"

#include "fedsparql/sparql/parser.hpp"
#include "fedsparql/sparql/serializer.hpp"
#include "fedsparql/sparql/transforms.hpp"

#include <algorithm>
#include <future>
#include <mutex>
#include <numeric>
#include <set>

namespace fedsparql::fed {

using rdf::Binding;
using rdf::SolutionSet;
using sparql::Pattern;
using sparql::PatternPtr;
using sparql::Query;

std::string to_string(FedError::Kind k) {
    switch (k) {
    case FedError::Kind::ZeroService: return "zero-service";
    case FedError::Kind::NestedService: return "nested-service";
    case FedError::Kind::UnsupportedPattern: return "unsupported-pattern";
    case FedError::Kind::Execution: return "execution";
    case FedError::Kind::Deadline: return "deadline";
    }
    return "unknown";
}

std::vector<std::string> ExecStats::endpoints_consulted() const {
    std::vector<std::string> out;
    for (const auto& [url, pe] : endpoints)
        if (pe.requests > 0) out.push_back(url);
    return out;
}

nlohmann::json ExecStats::to_json() const {
    nlohmann::json per = nlohmann::json::object();
    for (const auto& [url, pe] : endpoints)
        per[url] = {{"requests", pe.requests},
                    {"rows", pe.rows},
                    {"elapsed_ms", pe.elapsed.count()},
                    {"errors", pe.errors}};
    return nlohmann::json{{"endpoints", per},
                          {"endpoints_consulted", endpoints_consulted()},
                          {"trivial_federation", trivial_federation},
                          {"remote_fetches", remote_fetches},
                          {"total_elapsed_ms", total_elapsed.count()}};
}

// ---------------------------------------------------------------------------
// Decomposition.
// ---------------------------------------------------------------------------

namespace {

struct PatternStats {
    int distinct_vars = 0;
    int constants = 0;
};

void pattern_stats(const Pattern& p, std::set<std::string>& vars, int& constants) {
    if (p.kind == Pattern::Kind::Basic) {
        for (const rdf::TriplePattern& tp : p.bgp.patterns) {
            constants += tp.constant_slots();
            for (const auto* slot : {&tp.subject, &tp.predicate, &tp.object})
                if (rdf::is_var(*slot)) vars.insert(rdf::as_var(*slot).name);
        }
    }
    for (const auto& c : p.children) pattern_stats(*c, vars, constants);
}

PatternStats stats_of(const Pattern& p) {
    std::set<std::string> vars;
    PatternStats out;
    pattern_stats(p, vars, out.constants);
    out.distinct_vars = static_cast<int>(vars.size());
    return out;
}

/// Variables certainly bound by every solution of the pattern (Union keeps
/// only the intersection of its branches; VALUES rows with UNDEF drop out).
void certainly_bound(const Pattern& p, std::set<std::string>& out) {
    switch (p.kind) {
    case Pattern::Kind::Basic:
        for (const rdf::TriplePattern& tp : p.bgp.patterns)
            for (const auto* slot : {&tp.subject, &tp.predicate, &tp.object})
                if (rdf::is_var(*slot)) out.insert(rdf::as_var(*slot).name);
        return;
    case Pattern::Kind::Join:
        for (const auto& c : p.children) certainly_bound(*c, out);
        return;
    case Pattern::Kind::Filter:
    case Pattern::Kind::Service: certainly_bound(*p.child(), out); return;
    case Pattern::Kind::Union: {
        bool first = true;
        std::set<std::string> acc;
        for (const auto& c : p.children) {
            std::set<std::string> branch;
            certainly_bound(*c, branch);
            if (first) {
                acc = std::move(branch);
                first = false;
            } else {
                std::set<std::string> inter;
                std::set_intersection(acc.begin(), acc.end(), branch.begin(), branch.end(),
                                      std::inserter(inter, inter.begin()));
                acc = std::move(inter);
            }
        }
        out.insert(acc.begin(), acc.end());
        return;
    }
    case Pattern::Kind::Values: {
        for (std::size_t i = 0; i < p.values.vars.size(); ++i) {
            bool always = !p.values.rows.empty();
            for (const auto& row : p.values.rows)
                if (i >= row.size() || !row[i]) always = false;
            if (always) out.insert(p.values.vars[i]);
        }
        return;
    }
    case Pattern::Kind::NamedGraph:
        if (p.graph_var) out.insert(*p.graph_var);
        certainly_bound(*p.child(), out);
        return;
    }
}

/// Fetches reachable through joins/filters only; a Union boundary stops the
/// walk because its members do not see every row.
void conjunctive_fetches(const PlanPtr& u, std::vector<const PlanUnit*>& out) {
    switch (u->kind) {
    case PlanUnit::Kind::RemoteFetch: out.push_back(u.get()); return;
    case PlanUnit::Kind::LocalJoin:
        conjunctive_fetches(u->left, out);
        conjunctive_fetches(u->right, out);
        return;
    case PlanUnit::Kind::LocalFilter: conjunctive_fetches(u->child, out); return;
    default: return;
    }
}

std::vector<std::string> plan_vars(const PlanPtr& u) {
    switch (u->kind) {
    case PlanUnit::Kind::RemoteFetch:
        return u->output_vars.empty() ? sparql::pattern_variables(*u->body) : u->output_vars;
    case PlanUnit::Kind::LocalJoin: {
        auto out = plan_vars(u->left);
        for (const std::string& v : plan_vars(u->right))
            if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
        return out;
    }
    case PlanUnit::Kind::LocalUnion: {
        std::vector<std::string> out;
        for (const auto& c : u->children)
            for (const std::string& v : plan_vars(c))
                if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
        return out;
    }
    case PlanUnit::Kind::LocalFilter: return plan_vars(u->child);
    case PlanUnit::Kind::LocalModifiers: return plan_vars(u->child);
    }
    return {};
}

class Decomposer {
  public:
    explicit Decomposer(const Query& q) : query_(q) {
        for (const std::string& v : q.projection) outer_needed_.insert(v);
        if (q.count && q.count->var) outer_needed_.insert(*q.count->var);
        for (const std::string& v : q.group_by) outer_needed_.insert(v);
        if (q.select_star || (q.count && !q.count->var && q.count->distinct))
            for (const std::string& v : sparql::pattern_variables(*q.pattern))
                outer_needed_.insert(v);
    }

    FederatedPlan run() {
        PlanPtr root = build(query_.pattern);
        narrow_projections();
        FederatedPlan plan;
        plan.remote_fetch_count = fetches_.size();
        plan.is_ask = query_.form == Query::Form::Ask;
        if (!plan.is_ask) {
            auto mod = std::make_shared<PlanUnit>();
            mod->kind = PlanUnit::Kind::LocalModifiers;
            mod->child = root;
            mod->modifiers = sparql::modifiers_of(query_);
            mod->visible_vars = sparql::pattern_variables(*query_.pattern);
            root = mod;
        }
        plan.root = root;
        return plan;
    }

  private:
    PlanPtr build(const PatternPtr& p) {
        switch (p->kind) {
        case Pattern::Kind::Service: {
            if (sparql::count_services(*p->child()) > 0)
                throw FedError(FedError::Kind::NestedService,
                               "SERVICE nested inside SERVICE is not supported");
            auto unit = std::make_shared<PlanUnit>();
            unit->kind = PlanUnit::Kind::RemoteFetch;
            unit->endpoint = p->service_endpoint;
            unit->body = p->child();
            unit->silent = p->service_silent;
            fetches_.push_back(unit);
            return unit;
        }
        case Pattern::Kind::Union: {
            auto unit = std::make_shared<PlanUnit>();
            unit->kind = PlanUnit::Kind::LocalUnion;
            for (const auto& c : p->children) unit->children.push_back(build(c));
            return unit;
        }
        case Pattern::Kind::Join: return build_join(p->children);
        case Pattern::Kind::Filter: {
            PlanPtr child = build(p->child());
            std::vector<std::string> fvars;
            sparql::expr_variables(p->filter, fvars);
            // Endpoint-local filter: every join row passes through each
            // conjunctive fetch, so the filter may ride along with a fetch
            // that certainly binds all its variables.
            if (!fvars.empty()) {
                std::vector<const PlanUnit*> fetches;
                conjunctive_fetches(child, fetches);
                for (const PlanUnit* fetch : fetches) {
                    std::set<std::string> bound;
                    certainly_bound(*fetch->body, bound);
                    bool coverable = std::all_of(fvars.begin(), fvars.end(),
                                                 [&](const std::string& v) { return bound.count(v); });
                    if (coverable) {
                        const_cast<PlanUnit*>(fetch)->body =
                            sparql::make_filter(fetch->body, p->filter);
                        return child;
                    }
                }
            }
            auto unit = std::make_shared<PlanUnit>();
            unit->kind = PlanUnit::Kind::LocalFilter;
            unit->child = child;
            unit->filter = p->filter;
            local_filter_vars_.insert(fvars.begin(), fvars.end());
            return unit;
        }
        case Pattern::Kind::Basic:
            if (p->bgp.empty())
                throw FedError(FedError::Kind::ZeroService,
                               "query reached the federation engine with no SERVICE target");
            throw FedError(FedError::Kind::UnsupportedPattern,
                           "triple patterns outside SERVICE cannot be federated; wrap them in "
                           "SERVICE <endpoint> { ... }");
        case Pattern::Kind::Values:
            throw FedError(FedError::Kind::UnsupportedPattern,
                           "top-level VALUES is not supported by the federation engine");
        case Pattern::Kind::NamedGraph:
            throw FedError(FedError::Kind::UnsupportedPattern,
                           "GRAPH patterns are not supported by the federation engine");
        }
        throw FedError(FedError::Kind::UnsupportedPattern, "unhandled pattern kind");
    }

    PlanPtr build_join(const std::vector<PatternPtr>& children) {
        std::vector<PlanPtr> units;
        std::vector<PatternStats> stats;
        units.reserve(children.size());
        for (const auto& c : children) {
            units.push_back(build(c));
            stats.push_back(stats_of(*c));
        }

        // Selectivity order: fewest distinct variables first, then most
        // constants; connectivity with what is already joined wins over both.
        std::vector<std::size_t> order(units.size());
        std::iota(order.begin(), order.end(), 0);
        auto better = [&](std::size_t a, std::size_t b) {
            if (stats[a].distinct_vars != stats[b].distinct_vars)
                return stats[a].distinct_vars < stats[b].distinct_vars;
            if (stats[a].constants != stats[b].constants)
                return stats[a].constants > stats[b].constants;
            return a < b;
        };

        std::vector<bool> used(units.size(), false);
        std::size_t first = *std::min_element(order.begin(), order.end(), better);
        used[first] = true;
        PlanPtr acc = units[first];
        std::set<std::string> bound_vars;
        for (const std::string& v : plan_vars(acc)) bound_vars.insert(v);

        for (std::size_t step = 1; step < units.size(); ++step) {
            std::optional<std::size_t> next;
            for (std::size_t i = 0; i < units.size(); ++i) {
                if (used[i]) continue;
                auto vars = plan_vars(units[i]);
                bool connected = std::any_of(vars.begin(), vars.end(), [&](const std::string& v) {
                    return bound_vars.count(v) > 0;
                });
                if (!connected) continue;
                if (!next || better(i, *next)) next = i;
            }
            if (!next) { // disconnected component: cross product
                for (std::size_t i = 0; i < units.size(); ++i)
                    if (!used[i] && (!next || better(i, *next))) next = i;
            }
            used[*next] = true;
            auto join = std::make_shared<PlanUnit>();
            join->kind = PlanUnit::Kind::LocalJoin;
            join->left = acc;
            join->right = units[*next];
            auto right_vars = plan_vars(units[*next]);
            for (const std::string& v : right_vars)
                if (bound_vars.count(v)) join->shared_vars.push_back(v);
            for (const std::string& v : right_vars) bound_vars.insert(v);
            acc = join;
        }
        return acc;
    }

    void narrow_projections() {
        for (const auto& fetch : fetches_) {
            auto own = sparql::pattern_variables(*fetch->body);
            std::set<std::string> needed = outer_needed_;
            needed.insert(local_filter_vars_.begin(), local_filter_vars_.end());
            for (const auto& other : fetches_) {
                if (other == fetch) continue;
                for (const std::string& v : sparql::pattern_variables(*other->body))
                    needed.insert(v);
            }
            std::vector<std::string> narrowed;
            for (const std::string& v : own)
                if (needed.count(v)) narrowed.push_back(v);
            if (!narrowed.empty() && narrowed.size() < own.size())
                const_cast<PlanUnit*>(fetch.get())->output_vars = narrowed;
        }
    }

    const Query& query_;
    std::set<std::string> outer_needed_;
    std::set<std::string> local_filter_vars_;
    std::vector<PlanPtr> fetches_;
};

} // namespace

FederatedPlan decompose(const Query& q) {
    int n = sparql::count_services(q);
    if (n == 0)
        throw FedError(FedError::Kind::ZeroService,
                       "query names no endpoint; include SERVICE <endpoint> { ... } clauses");
    Decomposer d(q);
    return d.run();
}

// ---------------------------------------------------------------------------
// Execution.
// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

struct ExecCtx {
    net::EndpointClient& client;
    const catalogue::Catalogue* catalogue;
    EngineOptions opts;
    Clock::time_point deadline;

    std::mutex stats_mutex;
    ExecStats stats;

    std::chrono::milliseconds remaining() const {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
        return left;
    }

    void record(const std::string& endpoint, const net::QueryOutcome& out) {
        std::lock_guard lk(stats_mutex);
        auto& pe = stats.endpoints[endpoint];
        pe.requests += 1;
        pe.elapsed += out.elapsed;
        if (out.ok())
            pe.rows += out.solutions ? out.solutions->rows.size() : 0;
        else
            pe.errors += 1;
    }

    bool endpoint_supports_values(const std::string& url) const {
        if (!catalogue) return true; // optimistic; runtime fallback handles refusals
        auto entry = catalogue->find(url);
        if (!entry || !entry->capabilities) return true;
        return entry->capabilities->values;
    }
};

SolutionSet empty_with_vars(std::vector<std::string> vars) {
    SolutionSet s;
    s.variables = std::move(vars);
    return s;
}

std::string fetch_query_text(const PlanUnit& fetch, const PatternPtr& body_override = nullptr) {
    Query sub;
    sub.form = Query::Form::Select;
    if (fetch.output_vars.empty())
        sub.select_star = true;
    else
        sub.projection = fetch.output_vars;
    sub.pattern = body_override ? body_override : fetch.body;
    return sparql::serialize_query(sub);
}

SolutionSet run_fetch(const PlanUnit& fetch, ExecCtx& ctx, const PatternPtr& body_override,
                      bool* feature_refused) {
    auto remaining = ctx.remaining();
    if (remaining.count() <= 0)
        throw FedError(FedError::Kind::Deadline, "overall deadline exceeded");
    net::QueryRequest req;
    req.query = fetch_query_text(fetch, body_override);
    req.timeout = std::min(ctx.opts.per_request_timeout, remaining);
    req.row_cap = ctx.opts.row_cap;

    net::QueryOutcome out = ctx.client.execute(fetch.endpoint, req);
    ctx.record(fetch.endpoint, out);
    if (!out.ok()) {
        if (feature_refused && out.error->kind == net::ErrorKind::FeatureUnsupported) {
            *feature_refused = true;
            return empty_with_vars({});
        }
        if (fetch.silent)
            return empty_with_vars(fetch.output_vars.empty()
                                       ? sparql::pattern_variables(*fetch.body)
                                       : fetch.output_vars);
        throw FedError(FedError::Kind::Execution,
                       "SERVICE <" + fetch.endpoint + "> failed: " + out.error->message,
                       *out.error);
    }
    if (!out.solutions)
        return empty_with_vars({});
    return std::move(*out.solutions);
}

SolutionSet eval_unit(const PlanPtr& u, ExecCtx& ctx);

/// Sends the right side with VALUES-injected bindings in batches. Returns
/// nullopt when the strategy cannot apply (blank nodes, unbound shared vars,
/// endpoint refusing VALUES) so the caller can fall back to a hash join.
std::optional<SolutionSet> bound_fetch(const PlanPtr& right, const SolutionSet& left_rows,
                                       const std::vector<std::string>& shared, ExecCtx& ctx) {
    // Collect the fetches the right side consists of (one, or a union of them).
    std::vector<const PlanUnit*> targets;
    if (right->kind == PlanUnit::Kind::RemoteFetch) {
        targets.push_back(right.get());
    } else if (right->kind == PlanUnit::Kind::LocalUnion) {
        for (const auto& c : right->children) {
            if (c->kind != PlanUnit::Kind::RemoteFetch) return std::nullopt;
            targets.push_back(c.get());
        }
    } else {
        return std::nullopt;
    }
    for (const PlanUnit* t : targets)
        if (!ctx.endpoint_supports_values(t->endpoint)) return std::nullopt;

    // Distinct shared-variable bindings; VALUES cannot carry blank nodes and
    // unbound shared variables would defeat the narrowing.
    std::set<std::string> seen;
    std::vector<std::vector<rdf::Term>> rows;
    for (const Binding& b : left_rows.rows) {
        std::vector<rdf::Term> row;
        std::string key;
        for (const std::string& v : shared) {
            const rdf::Term* t = b.lookup(v);
            if (!t) return std::nullopt;
            if (t->is_blank()) return std::nullopt;
            row.push_back(*t);
            key += t->ntriples();
            key += '\x1f';
        }
        if (seen.insert(key).second) rows.push_back(std::move(row));
    }

    SolutionSet fetched;
    bool first = true;
    for (std::size_t start = 0; start < rows.size(); start += ctx.opts.bound_batch_size) {
        std::size_t end = std::min(rows.size(), start + ctx.opts.bound_batch_size);
        sparql::ValuesBlock vb;
        vb.vars = shared;
        for (std::size_t i = start; i < end; ++i) {
            std::vector<std::optional<rdf::Term>> row;
            for (const rdf::Term& t : rows[i]) row.push_back(t);
            vb.rows.push_back(std::move(row));
        }
        for (const PlanUnit* t : targets) {
            PatternPtr injected = sparql::make_join(
                {sparql::make_values(vb), t->body});
            bool refused = false;
            SolutionSet part = run_fetch(*t, ctx, injected, &refused);
            if (refused) return std::nullopt; // C2: fall back to hash join
            if (first) {
                fetched.variables = part.variables;
                first = false;
            }
            for (const std::string& v : part.variables)
                if (std::find(fetched.variables.begin(), fetched.variables.end(), v) ==
                    fetched.variables.end())
                    fetched.variables.push_back(v);
            for (Binding& b : part.rows) fetched.rows.push_back(std::move(b));
        }
    }
    if (rows.empty()) fetched.variables = plan_vars(right);
    return fetched;
}

SolutionSet eval_unit(const PlanPtr& u, ExecCtx& ctx) {
    switch (u->kind) {
    case PlanUnit::Kind::RemoteFetch: {
        {
            std::lock_guard lk(ctx.stats_mutex);
            ctx.stats.remote_fetches += 1;
        }
        return run_fetch(*u, ctx, nullptr, nullptr);
    }
    case PlanUnit::Kind::LocalJoin: {
        if (ctx.opts.strategy == JoinStrategy::Bound && !u->shared_vars.empty()) {
            SolutionSet left = eval_unit(u->left, ctx);
            auto bound = bound_fetch(u->right, left, u->shared_vars, ctx);
            if (bound) return rdf::join_solutions(left, *bound);
            SolutionSet right = eval_unit(u->right, ctx);
            return rdf::join_solutions(left, right);
        }
        auto right_future =
            std::async(std::launch::async, [&] { return eval_unit(u->right, ctx); });
        SolutionSet left = eval_unit(u->left, ctx);
        SolutionSet right = right_future.get();
        return rdf::join_solutions(left, right);
    }
    case PlanUnit::Kind::LocalUnion: {
        std::vector<std::future<SolutionSet>> futures;
        futures.reserve(u->children.size());
        for (const auto& c : u->children)
            futures.push_back(std::async(std::launch::async, [&, c] { return eval_unit(c, ctx); }));
        SolutionSet out;
        for (auto& f : futures) {
            SolutionSet part = f.get();
            for (const std::string& v : part.variables)
                if (std::find(out.variables.begin(), out.variables.end(), v) == out.variables.end())
                    out.variables.push_back(v);
            for (Binding& b : part.rows) out.rows.push_back(std::move(b));
        }
        return out;
    }
    case PlanUnit::Kind::LocalFilter: {
        SolutionSet in = eval_unit(u->child, ctx);
        SolutionSet out;
        out.variables = in.variables;
        for (Binding& b : in.rows) {
            auto v = sparql::filter_accepts(*u->filter, b);
            if (v && *v) out.rows.push_back(std::move(b));
        }
        return out;
    }
    case PlanUnit::Kind::LocalModifiers: {
        SolutionSet in = eval_unit(u->child, ctx);
        return sparql::apply_modifiers(std::move(in), u->modifiers, u->visible_vars);
    }
    }
    throw FedError(FedError::Kind::UnsupportedPattern, "unhandled plan unit");
}

} // namespace

RunResult FederationEngine::execute_plan(const FederatedPlan& plan, const Query& query,
                                         std::chrono::milliseconds deadline,
                                         const EngineOptions& opts) {
    ExecCtx ctx{client_, catalogue_, opts, Clock::now() + deadline, {}, {}};
    auto started = Clock::now();
    RunResult result;
    try {
        SolutionSet rows = eval_unit(plan.root, ctx);
        if (plan.is_ask)
            result.ask = !rows.rows.empty();
        else
            result.solutions = std::move(rows);
    } catch (FedError& e) {
        ctx.stats.total_elapsed =
            std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);
        e.stats = ctx.stats;
        if (catalogue_) e.stats.trivial_federation = stats_classify_trivial(query);
        throw;
    }
    ctx.stats.total_elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);
    result.stats = ctx.stats;
    if (catalogue_) result.stats.trivial_federation = stats_classify_trivial(query);
    return result;
}

RunResult FederationEngine::run_federated(const Query& query, std::chrono::milliseconds deadline,
                                          const EngineOptions& opts) {
    int services = sparql::count_services(query);
    if (services == 0)
        throw FedError(FedError::Kind::ZeroService,
                       "query names no endpoint; include SERVICE <endpoint> { ... } clauses");

    if (services == 1) {
        // Unwrap and send directly; no federation machinery on this path.
        auto [endpoint, body] = sparql::unwrap_single_service(query);
        net::QueryRequest req;
        req.query = sparql::serialize_query(body);
        req.timeout = std::min(opts.per_request_timeout, deadline);
        req.row_cap = opts.row_cap;
        auto started = Clock::now();
        net::QueryOutcome out = client_.execute(endpoint, req);

        RunResult result;
        auto& pe = result.stats.endpoints[endpoint];
        pe.requests = 1;
        pe.elapsed = out.elapsed;
        result.stats.total_elapsed =
            std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);
        if (!out.ok()) {
            pe.errors = 1;
            FedError err(FedError::Kind::Execution,
                         "endpoint <" + endpoint + "> failed: " + out.error->message, *out.error);
            err.stats = result.stats;
            throw err;
        }
        pe.rows = out.solutions ? out.solutions->rows.size() : 0;
        result.solutions = std::move(out.solutions);
        result.ask = out.ask;
        if (catalogue_) result.stats.trivial_federation = stats_classify_trivial(query);
        return result;
    }

    FederatedPlan plan = decompose(query);
    return execute_plan(plan, query, deadline, opts);
}

RunResult FederationEngine::run_federated(const std::string& query_text,
                                          std::chrono::milliseconds deadline,
                                          const EngineOptions& opts) {
    Query q = sparql::parse_query(query_text);
    return run_federated(q, deadline, opts);
}

bool FederationEngine::stats_classify_trivial(const Query& q) const {
    if (!catalogue_) return false;
    return sparql::is_trivial_federation(*q.pattern, catalogue_->endpoint_urls());
}

} // namespace fedsparql::fed
