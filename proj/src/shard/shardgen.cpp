#include "fedsparql/shard/shardgen.hpp"

#include "fedsparql/catalogue/void_description.hpp"
#include "fedsparql/rdf/turtle.hpp"
#include "fedsparql/rdf/vocab.hpp"
#include "fedsparql/shard/set_cover.hpp"
#include "fedsparql/sparql/parser.hpp"
#include "fedsparql/util/fnv1a.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <sstream>

namespace fedsparql::shard {

using rdf::Graph;
using rdf::Term;
using rdf::Triple;

std::string to_string(ShardingRule::Kind k) {
    switch (k) {
    case ShardingRule::Kind::Vertical: return "vertical";
    case ShardingRule::Kind::Class: return "class";
    case ShardingRule::Kind::Horizontal: return "horizontal";
    }
    return "unknown";
}

std::string ShardingRule::id() const {
    std::string out = to_string(kind) + "(" + a;
    if (!b.empty()) out += "," + b;
    if (kind == Kind::Horizontal) out += ",k=" + std::to_string(shard_count);
    return out + ")";
}

// ---------------------------------------------------------------------------
// Workload analysis.
// ---------------------------------------------------------------------------

namespace {

/// Collects the BGP of a workload query; FILTER wrappers are allowed, any
/// other operator disqualifies the query.
void collect_bgp(const sparql::Pattern& p, rdf::Bgp& out) {
    switch (p.kind) {
    case sparql::Pattern::Kind::Basic:
        for (const rdf::TriplePattern& tp : p.bgp.patterns) out.patterns.push_back(tp);
        return;
    case sparql::Pattern::Kind::Filter: collect_bgp(*p.child(), out); return;
    case sparql::Pattern::Kind::Join:
        for (const auto& c : p.children) collect_bgp(*c, out);
        return;
    default:
        throw std::runtime_error(
            "workload queries must be single BGPs (UNION/SERVICE/VALUES/GRAPH are not allowed)");
    }
}

void domain_range_classes(const Graph& g, const std::string& predicate,
                          std::set<std::string>& out) {
    Term p = Term::iri(predicate);
    for (std::string_view axiom : {vocab::rdfs_domain, vocab::rdfs_range}) {
        g.for_matches(p, Term::iri(std::string(axiom)), std::nullopt, [&](const Triple& t) {
            if (t.object().is_iri()) out.insert(t.object().value());
        });
    }
}

} // namespace

WorkloadQuery analyze_query(const std::string& id, const std::string& question,
                            const std::string& sparql_text, const Graph& data,
                            const Graph& ontology) {
    WorkloadQuery out;
    out.id = id;
    out.question = question;
    out.sparql = sparql_text;

    sparql::Query q = sparql::parse_query(sparql_text);
    collect_bgp(*q.pattern, out.bgp);
    if (out.bgp.empty()) throw std::runtime_error("workload query " + id + " has an empty BGP");

    for (const rdf::TriplePattern& tp : out.bgp.patterns) {
        if (rdf::is_var(tp.subject)) out.subject_vars.insert(rdf::as_var(tp.subject).name);
        if (!rdf::is_var(tp.predicate) && rdf::as_term(tp.predicate).is_iri()) {
            const std::string& p = rdf::as_term(tp.predicate).value();
            out.predicates.insert(p);
            if (p == vocab::rdf_type) {
                if (!rdf::is_var(tp.object) && rdf::as_term(tp.object).is_iri())
                    out.classes.insert(rdf::as_term(tp.object).value());
            } else {
                domain_range_classes(data, p, out.classes);
                domain_range_classes(ontology, p, out.classes);
            }
        }
    }
    return out;
}

std::vector<WorkloadQuery> load_workload(const std::string& jsonl_text, const Graph& data,
                                         const Graph& ontology) {
    std::vector<WorkloadQuery> out;
    std::istringstream in(jsonl_text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        std::string id = j.contains("id") ? (j.at("id").is_string()
                                                 ? j.at("id").get<std::string>()
                                                 : j.at("id").dump())
                                          : ("q" + std::to_string(line_no));
        out.push_back(analyze_query(id, j.value("question", ""), j.at("sparql").get<std::string>(),
                                    data, ontology));
    }
    return out;
}

Applicability applicability(const WorkloadQuery& q) {
    Applicability a;
    a.vertical = q.predicates.size() >= 2;
    a.class_based = q.classes.size() >= 2;
    a.horizontal = !q.subject_vars.empty() && !q.classes.empty();
    return a;
}

// ---------------------------------------------------------------------------
// Materialization.
// ---------------------------------------------------------------------------

namespace {

std::string local_name(const std::string& iri) {
    auto cut = iri.find_last_of("#/");
    std::string local = cut == std::string::npos ? iri : iri.substr(cut + 1);
    std::string clean;
    for (char c : local)
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')
            clean += c;
    if (clean.size() > 24) clean.resize(24);
    return clean.empty() ? "x" : clean;
}

std::string iri_tag(const std::string& iri) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%06llx",
                  static_cast<unsigned long long>(util::fnv1a64(iri) & 0xffffff));
    return local_name(iri) + "-" + buf;
}

std::string subject_hash_key(const Term& s) { return s.value(); }

} // namespace

ShardAssignment::ShardAssignment(const Graph& closed, std::vector<ShardingRule> rules)
    : closed_(&closed) {
    // Precedence: vertical, class, horizontal; selection order within a kind.
    std::stable_sort(rules.begin(), rules.end(), [](const ShardingRule& x, const ShardingRule& y) {
        return static_cast<int>(x.kind) < static_cast<int>(y.kind);
    });
    rules_ = std::move(rules);

    auto add_shard = [&](const std::string& id, const std::string& kind, const std::string& detail) {
        if (shard_index_.count(id)) return;
        shard_index_[id] = shards_.size();
        shards_.push_back(ShardSpec{id, kind, detail, Graph{}});
    };

    for (const ShardingRule& r : rules_) {
        switch (r.kind) {
        case ShardingRule::Kind::Vertical:
            for (const std::string* p : {&r.a, &r.b}) {
                std::string id = "p_" + iri_tag(*p);
                predicate_shard_.emplace(*p, id);
                add_shard(id, "vertical", *p);
            }
            break;
        case ShardingRule::Kind::Class:
            for (const std::string* c : {&r.a, &r.b}) {
                std::string id = "c_" + iri_tag(*c);
                class_shard_.emplace(*c, id);
                add_shard(id, "class", *c);
            }
            break;
        case ShardingRule::Kind::Horizontal: {
            horizontal_.push_back({r.a, r.shard_count});
            for (int i = 0; i < r.shard_count; ++i)
                add_shard("h_" + iri_tag(r.a) + "_" + std::to_string(i), "horizontal",
                          r.a + " #" + std::to_string(i));
            break;
        }
        }
    }
    add_shard("base", "base", "unmatched triples");

    std::set<std::string> warned_subjects;
    std::set<std::string> untyped;
    for (const Triple& t : closed.triples()) {
        std::string id = route(t);
        shards_[shard_index_.at(id)].graph.insert(t);
        if (closed.types_of(t.subject()).empty()) untyped.insert(t.subject().ntriples());
    }
    untyped_subjects_ = untyped.size();

    // Conflicting class memberships get one warning per subject.
    if (!class_shard_.empty()) {
        for (const Triple& t : closed.triples()) {
            std::vector<std::string> matches;
            for (const Term& type : closed.types_of(t.subject()))
                if (type.is_iri() && class_shard_.count(type.value()))
                    matches.push_back(type.value());
            if (matches.size() > 1 && warned_subjects.insert(t.subject().ntriples()).second)
                warnings_.push_back("subject " + t.subject().ntriples() + " is an instance of " +
                                    std::to_string(matches.size()) +
                                    " class-rule classes; routed by the lexicographically "
                                    "smallest class IRI");
        }
    }
}

std::string ShardAssignment::route(const Triple& t) const {
    // Vertical rules claim the triple by predicate.
    if (auto it = predicate_shard_.find(t.predicate().value()); it != predicate_shard_.end())
        return it->second;

    // Class rules claim by the subject's class; multi-class subjects resolve
    // to the lexicographically smallest matching class IRI.
    if (!class_shard_.empty()) {
        std::vector<std::string> matches;
        for (const Term& type : closed_->types_of(t.subject()))
            if (type.is_iri() && class_shard_.count(type.value())) matches.push_back(type.value());
        if (!matches.empty()) {
            std::sort(matches.begin(), matches.end());
            return class_shard_.at(matches.front());
        }
    }

    // Horizontal rules claim by class-conditioned subject hash.
    for (const HorizontalRule& h : horizontal_) {
        if (!closed_->is_instance_of(t.subject(), Term::iri(h.cls))) continue;
        auto idx = util::fnv1a64(subject_hash_key(t.subject())) % static_cast<std::uint64_t>(h.k);
        return "h_" + iri_tag(h.cls) + "_" + std::to_string(idx);
    }
    return "base";
}

const ShardSpec* ShardAssignment::find(const std::string& shard_id) const {
    auto it = shard_index_.find(shard_id);
    return it == shard_index_.end() ? nullptr : &shards_[it->second];
}

std::vector<std::string> ShardAssignment::shard_ids_of(const ShardingRule& rule) const {
    std::vector<std::string> out;
    switch (rule.kind) {
    case ShardingRule::Kind::Vertical:
        out.push_back("p_" + iri_tag(rule.a));
        out.push_back("p_" + iri_tag(rule.b));
        break;
    case ShardingRule::Kind::Class:
        out.push_back("c_" + iri_tag(rule.a));
        out.push_back("c_" + iri_tag(rule.b));
        break;
    case ShardingRule::Kind::Horizontal:
        for (int i = 0; i < rule.shard_count; ++i)
            out.push_back("h_" + iri_tag(rule.a) + "_" + std::to_string(i));
        break;
    }
    return out;
}

ShardAssignment materialize_shards(const Graph& closed, std::vector<ShardingRule> rules) {
    return ShardAssignment(closed, std::move(rules));
}

// ---------------------------------------------------------------------------
// Coverage and fan-out.
// ---------------------------------------------------------------------------

bool query_federated(const WorkloadQuery& q, const std::vector<const Graph*>& shard_graphs,
                     const Graph& closed) {
    // Pattern-level fan-out: shards returning anything for any pattern.
    std::set<std::size_t> touched;
    for (const rdf::TriplePattern& tp : q.bgp.patterns) {
        rdf::Bgp single;
        single.patterns.push_back(tp);
        for (std::size_t i = 0; i < shard_graphs.size(); ++i)
            if (!rdf::eval_bgp(*shard_graphs[i], single).rows.empty()) touched.insert(i);
    }
    if (touched.size() < 2) return false;

    rdf::SolutionSet full = rdf::eval_bgp(closed, q.bgp);
    if (full.rows.empty()) return true; // nothing to reproduce; >= 2 shards must be consulted

    auto full_keys = rdf::row_key_set(full);
    for (const Graph* shard : shard_graphs) {
        rdf::SolutionSet local = rdf::eval_bgp(*shard, q.bgp);
        if (rdf::row_key_set(local) == full_keys) return false; // one shard answers it all
    }
    return true;
}

FanoutReport compute_fanout(const WorkloadQuery& q, const ShardAssignment& assignment,
                            const Graph& closed) {
    FanoutReport report;
    std::set<std::string> matched;
    for (const rdf::TriplePattern& tp : q.bgp.patterns) {
        rdf::Bgp single;
        single.patterns.push_back(tp);
        for (const ShardSpec& s : assignment.shards())
            if (!rdf::eval_bgp(s.graph, single).rows.empty()) matched.insert(s.id);
    }
    report.fanout = matched.size();
    report.matched_shards.assign(matched.begin(), matched.end());

    // Realized fan-out: shards holding at least one triple used by the result.
    rdf::SolutionSet full = rdf::eval_bgp(closed, q.bgp);
    std::set<std::string> contributing;
    for (const rdf::Binding& mu : full.rows) {
        for (const rdf::TriplePattern& tp : q.bgp.patterns) {
            auto ground = [&](const rdf::TermOrVar& tv) -> Term {
                if (!rdf::is_var(tv)) return rdf::as_term(tv);
                return *mu.lookup(rdf::as_var(tv).name);
            };
            contributing.insert(
                assignment.route(Triple(ground(tp.subject), ground(tp.predicate), ground(tp.object))));
        }
    }
    report.realized = contributing.size();
    return report;
}

// ---------------------------------------------------------------------------
// Candidates and selection.
// ---------------------------------------------------------------------------

namespace {

bool rule_less(const ShardingRule& x, const ShardingRule& y) {
    if (x.kind != y.kind) return static_cast<int>(x.kind) < static_cast<int>(y.kind);
    if (x.a != y.a) return x.a < y.a;
    if (x.b != y.b) return x.b < y.b;
    return x.shard_count < y.shard_count;
}

bool covers_query(const ShardingRule& rule, const WorkloadQuery& q, const Graph& closed) {
    ShardAssignment lone(closed, {rule});
    std::vector<const Graph*> graphs;
    for (const ShardSpec& s : lone.shards()) graphs.push_back(&s.graph);
    return query_federated(q, graphs, closed);
}

} // namespace

std::vector<ShardingRule> generate_candidates(const std::vector<WorkloadQuery>& workload,
                                              const Graph& closed, const ShardgenConfig& cfg) {
    std::vector<ShardingRule> candidates;
    auto upsert = [&](ShardingRule r, std::size_t query_idx) {
        for (ShardingRule& existing : candidates)
            if (existing == r) {
                if (std::find(existing.covered.begin(), existing.covered.end(), query_idx) ==
                    existing.covered.end())
                    existing.covered.push_back(query_idx);
                return;
            }
        r.covered = {query_idx};
        candidates.push_back(std::move(r));
    };

    for (std::size_t qi = 0; qi < workload.size(); ++qi) {
        const WorkloadQuery& q = workload[qi];
        Applicability a = applicability(q);

        if (a.vertical) {
            std::vector<std::string> preds(q.predicates.begin(), q.predicates.end());
            for (std::size_t i = 0; i < preds.size(); ++i)
                for (std::size_t j = i + 1; j < preds.size(); ++j) {
                    ShardingRule r;
                    r.kind = ShardingRule::Kind::Vertical;
                    r.a = std::min(preds[i], preds[j]);
                    r.b = std::max(preds[i], preds[j]);
                    if (covers_query(r, q, closed)) upsert(std::move(r), qi);
                }
        }
        if (a.class_based) {
            std::vector<std::string> classes(q.classes.begin(), q.classes.end());
            for (std::size_t i = 0; i < classes.size(); ++i)
                for (std::size_t j = i + 1; j < classes.size(); ++j) {
                    ShardingRule r;
                    r.kind = ShardingRule::Kind::Class;
                    r.a = std::min(classes[i], classes[j]);
                    r.b = std::max(classes[i], classes[j]);
                    if (covers_query(r, q, closed)) upsert(std::move(r), qi);
                }
        }
        // Class sharding naturally dominates horizontal; offer horizontal
        // candidates only where class sharding is not applicable.
        if (a.horizontal && !a.class_based) {
            for (const std::string& c : q.classes) {
                ShardingRule r;
                r.kind = ShardingRule::Kind::Horizontal;
                r.a = c;
                r.shard_count = cfg.horizontal_k;
                if (covers_query(r, q, closed)) upsert(std::move(r), qi);
            }
        }
    }

    std::sort(candidates.begin(), candidates.end(), rule_less);
    return candidates;
}

RuleSelection select_rules(const std::vector<ShardingRule>& candidates,
                           const std::vector<WorkloadQuery>& workload, const ShardgenConfig& cfg) {
    std::vector<std::vector<std::size_t>> covers;
    covers.reserve(candidates.size());
    for (const ShardingRule& r : candidates) covers.push_back(r.covered);

    RuleSelection out;
    out.exact = candidates.size() <= cfg.exact_threshold;
    SetCoverResult res = solve_set_cover(covers, workload.size(), cfg.exact_threshold);
    out.covers_all = res.covers_all;
    for (std::size_t e : res.uncovered) out.uncovered_query_ids.push_back(workload[e].id);
    for (std::size_t i : res.selected) out.rules.push_back(candidates[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Pipeline and manifest.
// ---------------------------------------------------------------------------

namespace {

double shard_size_cv(const std::vector<ShardSpec>& shards) {
    std::vector<double> sizes;
    for (const ShardSpec& s : shards) sizes.push_back(static_cast<double>(s.graph.size()));
    if (sizes.empty()) return 0.0;
    double mean = std::accumulate(sizes.begin(), sizes.end(), 0.0) / sizes.size();
    if (mean == 0.0) return 0.0;
    double var = 0.0;
    for (double s : sizes) var += (s - mean) * (s - mean);
    var /= sizes.size();
    return std::sqrt(var) / mean;
}

} // namespace

namespace {

std::vector<const Graph*> graphs_of(const ShardAssignment& a) {
    std::vector<const Graph*> out;
    for (const ShardSpec& s : a.shards()) out.push_back(&s.graph);
    return out;
}

} // namespace

PipelineResult run_pipeline(const Graph& data, const Graph& ontology,
                            const std::string& workload_jsonl, const ShardgenConfig& cfg) {
    PipelineResult result;
    result.closed = rdf::infer_type_closure(data, ontology);
    result.workload = load_workload(workload_jsonl, data, ontology);
    if (result.workload.empty()) throw std::runtime_error("workload contains no queries");

    result.candidates = generate_candidates(result.workload, result.closed, cfg);

    // Rule coverage is verified per rule in isolation, but selected rules
    // interact under the routing precedence (a vertical rule on rdf:type takes
    // every type triple, collapsing queries that relied on a subject-based
    // split). Verify the final materialization and, when a query lost its
    // federation, ban the blocking rule and re-solve the cover.
    std::vector<ShardingRule> pool = result.candidates;
    std::vector<std::string> banned_rules;
    result.selection = select_rules(pool, result.workload, cfg);
    for (int attempt = 0; attempt <= static_cast<int>(result.candidates.size()); ++attempt) {
        if (!result.selection.covers_all) break;
        result.assignment.emplace(result.closed, result.selection.rules);
        auto graphs = graphs_of(*result.assignment);
        std::vector<std::size_t> broken;
        for (std::size_t qi = 0; qi < result.workload.size(); ++qi)
            if (!query_federated(result.workload[qi], graphs, result.closed)) broken.push_back(qi);
        if (broken.empty()) break;

        // The shard that answers a broken query completely identifies the
        // co-locating rules: ban every selected rule that owns it.
        std::set<std::string> offending_shards;
        for (std::size_t qi : broken) {
            rdf::SolutionSet full = rdf::eval_bgp(result.closed, result.workload[qi].bgp);
            auto full_keys = rdf::row_key_set(full);
            for (const ShardSpec& s : result.assignment->shards()) {
                if (full.rows.empty()) continue;
                if (rdf::row_key_set(rdf::eval_bgp(s.graph, result.workload[qi].bgp)) == full_keys)
                    offending_shards.insert(s.id);
            }
        }
        std::vector<ShardingRule> blockers;
        for (const ShardingRule& r : result.selection.rules)
            for (const std::string& sid : result.assignment->shard_ids_of(r))
                if (offending_shards.count(sid)) {
                    blockers.push_back(r);
                    break;
                }
        if (blockers.empty()) {
            result.selection.covers_all = false;
            for (std::size_t qi : broken)
                result.selection.uncovered_query_ids.push_back(result.workload[qi].id);
            break;
        }
        for (const ShardingRule& b : blockers) {
            banned_rules.push_back(b.id());
            pool.erase(std::remove(pool.begin(), pool.end(), b), pool.end());
        }
        result.selection = select_rules(pool, result.workload, cfg);
    }
    if (!result.assignment) result.assignment.emplace(result.closed, result.selection.rules);
    result.all_covered = result.selection.covers_all;

    const ShardAssignment& assignment = *result.assignment;

    nlohmann::ordered_json manifest;
    manifest["format"] = "fedsparql-shard-manifest/1";
    manifest["generator"] = {
        {"hash_spec",
         {{"algorithm", "fnv1a-64"},
          {"offset_basis", "14695981039346656037"},
          {"prime", "1099511628211"},
          {"input", "UTF-8 bytes of the subject IRI text or blank-node label"},
          {"shard_index", "hash mod k"}}},
        {"routing_precedence", {"vertical", "class", "horizontal", "base"}},
        {"horizontal_k", cfg.horizontal_k},
        {"exact_threshold", cfg.exact_threshold},
        {"solver", result.selection.exact ? "exact" : "greedy"},
        {"banned_rules", banned_rules},
    };
    manifest["dataset"] = {{"triples", result.closed.size()},
                           {"untyped_subjects", assignment.untyped_subjects()}};

    manifest["rules"] = nlohmann::ordered_json::array();
    for (const ShardingRule& r : result.selection.rules) {
        nlohmann::ordered_json jr;
        jr["kind"] = to_string(r.kind);
        if (r.kind == ShardingRule::Kind::Horizontal) {
            jr["class"] = r.a;
            jr["k"] = r.shard_count;
        } else if (r.kind == ShardingRule::Kind::Class) {
            jr["classes"] = {r.a, r.b};
        } else {
            jr["predicates"] = {r.a, r.b};
        }
        nlohmann::ordered_json covers = nlohmann::ordered_json::array();
        for (std::size_t qi : r.covered) covers.push_back(result.workload[qi].id);
        jr["covers"] = covers;
        jr["shards"] = assignment.shard_ids_of(r);
        manifest["rules"].push_back(std::move(jr));
    }

    manifest["shards"] = nlohmann::ordered_json::array();
    for (const ShardSpec& s : assignment.shards()) {
        manifest["shards"].push_back({{"id", s.id},
                                      {"kind", s.kind},
                                      {"detail", s.detail},
                                      {"file", s.id + ".nt"},
                                      {"void_file", "void/" + s.id + ".ttl"},
                                      {"triples", s.graph.size()}});
    }

    // Per-query metrics.
    std::vector<const Graph*> shard_graphs;
    for (const ShardSpec& s : assignment.shards()) shard_graphs.push_back(&s.graph);
    manifest["queries"] = nlohmann::ordered_json::array();
    std::vector<std::size_t> fanouts;
    std::size_t covered_count = 0;
    std::size_t realized_le_fanout = 0;
    for (const WorkloadQuery& q : result.workload) {
        Applicability a = applicability(q);
        FanoutReport fr = compute_fanout(q, assignment, result.closed);
        bool covered = query_federated(q, shard_graphs, result.closed);
        if (covered) ++covered_count;
        if (fr.realized <= fr.fanout) ++realized_le_fanout;
        fanouts.push_back(fr.fanout);
        manifest["queries"].push_back({{"id", q.id},
                                       {"applicability",
                                        {{"vertical", a.vertical},
                                         {"class", a.class_based},
                                         {"horizontal", a.horizontal}}},
                                       {"fanout", fr.fanout},
                                       {"realized_fanout", fr.realized},
                                       {"covered", covered},
                                       {"matched_shards", fr.matched_shards}});
    }

    // Composition percentages by rule-kind shard count (base excluded).
    std::set<std::string> v_shards, c_shards, h_shards;
    for (const ShardingRule& r : result.selection.rules)
        for (const std::string& id : assignment.shard_ids_of(r)) {
            if (r.kind == ShardingRule::Kind::Vertical) v_shards.insert(id);
            if (r.kind == ShardingRule::Kind::Class) c_shards.insert(id);
            if (r.kind == ShardingRule::Kind::Horizontal) h_shards.insert(id);
        }
    double rule_shards =
        static_cast<double>(v_shards.size() + c_shards.size() + h_shards.size());
    auto pct = [&](std::size_t n) {
        return rule_shards == 0 ? 0.0 : 100.0 * static_cast<double>(n) / rule_shards;
    };

    std::size_t applicable_v = 0, applicable_c = 0, applicable_h = 0;
    for (const WorkloadQuery& q : result.workload) {
        Applicability a = applicability(q);
        applicable_v += a.vertical;
        applicable_c += a.class_based;
        applicable_h += a.horizontal;
    }
    auto rate = [&](std::size_t n) {
        return 100.0 * static_cast<double>(n) / static_cast<double>(result.workload.size());
    };

    std::vector<std::size_t> sorted_fanouts = fanouts;
    std::sort(sorted_fanouts.begin(), sorted_fanouts.end());
    double fan_avg = fanouts.empty()
                         ? 0.0
                         : std::accumulate(fanouts.begin(), fanouts.end(), 0.0) / fanouts.size();
    double fan_median =
        sorted_fanouts.empty()
            ? 0.0
            : (sorted_fanouts.size() % 2 == 1
                   ? static_cast<double>(sorted_fanouts[sorted_fanouts.size() / 2])
                   : (static_cast<double>(sorted_fanouts[sorted_fanouts.size() / 2 - 1]) +
                      static_cast<double>(sorted_fanouts[sorted_fanouts.size() / 2])) /
                         2.0);

    manifest["metrics"] = {
        {"rule_count", result.selection.rules.size()},
        {"shard_count", assignment.shards().size()},
        {"composition_percent",
         {{"vertical", pct(v_shards.size())},
          {"class", pct(c_shards.size())},
          {"horizontal", pct(h_shards.size())}}},
        {"shard_size_cv", shard_size_cv(assignment.shards())},
        {"fanout",
         {{"avg", fan_avg},
          {"median", fan_median},
          {"min", sorted_fanouts.empty() ? 0 : sorted_fanouts.front()},
          {"max", sorted_fanouts.empty() ? 0 : sorted_fanouts.back()}}},
        {"coverage",
         {{"covered_queries", covered_count},
          {"total_queries", result.workload.size()},
          {"realized_le_fanout", realized_le_fanout}}},
        {"applicability_rates_percent",
         {{"vertical", rate(applicable_v)},
          {"class", rate(applicable_c)},
          {"horizontal", rate(applicable_h)}}},
    };
    manifest["covers_all"] = result.selection.covers_all;
    manifest["uncovered_queries"] = result.selection.uncovered_query_ids;
    manifest["warnings"] = assignment.warnings();

    result.manifest = std::move(manifest);
    return result;
}

void write_artifacts(PipelineResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    fs::create_directories(out_dir + "/void");
    const ShardAssignment& assignment = *result.assignment;
    for (const ShardSpec& s : assignment.shards()) {
        rdf::write_file(out_dir + "/" + s.id + ".nt", rdf::serialize_ntriples(s.graph));
        catalogue::VoidDescription vd =
            catalogue::describe_graph(s.graph, "urn:shard:" + s.id + "#dataset");
        rdf::write_file(out_dir + "/void/" + s.id + ".ttl", vd.to_turtle());
    }
    rdf::write_file(out_dir + "/manifest.json", result.manifest.dump(2) + "\n");
}

} // namespace fedsparql::shard
