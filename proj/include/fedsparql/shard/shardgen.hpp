#pragma once

#include "fedsparql/rdf/closure.hpp"
#include "fedsparql/rdf/eval.hpp"
#include "fedsparql/rdf/graph.hpp"
#include "fedsparql/rdf/pattern.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fedsparql::shard {

// ---------------------------------------------------------------------------
// Workload analysis.
// ---------------------------------------------------------------------------

struct WorkloadQuery {
    std::string id;
    std::string question; // natural-language text, treated as opaque
    std::string sparql;
    rdf::Bgp bgp;
    std::set<std::string> predicates;   // IRI predicates in the BGP
    std::set<std::string> classes;      // explicit rdf:type objects + domain/range inference
    std::set<std::string> subject_vars; // variables in subject position
};

/// Parses and analyzes one workload query. The query must be a single BGP
/// (FILTER wrappers allowed); classes are inferred from explicit rdf:type
/// patterns plus rdfs:domain/rdfs:range axioms found in data or ontology.
WorkloadQuery analyze_query(const std::string& id, const std::string& question,
                            const std::string& sparql_text, const rdf::Graph& data,
                            const rdf::Graph& ontology);

/// Workload file: one JSON object per line with keys id, question, sparql.
std::vector<WorkloadQuery> load_workload(const std::string& jsonl_text, const rdf::Graph& data,
                                         const rdf::Graph& ontology);

struct Applicability {
    bool vertical = false;
    bool class_based = false;
    bool horizontal = false;
};

/// Vertical iff |P(q)| >= 2; class iff |C(q)| >= 2; horizontal iff
/// |S(q)| >= 1 and |C(q)| >= 1.
Applicability applicability(const WorkloadQuery& q);

// ---------------------------------------------------------------------------
// Sharding rules.
// ---------------------------------------------------------------------------

struct ShardingRule {
    enum class Kind { Vertical, Class, Horizontal };
    Kind kind = Kind::Vertical;
    std::string a; // first predicate/class; Horizontal: the class
    std::string b; // second predicate/class; empty for Horizontal
    int shard_count = 2; // Horizontal k

    std::vector<std::size_t> covered; // workload indices this rule federates

    std::string id() const;
    friend bool operator==(const ShardingRule& x, const ShardingRule& y) {
        return x.kind == y.kind && x.a == y.a && x.b == y.b && x.shard_count == y.shard_count;
    }
};

std::string to_string(ShardingRule::Kind k);

struct ShardgenConfig {
    int horizontal_k = 2;
    std::size_t exact_threshold = 20;
};

// ---------------------------------------------------------------------------
// Materialization.
// ---------------------------------------------------------------------------

struct ShardSpec {
    std::string id;
    std::string kind;   // vertical | class | horizontal | base
    std::string detail; // predicate/class IRI (+ index for horizontal)
    rdf::Graph graph;
};

/// Routing function plus the materialized shards. Shards are keyed by
/// predicate (vertical), class (class-based) and (class, hash index)
/// (horizontal); the base shard receives everything unmatched. Precedence:
/// vertical rules, then class, then horizontal, in selection order.
class ShardAssignment {
  public:
    ShardAssignment(const rdf::Graph& closed, std::vector<ShardingRule> rules);

    const std::vector<ShardSpec>& shards() const { return shards_; }
    const ShardSpec* find(const std::string& shard_id) const;
    const std::vector<ShardingRule>& rules() const { return rules_; }

    /// Shard id the triple routes to under the fixed precedence.
    std::string route(const rdf::Triple& t) const;

    /// Shard ids created by one rule.
    std::vector<std::string> shard_ids_of(const ShardingRule& rule) const;

    std::size_t untyped_subjects() const { return untyped_subjects_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

  private:
    const rdf::Graph* closed_;
    std::vector<ShardingRule> rules_;
    std::map<std::string, std::string> predicate_shard_;
    std::map<std::string, std::string> class_shard_; // class-rule classes only
    struct HorizontalRule {
        std::string cls;
        int k;
    };
    std::vector<HorizontalRule> horizontal_;
    std::map<std::string, std::size_t> shard_index_; // id -> position in shards_
    std::vector<ShardSpec> shards_;
    std::size_t untyped_subjects_ = 0;
    std::vector<std::string> warnings_;
};

/// Applies the routing function to every triple of the closed graph.
/// The shards plus base always partition the input exactly.
ShardAssignment materialize_shards(const rdf::Graph& closed, std::vector<ShardingRule> rules);

// ---------------------------------------------------------------------------
// Candidate generation and rule selection.
// ---------------------------------------------------------------------------

/// Candidate rules with semantically verified covered sets: a rule covers a
/// query iff materializing that rule alone forces the query to consult >= 2
/// shards (pattern-level fan-out >= 2), and, when the query has answers, no
/// single shard reproduces the full answer. Horizontal candidates are omitted
/// for queries where class sharding applies (dominance).
std::vector<ShardingRule> generate_candidates(const std::vector<WorkloadQuery>& workload,
                                              const rdf::Graph& closed,
                                              const ShardgenConfig& cfg = {});

struct RuleSelection {
    std::vector<ShardingRule> rules;
    bool covers_all = false;
    std::vector<std::string> uncovered_query_ids;
    bool exact = false; // exact solver used (vs greedy)
};

RuleSelection select_rules(const std::vector<ShardingRule>& candidates,
                           const std::vector<WorkloadQuery>& workload,
                           const ShardgenConfig& cfg = {});

// ---------------------------------------------------------------------------
// Metrics.
// ---------------------------------------------------------------------------

struct FanoutReport {
    std::size_t fanout = 0;   // f(Q): distinct shards any pattern matches
    std::size_t realized = 0; // shards actually contributing to the join result
    std::vector<std::string> matched_shards;
};

FanoutReport compute_fanout(const WorkloadQuery& q, const ShardAssignment& assignment,
                            const rdf::Graph& closed);

/// True when the query cannot be answered from any single shard: pattern-level
/// fan-out >= 2 and (for non-empty answers) every single-shard evaluation is a
/// strict subset of the full answer.
bool query_federated(const WorkloadQuery& q, const std::vector<const rdf::Graph*>& shard_graphs,
                     const rdf::Graph& closed);

// ---------------------------------------------------------------------------
// Pipeline.
// ---------------------------------------------------------------------------

struct PipelineResult {
    rdf::Graph closed;
    std::vector<WorkloadQuery> workload;
    std::vector<ShardingRule> candidates;
    RuleSelection selection;
    std::optional<ShardAssignment> assignment;
    nlohmann::ordered_json manifest;
    bool all_covered = false;
};

/// shard pipeline: closure -> analysis -> candidates -> set cover ->
/// materialization -> metrics/manifest. Does not touch the filesystem.
PipelineResult run_pipeline(const rdf::Graph& data, const rdf::Graph& ontology,
                            const std::string& workload_jsonl, const ShardgenConfig& cfg = {});

/// Writes shard .nt files, per-shard VoID Turtle and manifest.json to out_dir.
void write_artifacts(PipelineResult& result, const std::string& out_dir);

} // namespace fedsparql::shard
