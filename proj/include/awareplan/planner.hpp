#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "awareplan/json_util.hpp"
#include "awareplan/pddl.hpp"

namespace awareplan {

// Propositional planning task instantiated from (DomainSpec, ProblemSpec),
// pruned by delete-relaxation reachability. Immutable after grounding;
// concurrent plan() calls on one task are safe.

struct GroundAction {
  std::string agent;        // the schema's agent-typed argument
  std::string schema_name;
  std::vector<std::string> args;       // full argument list, schema order
  std::vector<uint32_t> pre;           // positive preconditions, sorted
  std::vector<uint32_t> neg_pre;       // negative preconditions, sorted
  std::vector<uint32_t> add;           // sorted; disjoint from del
  std::vector<uint32_t> del;           // sorted
  int cost = 1;

  std::string name() const;  // "(schema arg1 arg2)"
};

struct GroundedTask {
  std::vector<std::string> atoms;  // canonical literal text, sorted; index = atom id
  std::map<std::string, uint32_t> atom_index;
  std::vector<uint32_t> init;  // sorted
  std::vector<uint32_t> goal;  // sorted
  std::vector<GroundAction> actions;
  std::map<std::string, uint32_t> action_index;  // name() -> index

  size_t num_atoms() const { return atoms.size(); }
};

struct GroundConfig {
  size_t max_ground_actions = 1000000;
};

GroundedTask ground_task(const DomainSpec& domain, const ProblemSpec& problem,
                         const GroundConfig& config = {});

enum class SearchStrategy { uniform_cost, astar_goalcount, gbfs_hadd };

SearchStrategy parse_strategy(const std::string& text);  // ucs | astar | gbfs
std::string to_string(SearchStrategy strategy);

struct SearchConfig {
  SearchStrategy strategy = SearchStrategy::uniform_cost;
  long max_expansions = 5000000;
  uint64_t seed = 0;  // reserved for fixture generation; search is deterministic
};

struct PlanStep {
  size_t index = 0;
  std::string agent;
  std::string schema_name;
  std::vector<std::string> args;

  std::string name() const;

  bool operator==(const PlanStep&) const = default;
};

struct Plan {
  std::vector<PlanStep> steps;
  long expansions = 0;
  long generated = 0;

  size_t length() const { return steps.size(); }
};

// Forward state-space search. uniform_cost returns a minimum-length plan;
// the heuristic strategies return some valid plan. Deterministic: ties break
// by (f-value, insertion order). Throws Unsolvable or ResourceLimit.
Plan plan(const GroundedTask& task, const SearchConfig& config = {});

// Independent plan checker; simulates effects step by step with no shared
// code with the search. Also exposes the visited state trajectory so
// callers can assert properties over intermediate states.
struct Verdict {
  enum class Kind { valid, invalid, goal_unmet };
  Kind kind = Kind::valid;
  size_t failed_step = 0;          // for invalid
  std::string missing;             // first missing precondition text
  std::vector<std::string> unmet;  // unmet goal atom texts
  std::vector<std::set<uint32_t>> trajectory;  // trajectory[0] = init

  bool valid() const { return kind == Kind::valid; }
  std::string describe() const;
};

Verdict validate_plan(const GroundedTask& task, const Plan& plan);

// Breadth-first minimum-length plan; test oracle, independent of plan().
// Throws OracleCapExceeded when more than state_cap states are reached.
Plan optimal_plan_bfs(const GroundedTask& task, size_t state_cap = 100000);

// Plan file formats: JSON steps plus deterministic metadata, and classical
// one-action-per-line text. The text form carries no agent column, so
// reading it back resolves each line against the task's ground actions.
std::string plan_to_json(const Plan& plan);
Plan plan_from_json(const std::string& json_text);
std::string plan_to_text(const Plan& plan);
Plan plan_from_text(const std::string& text, const GroundedTask& task);

}  // namespace awareplan
