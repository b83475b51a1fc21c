#pragma once

#include <map>
#include <string>
#include <vector>

#include "awareplan/domain_model.hpp"

namespace awareplan {

// Formal planning specifications in the STRIPS + typing +
// negative-preconditions subset, plus their canonical PDDL text form.

struct DomainSpec {
  std::string name;
  ObjectTypeHierarchy types;
  std::vector<PredicateSignature> predicates;
  std::vector<ActionSchema> actions;

  bool operator==(const DomainSpec&) const = default;
  DomainElements elements() const { return {types, predicates, actions}; }
};

enum class PartitionKind { robot, human };

// One agent's share of the joint goal conjunction.
struct GoalPartition {
  std::string agent_id;
  PartitionKind kind = PartitionKind::human;
  std::vector<GroundLiteral> literals;

  bool operator==(const GoalPartition&) const = default;
};

struct ProblemSpec {
  std::string name;
  std::string domain_name;
  std::map<std::string, std::string> objects;  // object id -> type
  std::vector<GroundLiteral> init;
  std::vector<GoalPartition> goals;  // exactly one robot partition

  bool operator==(const ProblemSpec&) const = default;

  GoalPartition* find_goal(const std::string& agent_id);
  const GoalPartition* find_goal(const std::string& agent_id) const;
  std::vector<GroundLiteral> goal_literals() const;
};

// Internal-consistency checks. validate_problem additionally type-checks
// objects, init and goal literals against the domain.
std::vector<std::string> validate_domain(const DomainSpec& domain);
std::vector<std::string> validate_problem(const DomainSpec& domain, const ProblemSpec& problem);

// Sorted canonical form: predicates/actions by name, schema literal sets
// sorted, init sorted and deduplicated, goal partitions robot-first then by
// agent id. Emission always canonicalizes; equality compares canonical forms.
DomainSpec canonicalized(DomainSpec domain);
ProblemSpec canonicalized(ProblemSpec problem);
bool structurally_equal(const DomainSpec& a, const DomainSpec& b);
bool structurally_equal(const ProblemSpec& a, const ProblemSpec& b);

// Canonical PDDL text: deterministic byte output for structurally equal
// specs; emit(parse(emit(x))) == emit(x).
std::string emit_domain(const DomainSpec& domain);
std::string emit_problem(const ProblemSpec& problem);

// Parser for the supported subset. Throws LexError, ParseError (with
// location) or UnsupportedFeature (named feature outside the subset).
DomainSpec parse_domain(const std::string& text);
ProblemSpec parse_problem(const std::string& text);

}  // namespace awareplan
