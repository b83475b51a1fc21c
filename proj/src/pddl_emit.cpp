#include <algorithm>
#include <set>

#include "awareplan/errors.hpp"
#include "awareplan/pddl.hpp"

namespace awareplan {

GoalPartition* ProblemSpec::find_goal(const std::string& agent_id) {
  for (auto& g : goals) {
    if (g.agent_id == agent_id) return &g;
  }
  return nullptr;
}

const GoalPartition* ProblemSpec::find_goal(const std::string& agent_id) const {
  for (const auto& g : goals) {
    if (g.agent_id == agent_id) return &g;
  }
  return nullptr;
}

std::vector<GroundLiteral> ProblemSpec::goal_literals() const {
  std::vector<GroundLiteral> out;
  for (const auto& g : goals) out.insert(out.end(), g.literals.begin(), g.literals.end());
  return out;
}

// ---------------------------------------------------------------------------
// Validation

std::vector<std::string> validate_domain(const DomainSpec& domain) {
  std::vector<std::string> out = validate_domain_elements(domain.elements());
  if (!valid_identifier(domain.name)) out.push_back("invalid domain name '" + domain.name + "'");
  return out;
}

std::vector<std::string> validate_problem(const DomainSpec& domain, const ProblemSpec& problem) {
  std::vector<std::string> out;
  if (!valid_identifier(problem.name)) out.push_back("invalid problem name '" + problem.name + "'");
  if (problem.domain_name != domain.name) {
    out.push_back("problem is for domain '" + problem.domain_name + "', got '" + domain.name + "'");
  }

  for (const auto& [id, type] : problem.objects) {
    if (!valid_identifier(id)) out.push_back("invalid object id '" + id + "'");
    if (!domain.types.contains(type)) {
      out.push_back("object '" + id + "' has unknown type '" + type + "'");
    }
  }

  const DomainElements elements = domain.elements();
  auto check_literal = [&](const GroundLiteral& lit, const std::string& where) {
    const PredicateSignature* sig = elements.find_predicate(lit.predicate);
    if (sig == nullptr) {
      out.push_back(where + " literal '" + lit.text() + "' uses undeclared predicate '" +
                    lit.predicate + "'");
      return;
    }
    if (sig->params.size() != lit.args.size()) {
      out.push_back(where + " literal '" + lit.text() + "' has arity " +
                    std::to_string(lit.args.size()) + ", predicate expects " +
                    std::to_string(sig->params.size()));
      return;
    }
    for (size_t i = 0; i < lit.args.size(); ++i) {
      auto obj = problem.objects.find(lit.args[i]);
      if (obj == problem.objects.end()) {
        out.push_back(where + " literal '" + lit.text() + "' references unknown object '" +
                      lit.args[i] + "'");
      } else if (!domain.types.is_subtype(obj->second, sig->params[i].type)) {
        out.push_back(where + " literal '" + lit.text() + "' arg '" + lit.args[i] + "' of type '" +
                      obj->second + "' does not match '" + sig->params[i].type + "'");
      }
    }
  };

  for (const auto& lit : problem.init) check_literal(lit, "init");
  size_t robot_partitions = 0;
  std::set<std::string> partition_agents;
  for (const auto& g : problem.goals) {
    if (g.kind == PartitionKind::robot) ++robot_partitions;
    if (!g.agent_id.empty() && !partition_agents.insert(g.agent_id).second) {
      out.push_back("duplicate goal partition for agent '" + g.agent_id + "'");
    }
    for (const auto& lit : g.literals) check_literal(lit, "goal");
  }
  if (robot_partitions != 1) {
    out.push_back("expected exactly one robot goal partition, found " +
                  std::to_string(robot_partitions));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Canonicalization

namespace {

void sort_literals(std::vector<Literal>& lits) {
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
}

void sort_ground(std::vector<GroundLiteral>& lits) {
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
}

}  // namespace

DomainSpec canonicalized(DomainSpec domain) {
  std::sort(domain.predicates.begin(), domain.predicates.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });
  std::sort(domain.actions.begin(), domain.actions.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });
  for (auto& action : domain.actions) {
    sort_literals(action.preconditions);
    sort_literals(action.add_effects);
    sort_literals(action.del_effects);
  }
  return domain;
}

ProblemSpec canonicalized(ProblemSpec problem) {
  sort_ground(problem.init);
  for (auto& g : problem.goals) sort_ground(g.literals);
  std::stable_sort(problem.goals.begin(), problem.goals.end(), [](const auto& a, const auto& b) {
    if (a.kind != b.kind) return a.kind == PartitionKind::robot;
    return a.agent_id < b.agent_id;
  });
  return problem;
}

bool structurally_equal(const DomainSpec& a, const DomainSpec& b) {
  return canonicalized(a) == canonicalized(b);
}

bool structurally_equal(const ProblemSpec& a, const ProblemSpec& b) {
  return canonicalized(a) == canonicalized(b);
}

// ---------------------------------------------------------------------------
// Emission

namespace {

// "  name1 name2 - type" lines for a set of (name, type) pairs, grouped by
// type, groups and names sorted.
void emit_typed_names(std::string& out, const std::map<std::string, std::string>& name_to_type,
                      const std::string& indent) {
  std::map<std::string, std::vector<std::string>> by_type;
  for (const auto& [name, type] : name_to_type) by_type[type].push_back(name);
  for (auto& [type, names] : by_type) {
    std::sort(names.begin(), names.end());
    out += indent;
    for (const auto& n : names) {
      out += n;
      out += ' ';
    }
    out += "- " + type + "\n";
  }
}

void emit_params(std::string& out, const std::vector<Param>& params) {
  out += '(';
  for (size_t i = 0; i < params.size(); ++i) {
    if (i > 0) out += ' ';
    out += "?" + params[i].name + " - " + params[i].type;
  }
  out += ')';
}

void emit_literal_block(std::string& out, const std::vector<Literal>& lits,
                        const std::string& indent) {
  for (const auto& lit : lits) {
    out += indent + lit.text() + "\n";
  }
}

}  // namespace

std::string emit_domain(const DomainSpec& input) {
  const DomainSpec domain = canonicalized(input);
  std::string out;
  out += "(define (domain " + domain.name + ")\n";
  out += "  (:requirements :strips :typing :negative-preconditions)\n";

  if (!domain.types.parent.empty()) {
    out += "  (:types\n";
    emit_typed_names(out, domain.types.parent, "    ");
    out += "  )\n";
  }

  if (!domain.predicates.empty()) {
    out += "  (:predicates\n";
    for (const auto& p : domain.predicates) {
      out += "    (" + p.name;
      for (const auto& param : p.params) out += " ?" + param.name + " - " + param.type;
      out += ")\n";
    }
    out += "  )\n";
  }

  for (const auto& a : domain.actions) {
    out += "  (:action " + a.name + "\n";
    out += "    :parameters ";
    emit_params(out, a.params);
    out += "\n";
    out += "    :precondition (and\n";
    emit_literal_block(out, a.preconditions, "      ");
    out += "    )\n";
    out += "    :effect (and\n";
    emit_literal_block(out, a.add_effects, "      ");
    std::vector<Literal> dels = a.del_effects;
    for (auto& d : dels) d.negated = true;
    emit_literal_block(out, dels, "      ");
    out += "    )\n";
    out += "  )\n";
  }

  out += ")\n";
  return out;
}

std::string emit_problem(const ProblemSpec& input) {
  const ProblemSpec problem = canonicalized(input);
  std::string out;
  out += "(define (problem " + problem.name + ")\n";
  out += "  (:domain " + problem.domain_name + ")\n";

  if (!problem.objects.empty()) {
    out += "  (:objects\n";
    emit_typed_names(out, problem.objects, "    ");
    out += "  )\n";
  }

  out += "  (:init\n";
  for (const auto& lit : problem.init) out += "    " + lit.text() + "\n";
  out += "  )\n";

  out += "  (:goal (and\n";
  const bool lone_anonymous_robot = problem.goals.size() == 1 &&
                                    problem.goals.front().kind == PartitionKind::robot &&
                                    problem.goals.front().agent_id.empty();
  for (const auto& g : problem.goals) {
    if (!lone_anonymous_robot) {
      out += "    ;; partition " + g.agent_id + " " +
             (g.kind == PartitionKind::robot ? "robot" : "human") + "\n";
    }
    for (const auto& lit : g.literals) out += "    " + lit.text() + "\n";
  }
  out += "  ))\n";
  out += ")\n";
  return out;
}

}  // namespace awareplan
