#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace awareplan {

// Shared planning-domain vocabulary: type hierarchy, predicate signatures,
// action schemas, and the literal forms used by problems, goals and plans.

struct Param {
  std::string name;  // bare name, no '?' prefix
  std::string type;

  auto operator<=>(const Param&) const = default;
};

// Literal over schema parameters; args reference parameter names.
struct Literal {
  std::string predicate;
  std::vector<std::string> args;
  bool negated = false;

  auto operator<=>(const Literal&) const = default;
  std::string text() const;  // "(pred ?a ?b)" or "(not (pred ?a ?b))"
};

// Literal over concrete objects. Init and goal literals are always positive.
struct GroundLiteral {
  std::string predicate;
  std::vector<std::string> args;

  auto operator<=>(const GroundLiteral&) const = default;
  std::string text() const;  // "(pred a b)"
};

struct PredicateSignature {
  std::string name;
  std::vector<Param> params;

  auto operator<=>(const PredicateSignature&) const = default;
};

struct ActionSchema {
  std::string name;
  std::vector<Param> params;  // exactly one param has type "agent"
  std::vector<Literal> preconditions;
  std::vector<Literal> add_effects;
  std::vector<Literal> del_effects;

  auto operator<=>(const ActionSchema&) const = default;
  const Param& agent_param() const;
};

// Type names with their supertypes; roots map to the built-in "object".
struct ObjectTypeHierarchy {
  std::map<std::string, std::string> parent;

  bool contains(const std::string& type) const;
  // True when `type` equals `ancestor` or derives from it. "object" is the
  // implicit root every type derives from.
  bool is_subtype(const std::string& type, const std::string& ancestor) const;

  auto operator<=>(const ObjectTypeHierarchy&) const = default;
};

struct DomainElements {
  ObjectTypeHierarchy types;
  std::vector<PredicateSignature> predicates;
  std::vector<ActionSchema> actions;

  const PredicateSignature* find_predicate(const std::string& name) const;
  const ActionSchema* find_action(const std::string& name) const;
};

// Structural validation shared by the knowledge loader, the LLM extraction
// and synthesis paths, and the grounding-side domain check. Empty result
// means the elements are internally consistent.
std::vector<std::string> validate_domain_elements(const DomainElements& elements);

// Identifier rule for everything that can end up in canonical PDDL text.
bool valid_identifier(const std::string& id);

// Parses "(pred a b)" / "(not (pred a b))" into a Literal; '?'-prefixed args
// are stripped to bare parameter names. Throws ParseError on malformed text.
Literal parse_literal_text(const std::string& text);
GroundLiteral parse_ground_literal_text(const std::string& text);

std::string canonical_goal_text(const std::vector<GroundLiteral>& goal);

}  // namespace awareplan
