#include "awareplan/domain_model.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "awareplan/errors.hpp"

namespace awareplan {

namespace {

std::string literal_body(const std::string& predicate, const std::vector<std::string>& args,
                         const char* arg_prefix) {
  std::string out = "(" + predicate;
  for (const auto& a : args) {
    out += ' ';
    out += arg_prefix;
    out += a;
  }
  out += ')';
  return out;
}

}  // namespace

std::string Literal::text() const {
  std::string body = literal_body(predicate, args, "?");
  return negated ? "(not " + body + ")" : body;
}

std::string GroundLiteral::text() const { return literal_body(predicate, args, ""); }

const Param& ActionSchema::agent_param() const {
  for (const auto& p : params) {
    if (p.type == "agent") return p;
  }
  throw Error("action '" + name + "' has no agent-typed parameter");
}

bool ObjectTypeHierarchy::contains(const std::string& type) const {
  return type == "object" || parent.count(type) > 0;
}

bool ObjectTypeHierarchy::is_subtype(const std::string& type, const std::string& ancestor) const {
  if (ancestor == "object") return contains(type);
  std::string cur = type;
  size_t hops = 0;
  while (cur != "object") {
    if (cur == ancestor) return true;
    auto it = parent.find(cur);
    if (it == parent.end()) return false;
    cur = it->second;
    if (++hops > parent.size() + 1) return false;  // cycle guard; validated elsewhere
  }
  return false;
}

const PredicateSignature* DomainElements::find_predicate(const std::string& name) const {
  for (const auto& p : predicates) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const ActionSchema* DomainElements::find_action(const std::string& name) const {
  for (const auto& a : actions) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

namespace {

void validate_schema_literals(const DomainElements& e, const ActionSchema& a,
                              const std::vector<Literal>& lits, const char* where,
                              std::vector<std::string>& out) {
  std::set<std::string> bound;
  for (const auto& p : a.params) bound.insert(p.name);
  for (const auto& lit : lits) {
    const PredicateSignature* sig = e.find_predicate(lit.predicate);
    if (sig == nullptr) {
      out.push_back("action '" + a.name + "' " + where + " uses undeclared predicate '" +
                    lit.predicate + "'");
      continue;
    }
    if (sig->params.size() != lit.args.size()) {
      out.push_back("action '" + a.name + "' " + where + " literal '" + lit.text() +
                    "' has arity " + std::to_string(lit.args.size()) + ", predicate '" +
                    lit.predicate + "' expects " + std::to_string(sig->params.size()));
      continue;
    }
    for (size_t i = 0; i < lit.args.size(); ++i) {
      if (bound.count(lit.args[i]) == 0) {
        out.push_back("action '" + a.name + "' " + where + " literal '" + lit.text() +
                      "' references unbound variable '" + lit.args[i] + "'");
        continue;
      }
      const auto param =
          std::find_if(a.params.begin(), a.params.end(),
                       [&](const Param& p) { return p.name == lit.args[i]; });
      if (param != a.params.end() && !e.types.is_subtype(param->type, sig->params[i].type)) {
        out.push_back("action '" + a.name + "' " + where + " literal '" + lit.text() + "' arg '" +
                      lit.args[i] + "' has type '" + param->type + "', predicate expects '" +
                      sig->params[i].type + "'");
      }
    }
  }
}

}  // namespace

std::vector<std::string> validate_domain_elements(const DomainElements& e) {
  std::vector<std::string> out;

  // Type hierarchy: required base types, no robot/human types, acyclic.
  for (const char* required : {"agent", "room", "item"}) {
    if (!e.types.contains(required)) {
      out.push_back(std::string("type hierarchy is missing required type '") + required + "'");
    }
  }
  for (const char* banned : {"robot", "human"}) {
    if (e.types.parent.count(banned) > 0) {
      out.push_back(std::string("'") + banned + "' must be an agent instance, not a type");
    }
  }
  for (const auto& [type, _] : e.types.parent) {
    std::string cur = type;
    size_t hops = 0;
    while (cur != "object") {
      auto it = e.types.parent.find(cur);
      if (it == e.types.parent.end()) {
        out.push_back("type '" + cur + "' (reached from '" + type + "') has no declared parent");
        break;
      }
      cur = it->second;
      if (++hops > e.types.parent.size()) {
        out.push_back("type cycle through '" + type + "'");
        break;
      }
    }
  }

  std::set<std::string> predicate_names;
  for (const auto& p : e.predicates) {
    if (!predicate_names.insert(p.name).second) {
      out.push_back("duplicate predicate '" + p.name + "'");
    }
    if (!valid_identifier(p.name)) out.push_back("invalid predicate name '" + p.name + "'");
    for (const auto& param : p.params) {
      if (!e.types.contains(param.type)) {
        out.push_back("predicate '" + p.name + "' param '" + param.name + "' has unknown type '" +
                      param.type + "'");
      }
    }
  }

  std::set<std::string> action_names;
  for (const auto& a : e.actions) {
    if (!action_names.insert(a.name).second) out.push_back("duplicate action '" + a.name + "'");
    if (!valid_identifier(a.name)) out.push_back("invalid action name '" + a.name + "'");

    std::set<std::string> param_names;
    size_t agent_params = 0;
    for (const auto& p : a.params) {
      if (!param_names.insert(p.name).second) {
        out.push_back("action '" + a.name + "' has duplicate parameter '" + p.name + "'");
      }
      if (!e.types.contains(p.type)) {
        out.push_back("action '" + a.name + "' param '" + p.name + "' has unknown type '" +
                      p.type + "'");
      }
      if (p.type == "agent") ++agent_params;
    }
    if (agent_params != 1) {
      out.push_back("action '" + a.name + "' must have exactly one agent-typed parameter, has " +
                    std::to_string(agent_params));
    }

    validate_schema_literals(e, a, a.preconditions, "precondition", out);
    validate_schema_literals(e, a, a.add_effects, "add effect", out);
    validate_schema_literals(e, a, a.del_effects, "delete effect", out);
    for (const auto& lit : a.add_effects) {
      if (lit.negated) out.push_back("action '" + a.name + "' add effect is negated");
    }
    for (const auto& lit : a.del_effects) {
      if (lit.negated) out.push_back("action '" + a.name + "' delete effect is negated");
      if (std::find(a.add_effects.begin(), a.add_effects.end(), lit) != a.add_effects.end()) {
        out.push_back("action '" + a.name + "' adds and deletes '" + lit.text() + "'");
      }
    }
  }
  return out;
}

bool valid_identifier(const std::string& id) {
  if (id.empty()) return false;
  if (id[0] < 'a' || id[0] > 'z') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

namespace {

std::vector<std::string> tokenize_literal(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : text) {
    if (c == '(' || c == ')') {
      if (!cur.empty()) tokens.push_back(std::exchange(cur, {}));
      tokens.push_back(std::string(1, c));
    } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      if (!cur.empty()) tokens.push_back(std::exchange(cur, {}));
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

}  // namespace

Literal parse_literal_text(const std::string& text) {
  const auto tokens = tokenize_literal(text);
  size_t pos = 0;
  auto expect = [&](const std::string& tok) {
    if (pos >= tokens.size() || tokens[pos] != tok) {
      throw ParseError("malformed literal '" + text + "'", 1, static_cast<int>(pos + 1));
    }
    ++pos;
  };

  Literal lit;
  expect("(");
  if (pos < tokens.size() && tokens[pos] == "not") {
    lit.negated = true;
    ++pos;
    expect("(");
  }
  if (pos >= tokens.size() || tokens[pos] == "(" || tokens[pos] == ")") {
    throw ParseError("missing predicate in literal '" + text + "'", 1, static_cast<int>(pos + 1));
  }
  lit.predicate = tokens[pos++];
  while (pos < tokens.size() && tokens[pos] != ")") {
    std::string arg = tokens[pos++];
    if (arg == "(") throw ParseError("nested form in literal '" + text + "'", 1, 1);
    if (!arg.empty() && arg[0] == '?') arg.erase(arg.begin());
    lit.args.push_back(arg);
  }
  expect(")");
  if (lit.negated) expect(")");
  if (pos != tokens.size()) {
    throw ParseError("trailing tokens in literal '" + text + "'", 1, static_cast<int>(pos + 1));
  }
  return lit;
}

GroundLiteral parse_ground_literal_text(const std::string& text) {
  Literal lit = parse_literal_text(text);
  if (lit.negated) throw ParseError("ground literal must be positive: '" + text + "'", 1, 1);
  return GroundLiteral{lit.predicate, lit.args};
}

std::string canonical_goal_text(const std::vector<GroundLiteral>& goal) {
  std::vector<std::string> parts;
  parts.reserve(goal.size());
  for (const auto& lit : goal) parts.push_back(lit.text());
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

}  // namespace awareplan
