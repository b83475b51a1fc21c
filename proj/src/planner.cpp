#include "awareplan/planner.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <unordered_map>

#include "awareplan/errors.hpp"

namespace awareplan {

std::string GroundAction::name() const {
  std::string out = "(" + schema_name;
  for (const auto& a : args) out += " " + a;
  out += ")";
  return out;
}

std::string PlanStep::name() const {
  std::string out = "(" + schema_name;
  for (const auto& a : args) out += " " + a;
  out += ")";
  return out;
}

SearchStrategy parse_strategy(const std::string& text) {
  if (text == "ucs") return SearchStrategy::uniform_cost;
  if (text == "astar") return SearchStrategy::astar_goalcount;
  if (text == "gbfs") return SearchStrategy::gbfs_hadd;
  throw SchemaError("unknown search strategy '" + text + "' (expected ucs|astar|gbfs)");
}

std::string to_string(SearchStrategy strategy) {
  switch (strategy) {
    case SearchStrategy::uniform_cost: return "ucs";
    case SearchStrategy::astar_goalcount: return "astar";
    case SearchStrategy::gbfs_hadd: return "gbfs";
  }
  return "ucs";
}

// ---------------------------------------------------------------------------
// Grounding

namespace {

struct PartialAction {
  std::string agent;
  std::string schema_name;
  std::vector<std::string> args;
  std::vector<GroundLiteral> pre;
  std::vector<GroundLiteral> neg_pre;
  std::vector<GroundLiteral> add;
  std::vector<GroundLiteral> del;
};

GroundLiteral bind_literal(const Literal& lit, const std::map<std::string, std::string>& binding) {
  GroundLiteral out;
  out.predicate = lit.predicate;
  out.args.reserve(lit.args.size());
  for (const auto& a : lit.args) out.args.push_back(binding.at(a));
  return out;
}

}  // namespace

GroundedTask ground_task(const DomainSpec& domain, const ProblemSpec& problem,
                         const GroundConfig& config) {
  {
    const auto violations = validate_problem(domain, problem);
    if (!violations.empty()) {
      std::string joined;
      for (const auto& v : violations) joined += (joined.empty() ? "" : "; ") + v;
      throw TypeMismatch("problem does not type-check against domain: " + joined);
    }
  }

  // Objects per parameter type, subtype-aware, sorted for determinism.
  std::map<std::string, std::vector<std::string>> objects_by_type;
  auto objects_for = [&](const std::string& type) -> const std::vector<std::string>& {
    auto it = objects_by_type.find(type);
    if (it != objects_by_type.end()) return it->second;
    std::vector<std::string> objs;
    for (const auto& [id, obj_type] : problem.objects) {
      if (domain.types.is_subtype(obj_type, type)) objs.push_back(id);
    }
    return objects_by_type.emplace(type, std::move(objs)).first->second;
  };

  // Predicates never touched by effects are static: their truth is fixed by
  // init, so static preconditions prune bindings during enumeration.
  std::set<std::string> fluent_predicates;
  for (const auto& a : domain.actions) {
    for (const auto& e : a.add_effects) fluent_predicates.insert(e.predicate);
    for (const auto& e : a.del_effects) fluent_predicates.insert(e.predicate);
  }
  std::set<GroundLiteral> init_set(problem.init.begin(), problem.init.end());

  std::vector<ActionSchema> schemas = domain.actions;
  std::sort(schemas.begin(), schemas.end(),
            [](const ActionSchema& a, const ActionSchema& b) { return a.name < b.name; });

  std::vector<PartialAction> candidates;
  for (const auto& schema : schemas) {
    const size_t arity = schema.params.size();
    std::vector<const std::vector<std::string>*> pools;
    pools.reserve(arity);
    bool empty_pool = false;
    for (const auto& p : schema.params) {
      pools.push_back(&objects_for(p.type));
      if (pools.back()->empty()) empty_pool = true;
    }
    if (empty_pool) continue;

    std::vector<size_t> odometer(arity, 0);
    while (true) {
      std::map<std::string, std::string> binding;
      for (size_t i = 0; i < arity; ++i) {
        binding[schema.params[i].name] = (*pools[i])[odometer[i]];
      }

      bool viable = true;
      PartialAction pa;
      for (const auto& lit : schema.preconditions) {
        GroundLiteral ground = bind_literal(lit, binding);
        const bool is_static = fluent_predicates.count(lit.predicate) == 0;
        const bool holds = init_set.count(ground) > 0;
        if (is_static) {
          if (lit.negated == holds) {  // positive missing or negative present
            viable = false;
            break;
          }
          // Statically satisfied; drop from the ground action.
        } else if (lit.negated) {
          pa.neg_pre.push_back(std::move(ground));
        } else {
          pa.pre.push_back(std::move(ground));
        }
      }

      if (viable) {
        pa.schema_name = schema.name;
        pa.agent = binding.at(schema.agent_param().name);
        pa.args.reserve(arity);
        for (const auto& p : schema.params) pa.args.push_back(binding.at(p.name));
        for (const auto& lit : schema.add_effects) pa.add.push_back(bind_literal(lit, binding));
        for (const auto& lit : schema.del_effects) pa.del.push_back(bind_literal(lit, binding));
        candidates.push_back(std::move(pa));
        if (candidates.size() > config.max_ground_actions) {
          throw ExplosionGuard("ground action count exceeds cap of " +
                               std::to_string(config.max_ground_actions));
        }
      }

      // Advance odometer.
      size_t i = 0;
      for (; i < arity; ++i) {
        if (++odometer[i] < pools[i]->size()) break;
        odometer[i] = 0;
      }
      if (i == arity) break;
    }
  }

  // Delete-relaxation reachability from init (negative preconditions are
  // ignored, which keeps the pruning a superset of true reachability).
  std::set<GroundLiteral> reached = init_set;
  std::vector<bool> fired(candidates.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < candidates.size(); ++i) {
      if (fired[i]) continue;
      const auto& pa = candidates[i];
      const bool applicable = std::all_of(pa.pre.begin(), pa.pre.end(), [&](const auto& lit) {
        return reached.count(lit) > 0;
      });
      if (!applicable) continue;
      fired[i] = true;
      changed = true;
      for (const auto& lit : pa.add) {
        if (reached.insert(lit).second) changed = true;
      }
    }
  }

  GroundedTask task;
  std::set<std::string> atom_texts;
  for (const auto& lit : reached) atom_texts.insert(lit.text());
  for (const auto& lit : problem.goal_literals()) atom_texts.insert(lit.text());
  task.atoms.assign(atom_texts.begin(), atom_texts.end());
  for (uint32_t i = 0; i < task.atoms.size(); ++i) task.atom_index[task.atoms[i]] = i;

  auto index_of = [&](const GroundLiteral& lit) { return task.atom_index.at(lit.text()); };

  for (const auto& lit : problem.init) task.init.push_back(index_of(lit));
  std::sort(task.init.begin(), task.init.end());
  task.init.erase(std::unique(task.init.begin(), task.init.end()), task.init.end());
  for (const auto& lit : problem.goal_literals()) task.goal.push_back(index_of(lit));
  std::sort(task.goal.begin(), task.goal.end());
  task.goal.erase(std::unique(task.goal.begin(), task.goal.end()), task.goal.end());

  for (size_t i = 0; i < candidates.size(); ++i) {
    if (!fired[i]) continue;
    const auto& pa = candidates[i];
    GroundAction ga;
    ga.agent = pa.agent;
    ga.schema_name = pa.schema_name;
    ga.args = pa.args;
    for (const auto& lit : pa.pre) ga.pre.push_back(index_of(lit));
    for (const auto& lit : pa.neg_pre) {
      // A never-reachable negated atom is always satisfied; drop it.
      auto it = task.atom_index.find(lit.text());
      if (it != task.atom_index.end()) ga.neg_pre.push_back(it->second);
    }
    for (const auto& lit : pa.add) ga.add.push_back(index_of(lit));
    for (const auto& lit : pa.del) {
      auto it = task.atom_index.find(lit.text());
      if (it != task.atom_index.end()) ga.del.push_back(it->second);
    }
    auto finish = [](std::vector<uint32_t>& v) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    finish(ga.pre);
    finish(ga.neg_pre);
    finish(ga.add);
    finish(ga.del);
    task.action_index[ga.name()] = static_cast<uint32_t>(task.actions.size());
    task.actions.push_back(std::move(ga));
  }

  return task;
}

// ---------------------------------------------------------------------------
// Search

namespace {

using Bits = std::vector<uint64_t>;

Bits make_state(size_t num_atoms, const std::vector<uint32_t>& set_atoms) {
  Bits bits((num_atoms + 63) / 64, 0);
  for (uint32_t a : set_atoms) bits[a >> 6] |= uint64_t{1} << (a & 63);
  return bits;
}

inline bool test_bit(const Bits& bits, uint32_t a) {
  return (bits[a >> 6] >> (a & 63)) & 1;
}

bool applicable(const GroundAction& action, const Bits& state) {
  for (uint32_t a : action.pre) {
    if (!test_bit(state, a)) return false;
  }
  for (uint32_t a : action.neg_pre) {
    if (test_bit(state, a)) return false;
  }
  return true;
}

Bits successor(const GroundAction& action, const Bits& state) {
  Bits next = state;
  for (uint32_t a : action.del) next[a >> 6] &= ~(uint64_t{1} << (a & 63));
  for (uint32_t a : action.add) next[a >> 6] |= uint64_t{1} << (a & 63);
  return next;
}

bool satisfies_goal(const GroundedTask& task, const Bits& state) {
  return std::all_of(task.goal.begin(), task.goal.end(),
                     [&](uint32_t a) { return test_bit(state, a); });
}

uint64_t hash_bits(const Bits& bits) {
  uint64_t h = 14695981039346656037ull;
  for (uint64_t w : bits) {
    h ^= w;
    h *= 1099511628211ull;
  }
  return h;
}

long h_goalcount(const GroundedTask& task, const Bits& state) {
  long count = 0;
  for (uint32_t a : task.goal) {
    if (!test_bit(state, a)) ++count;
  }
  return count;
}

// Additive relaxation heuristic: atom costs via fixpoint iteration from the
// state; action cost = 1 + sum of positive precondition costs.
long h_add(const GroundedTask& task, const Bits& state) {
  constexpr long kInf = std::numeric_limits<long>::max() / 4;
  std::vector<long> cost(task.num_atoms(), kInf);
  for (uint32_t a = 0; a < task.num_atoms(); ++a) {
    if (test_bit(state, a)) cost[a] = 0;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& action : task.actions) {
      long total = 1;
      bool reachable = true;
      for (uint32_t p : action.pre) {
        if (cost[p] >= kInf) {
          reachable = false;
          break;
        }
        total += cost[p];
        if (total >= kInf) total = kInf - 1;
      }
      if (!reachable) continue;
      for (uint32_t a : action.add) {
        if (total < cost[a]) {
          cost[a] = total;
          changed = true;
        }
      }
    }
  }
  long sum = 0;
  for (uint32_t g : task.goal) {
    if (cost[g] >= kInf) return kInf;
    sum += cost[g];
  }
  return sum;
}

struct SearchNode {
  Bits state;
  int64_t parent;   // node index, -1 for root
  uint32_t action;  // action applied to reach this node
  long g;
};

}  // namespace

Plan plan(const GroundedTask& task, const SearchConfig& config) {
  if (config.max_expansions <= 0) throw Error("max_expansions must be > 0");

  std::vector<SearchNode> nodes;
  nodes.push_back({make_state(task.num_atoms(), task.init), -1, 0, 0});

  auto heuristic = [&](const Bits& state) -> long {
    switch (config.strategy) {
      case SearchStrategy::uniform_cost: return 0;
      case SearchStrategy::astar_goalcount: return h_goalcount(task, state);
      case SearchStrategy::gbfs_hadd: return h_add(task, state);
    }
    return 0;
  };
  auto f_value = [&](long g, long h) {
    return config.strategy == SearchStrategy::gbfs_hadd ? h : g + h;
  };

  // Min-heap ordered by (f, insertion order).
  using Entry = std::pair<std::pair<long, uint64_t>, size_t>;  // ((f, order), node)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  uint64_t order = 0;
  open.push({{f_value(0, heuristic(nodes[0].state)), order++}, 0});

  std::unordered_map<uint64_t, std::vector<size_t>> visited;
  auto is_visited = [&](const Bits& state) {
    auto it = visited.find(hash_bits(state));
    if (it == visited.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(),
                       [&](size_t idx) { return nodes[idx].state == state; });
  };
  auto mark_visited = [&](const Bits& state, size_t idx) {
    visited[hash_bits(state)].push_back(idx);
  };
  mark_visited(nodes[0].state, 0);

  long expansions = 0;
  long generated = 1;

  auto extract_plan = [&](size_t goal_node) {
    Plan result;
    std::vector<uint32_t> chain;
    for (int64_t n = static_cast<int64_t>(goal_node); nodes[n].parent >= 0;
         n = nodes[n].parent) {
      chain.push_back(nodes[n].action);
    }
    std::reverse(chain.begin(), chain.end());
    for (size_t i = 0; i < chain.size(); ++i) {
      const GroundAction& a = task.actions[chain[i]];
      result.steps.push_back({i, a.agent, a.schema_name, a.args});
    }
    result.expansions = expansions;
    result.generated = generated;
    return result;
  };

  // With unit costs the frontier is generated in nondecreasing depth, so the
  // first generated goal state is already at minimal depth; the heuristic
  // strategies keep the pop-time test.
  const bool goal_test_on_generation = config.strategy == SearchStrategy::uniform_cost;

  while (!open.empty()) {
    const size_t current = open.top().second;
    open.pop();

    // Copy the fields used after nodes may reallocate.
    const Bits state = nodes[current].state;
    const long g = nodes[current].g;

    if (satisfies_goal(task, state)) return extract_plan(current);

    if (++expansions > config.max_expansions) {
      throw ResourceLimit("expansion limit of " + std::to_string(config.max_expansions) +
                          " reached");
    }

    for (uint32_t ai = 0; ai < task.actions.size(); ++ai) {
      const GroundAction& action = task.actions[ai];
      if (!applicable(action, state)) continue;
      Bits next = successor(action, state);
      if (is_visited(next)) continue;
      nodes.push_back({next, static_cast<int64_t>(current), ai, g + action.cost});
      mark_visited(next, nodes.size() - 1);
      ++generated;
      if (goal_test_on_generation && satisfies_goal(task, nodes.back().state)) {
        return extract_plan(nodes.size() - 1);
      }
      open.push({{f_value(g + action.cost, heuristic(next)), order++}, nodes.size() - 1});
    }
  }

  throw Unsolvable("search space exhausted after " + std::to_string(expansions) + " expansions");
}

// ---------------------------------------------------------------------------
// Independent validation

std::string Verdict::describe() const {
  switch (kind) {
    case Kind::valid: return "valid";
    case Kind::invalid:
      return "invalid at step " + std::to_string(failed_step) + ": missing precondition " +
             missing;
    case Kind::goal_unmet: {
      std::string out = "goal unmet:";
      for (const auto& a : unmet) out += " " + a;
      return out;
    }
  }
  return "valid";
}

Verdict validate_plan(const GroundedTask& task, const Plan& plan) {
  Verdict verdict;
  std::set<uint32_t> state(task.init.begin(), task.init.end());
  verdict.trajectory.push_back(state);

  for (size_t i = 0; i < plan.steps.size(); ++i) {
    const PlanStep& step = plan.steps[i];
    auto it = task.action_index.find(step.name());
    if (it == task.action_index.end()) {
      throw UnknownAction("plan step " + std::to_string(i) + " '" + step.name() +
                          "' matches no ground action");
    }
    const GroundAction& action = task.actions[it->second];

    for (uint32_t p : action.pre) {
      if (state.count(p) == 0) {
        verdict.kind = Verdict::Kind::invalid;
        verdict.failed_step = i;
        verdict.missing = task.atoms[p];
        return verdict;
      }
    }
    for (uint32_t p : action.neg_pre) {
      if (state.count(p) > 0) {
        verdict.kind = Verdict::Kind::invalid;
        verdict.failed_step = i;
        verdict.missing = "(not " + task.atoms[p] + ")";
        return verdict;
      }
    }
    for (uint32_t a : action.del) state.erase(a);
    for (uint32_t a : action.add) state.insert(a);
    verdict.trajectory.push_back(state);
  }

  for (uint32_t g : task.goal) {
    if (state.count(g) == 0) verdict.unmet.push_back(task.atoms[g]);
  }
  if (!verdict.unmet.empty()) verdict.kind = Verdict::Kind::goal_unmet;
  return verdict;
}

// ---------------------------------------------------------------------------
// Plan files

std::string plan_to_json(const Plan& plan) {
  Json doc;
  doc["steps"] = Json::array();
  for (const auto& s : plan.steps) {
    doc["steps"].push_back({{"agent", s.agent}, {"action", s.schema_name}, {"args", s.args}});
  }
  doc["expansions"] = plan.expansions;
  doc["generated"] = plan.generated;
  doc["cost"] = plan.steps.size();
  return doc.dump(2) + "\n";
}

Plan plan_from_json(const std::string& json_text) {
  Json doc = parse_json_text(json_text, "plan file");
  check_keys(doc, "plan file", {"steps"}, {"expansions", "generated", "cost"});
  Plan plan;
  size_t index = 0;
  for (const auto& s : get_array(doc, "steps", "plan file")) {
    check_keys(s, "plan step", {"agent", "action", "args"}, {});
    PlanStep step;
    step.index = index++;
    step.agent = get_string(s, "agent", "plan step");
    step.schema_name = get_string(s, "action", "plan step");
    for (const auto& a : get_array(s, "args", "plan step")) {
      if (!a.is_string()) throw SchemaError("plan step args must be strings");
      step.args.push_back(a.get<std::string>());
    }
    plan.steps.push_back(std::move(step));
  }
  if (doc.contains("expansions")) plan.expansions = doc["expansions"].get<long>();
  if (doc.contains("generated")) plan.generated = doc["generated"].get<long>();
  return plan;
}

std::string plan_to_text(const Plan& plan) {
  std::string out;
  for (const auto& s : plan.steps) out += s.name() + "\n";
  return out;
}

Plan plan_from_text(const std::string& text, const GroundedTask& task) {
  Plan plan;
  std::string line;
  for (size_t pos = 0; pos <= text.size(); ++pos) {
    if (pos < text.size() && text[pos] != '\n') {
      line += text[pos];
      continue;
    }
    // trim
    size_t begin = line.find_first_not_of(" \t\r");
    size_t end = line.find_last_not_of(" \t\r");
    const std::string trimmed =
        begin == std::string::npos ? "" : line.substr(begin, end - begin + 1);
    line.clear();
    if (trimmed.empty() || trimmed[0] == ';') continue;

    auto it = task.action_index.find(trimmed);
    if (it == task.action_index.end()) {
      throw UnknownAction("plan line '" + trimmed + "' matches no ground action");
    }
    const GroundAction& action = task.actions[it->second];
    plan.steps.push_back({plan.steps.size(), action.agent, action.schema_name, action.args});
  }
  return plan;
}

}  // namespace awareplan
