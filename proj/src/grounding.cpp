#include "awareplan/grounding.hpp"

#include <algorithm>

#include "awareplan/errors.hpp"

namespace awareplan {

namespace {

const PredicateSignature* find_sig(const DomainSpec& domain, const std::string& name) {
  for (const auto& p : domain.predicates) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

void require_predicate(const DomainSpec& domain, const std::string& name, size_t arity,
                       const std::string& why) {
  const PredicateSignature* sig = find_sig(domain, name);
  if (sig == nullptr || sig->params.size() != arity) {
    throw UndeclaredPredicate("the domain must declare predicate '" + name + "' with arity " +
                              std::to_string(arity) + " to represent " + why);
  }
}

void add_init(ProblemSpec& problem, GroundLiteral lit) {
  if (std::find(problem.init.begin(), problem.init.end(), lit) == problem.init.end()) {
    problem.init.push_back(std::move(lit));
  }
}

void check_goal_literals(const std::vector<GroundLiteral>& literals, const ProblemSpec& problem,
                         const DomainSpec& domain, const std::string& who) {
  for (const auto& lit : literals) {
    const PredicateSignature* sig = find_sig(domain, lit.predicate);
    if (sig == nullptr) {
      throw IllTypedGoal(who + " goal literal '" + lit.text() + "' uses undeclared predicate '" +
                         lit.predicate + "'");
    }
    if (sig->params.size() != lit.args.size()) {
      throw IllTypedGoal(who + " goal literal '" + lit.text() + "' has arity " +
                         std::to_string(lit.args.size()) + ", predicate expects " +
                         std::to_string(sig->params.size()));
    }
    for (size_t i = 0; i < lit.args.size(); ++i) {
      auto obj = problem.objects.find(lit.args[i]);
      if (obj == problem.objects.end()) {
        throw IllTypedGoal(who + " goal literal '" + lit.text() +
                           "' references unknown object '" + lit.args[i] + "'");
      }
      if (!domain.types.is_subtype(obj->second, sig->params[i].type)) {
        throw IllTypedGoal(who + " goal literal '" + lit.text() + "' arg '" + lit.args[i] +
                           "' of type '" + obj->second + "' does not match '" +
                           sig->params[i].type + "'");
      }
    }
  }
}

}  // namespace

void add_agent(ProblemSpec& problem, const AgentNode& agent, const DomainSpec& domain) {
  if (problem.objects.count(agent.id) > 0) {
    throw DuplicateObject("agent '" + agent.id + "' is already an object");
  }
  require_predicate(domain, "at-agent", 2, "agent locations");
  problem.objects[agent.id] = "agent";
  add_init(problem, {"at-agent", {agent.id, agent.parent_room}});

  if (!agent.holding.empty()) {
    require_predicate(domain, "holding", 2, "held items");
    for (const auto& item : agent.holding) add_init(problem, {"holding", {agent.id, item}});
  }

  const char* marker = agent.kind == AgentKind::robot ? "robot" : "human";
  const PredicateSignature* sig = find_sig(domain, marker);
  if (sig != nullptr && sig->params.size() == 1) {
    add_init(problem, {marker, {agent.id}});
  }
}

void add_room_objects(ProblemSpec& problem, const SceneGraph& frame, const DomainSpec& domain) {
  const bool has_adjacency =
      std::any_of(frame.rooms.begin(), frame.rooms.end(),
                  [](const auto& entry) { return !entry.second.neighbors.empty(); });
  if (has_adjacency) require_predicate(domain, "connected", 2, "room adjacency");
  for (const auto& [id, _] : frame.rooms) {
    problem.objects[id] = "room";
  }
  for (const auto& [id, room] : frame.rooms) {
    for (const auto& nb : room.neighbors) {
      add_init(problem, {"connected", {id, nb}});
      add_init(problem, {"connected", {nb, id}});
    }
  }
}

void set_init_state(ProblemSpec& problem, const ItemNode& item, const DomainSpec& domain) {
  auto room = problem.objects.find(item.parent_room);
  if (room == problem.objects.end() || room->second != "room") {
    throw UnknownRoom("item '" + item.id + "' is in room '" + item.parent_room +
                      "', which is not an object yet");
  }
  if (problem.objects.count(item.id) > 0) {
    throw DuplicateObject("item '" + item.id + "' is already an object");
  }
  require_predicate(domain, "at", 2, "item locations");
  problem.objects[item.id] = "item";
  add_init(problem, {"at", {item.id, item.parent_room}});

  const PredicateSignature* accessible = find_sig(domain, "accessible");
  if (item.accessible && accessible != nullptr && accessible->params.size() == 1) {
    add_init(problem, {"accessible", {item.id}});
  }

  for (const auto& [key, value] : item.states) {
    const std::string predicate = key + "-" + value;
    const PredicateSignature* sig = find_sig(domain, predicate);
    if (sig == nullptr || sig->params.size() != 1) {
      throw UndeclaredStatePredicate("item '" + item.id + "' state " + key + "=" + value +
                                     " needs predicate '" + predicate + "' (item), not declared");
    }
    add_init(problem, {predicate, {item.id}});
  }
}

std::vector<std::string> add_activity_facts(ProblemSpec& problem, const SceneGraph& frame,
                                            const DomainSpec& domain) {
  std::vector<std::string> unmapped;
  const auto object_types = frame_object_types(frame);

  for (const auto& edge : frame.edges) {
    const PredicateSignature* sig = find_sig(domain, edge.relation);
    bool mapped = false;
    if (sig != nullptr && sig->params.size() == 2) {
      auto src = object_types.find(edge.source);
      auto dst = object_types.find(edge.target);
      if (src != object_types.end() && dst != object_types.end() &&
          domain.types.is_subtype(src->second, sig->params[0].type) &&
          domain.types.is_subtype(dst->second, sig->params[1].type)) {
        add_init(problem, {edge.relation, {edge.source, edge.target}});
        mapped = true;
      }
    }
    if (!mapped) {
      unmapped.push_back("(" + edge.relation + " " + edge.source + " " + edge.target + ")");
    }
  }

  const PredicateSignature* active_in = find_sig(domain, "human-active-in");
  if (active_in != nullptr && active_in->params.size() == 1) {
    for (const auto& [id, agent] : frame.agents) {
      if (agent.kind != AgentKind::human) continue;
      if (agent.current_action && *agent.current_action != "idle" &&
          !agent.current_action->empty()) {
        add_init(problem, {"human-active-in", {agent.parent_room}});
      }
    }
  }
  return unmapped;
}

void add_goal(ProblemSpec& problem, const std::string& human_id, const GoalCandidate& goal,
              const DomainSpec& domain) {
  check_goal_literals(goal.goal, problem, domain, "human '" + human_id + "'");
  GoalPartition* existing = problem.find_goal(human_id);
  if (existing != nullptr) {
    existing->literals = goal.goal;  // re-prediction replaces, not appends
    return;
  }
  problem.goals.push_back({human_id, PartitionKind::human, goal.goal});
}

void set_robot_goal(ProblemSpec& problem, const std::string& robot_id,
                    const std::vector<GroundLiteral>& goal, const DomainSpec& domain) {
  check_goal_literals(goal, problem, domain, "robot");
  for (auto& g : problem.goals) {
    if (g.kind == PartitionKind::robot) {
      g.agent_id = robot_id;
      g.literals = goal;
      return;
    }
  }
  problem.goals.push_back({robot_id, PartitionKind::robot, goal});
}

// ---------------------------------------------------------------------------
// Pipeline

TransformResult transform(const KnowledgeBase& kb, const SnapshotSequence& seq,
                          Extractor& extractor, PredictorBackend& predictor,
                          SynthesisBackend& synthesis, const TransformOptions& options,
                          TransformReport* out_report) {
  TransformReport local;
  TransformReport& report = out_report != nullptr ? *out_report : local;
  auto stage = [&](const std::string& name) { report.stage_reached = name; };

  stage("extract-domain");
  const KnowledgeBundle& bundle = get_knowledge(kb, options.domain_name);
  DomainElements elements = extractor.extract(bundle);

  TransformResult result;
  result.domain.name = options.domain_name;
  result.domain.types = std::move(elements.types);
  result.domain.predicates = std::move(elements.predicates);
  result.domain.actions = std::move(elements.actions);

  stage("frame");
  if (seq.snapshots.empty()) throw EmptySequence("snapshot sequence is empty");
  const SceneGraph& frame = seq.latest();

  // Cross-module referential integrity: item affordances must name extracted
  // action schemas.
  for (const auto& [id, item] : frame.items) {
    for (const auto& action : item.affordable_actions) {
      if (result.domain.elements().find_action(action) == nullptr) {
        throw UnknownAffordance("item '" + id + "' affords unknown action '" + action + "'");
      }
    }
  }

  result.problem.name = options.problem_name;
  result.problem.domain_name = options.domain_name;

  stage("init-rooms");
  add_room_objects(result.problem, frame, result.domain);

  stage("add-robot");
  const AgentNode& robot = get_robot_node(frame);
  add_agent(result.problem, robot, result.domain);

  stage("init-items");
  for (const auto& [_, item] : frame.items) {
    set_init_state(result.problem, item, result.domain);
  }

  stage("init-activity");
  report.unmapped_edges = add_activity_facts(result.problem, frame, result.domain);

  stage("robot-goal");
  set_robot_goal(result.problem, robot.id, options.robot_goal, result.domain);

  for (const auto& [human_id, agent] : frame.agents) {
    if (agent.kind != AgentKind::human) continue;

    stage("add-human[" + human_id + "]");
    add_agent(result.problem, agent, result.domain);

    stage("history[" + human_id + "]");
    InteractionHistory history = build_history(seq, human_id);

    stage("predict[" + human_id + "]");
    HumanReport human_report;
    human_report.human_id = human_id;
    human_report.distribution =
        predictor.predict(agent, history, frame, result.domain.elements());

    const bool any_uncovered =
        std::any_of(human_report.distribution.candidates.begin(),
                    human_report.distribution.candidates.end(),
                    [](const GoalCandidate& c) { return c.uncovered; });
    if (any_uncovered) {
      stage("synthesize[" + human_id + "]");
      human_report.synthesis =
          synthesize_missing_elements(human_report.distribution, result.domain.elements(),
                                      frame_object_types(frame), synthesis);
      for (const auto& p : human_report.synthesis.predicates) {
        result.domain.predicates.push_back(p);
      }
      for (const auto& a : human_report.synthesis.actions) {
        result.domain.actions.push_back(a);
      }
      const DomainElements extended = result.domain.elements();
      const auto object_types = frame_object_types(frame);
      for (auto& c : human_report.distribution.candidates) {
        c.uncovered = !goal_covered(c.goal, extended, object_types);
      }
    }

    stage("goal[" + human_id + "]");
    human_report.selected = select_goal(human_report.distribution);
    add_goal(result.problem, human_id, human_report.selected, result.domain);
    report.humans.push_back(std::move(human_report));
  }

  stage("validate");
  auto violations = validate_domain(result.domain);
  auto problem_violations = validate_problem(result.domain, result.problem);
  violations.insert(violations.end(), problem_violations.begin(), problem_violations.end());
  if (!violations.empty()) {
    std::string joined;
    for (const auto& v : violations) joined += (joined.empty() ? "" : "; ") + v;
    throw Error("transform produced an inconsistent specification: " + joined);
  }

  stage("done");
  result.report = report;
  return result;
}

std::vector<GroundLiteral> load_task(const std::string& json_text) {
  Json doc = parse_json_text(json_text, "task file");
  check_keys(doc, "task file", {"goal"}, {});
  std::vector<GroundLiteral> goal;
  for (const auto& entry : get_array(doc, "goal", "task file")) {
    if (!entry.is_string()) throw SchemaError("task file: goal entries must be strings");
    goal.push_back(parse_ground_literal_text(entry.get<std::string>()));
  }
  std::sort(goal.begin(), goal.end());
  goal.erase(std::unique(goal.begin(), goal.end()), goal.end());
  return goal;
}

std::vector<GroundLiteral> load_task_file(const std::string& path) {
  try {
    return load_task(read_text_file(path));
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

Json report_to_json(const TransformReport& report) {
  Json doc;
  doc["stage_reached"] = report.stage_reached;
  doc["unmapped_edges"] = report.unmapped_edges;
  doc["humans"] = Json::array();
  for (const auto& h : report.humans) {
    Json dist = Json::array();
    for (const auto& c : h.distribution.candidates) {
      dist.push_back({{"goal", c.goal_text()},
                      {"probability", c.probability},
                      {"rationale", c.rationale},
                      {"uncovered", c.uncovered}});
    }
    Json synthesis;
    synthesis["predicates"] = Json::array();
    for (const auto& p : h.synthesis.predicates) synthesis["predicates"].push_back(p.name);
    synthesis["actions"] = Json::array();
    for (const auto& a : h.synthesis.actions) synthesis["actions"].push_back(a.name);
    doc["humans"].push_back({{"human_id", h.human_id},
                             {"distribution", std::move(dist)},
                             {"selected_goal", h.selected.goal_text()},
                             {"synthesis", std::move(synthesis)}});
  }
  return doc;
}

}  // namespace awareplan
