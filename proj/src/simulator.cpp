#include "awareplan/simulator.hpp"

#include <algorithm>
#include <utility>

#include "awareplan/errors.hpp"
#include "awareplan/grounding.hpp"

namespace awareplan {

// ---------------------------------------------------------------------------
// Agendas

Agenda load_agenda(const std::string& json_text) {
  Json doc = parse_json_text(json_text, "agenda");
  check_keys(doc, "agenda", {"human_id", "script"}, {});
  Agenda agenda;
  agenda.human_id = get_string(doc, "human_id", "agenda");
  int last_t = 0;
  for (const auto& entry : get_array(doc, "script", "agenda")) {
    check_keys(entry, "agenda script entry", {"t", "activity"}, {"target"});
    AgendaEntry e;
    e.timestep = get_int(entry, "t", "agenda script entry");
    e.activity = get_string(entry, "activity", "agenda script entry");
    if (entry.contains("target")) e.target = get_string(entry, "target", "agenda script entry");
    if (e.timestep <= last_t) {
      throw SchemaError("agenda for '" + agenda.human_id +
                        "': script timesteps must be strictly increasing");
    }
    last_t = e.timestep;
    agenda.script.push_back(std::move(e));
  }
  return agenda;
}

Agenda load_agenda_file(const std::string& path) {
  try {
    return load_agenda(read_text_file(path));
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

std::vector<std::string> validate_agenda(const Agenda& agenda, const SceneGraph& world) {
  std::vector<std::string> out;
  const AgentNode* human = world.find_agent(agenda.human_id);
  if (human == nullptr || human->kind != AgentKind::human) {
    out.push_back("agenda names '" + agenda.human_id + "', which is not a human in the scene");
  }
  for (const auto& e : agenda.script) {
    if (e.activity != "idle" && !e.target.empty() && world.find_item(e.target) == nullptr) {
      out.push_back("agenda for '" + agenda.human_id + "' targets missing item '" + e.target +
                    "' at t=" + std::to_string(e.timestep));
    }
    if (e.activity != "idle" && e.target.empty()) {
      out.push_back("agenda for '" + agenda.human_id + "' has activity '" + e.activity +
                    "' without a target at t=" + std::to_string(e.timestep));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// World state

namespace {

const std::string kAtAgent = "at-agent";
const std::string kAt = "at";
const std::string kHolding = "holding";
const std::string kActiveIn = "human-active-in";

}  // namespace

std::string WorldState::agent_room(const std::string& agent) const {
  for (const auto& f : facts) {
    if (f.predicate == kAtAgent && f.args.size() == 2 && f.args[0] == agent) return f.args[1];
  }
  return "";
}

std::string WorldState::item_room(const std::string& item) const {
  for (const auto& f : facts) {
    if (f.predicate == kAt && f.args.size() == 2 && f.args[0] == item) return f.args[1];
  }
  return "";
}

std::string WorldState::holder_of(const std::string& item) const {
  for (const auto& f : facts) {
    if (f.predicate == kHolding && f.args.size() == 2 && f.args[1] == item) return f.args[0];
  }
  return "";
}

std::set<std::string> WorldState::held_by(const std::string& agent) const {
  std::set<std::string> out;
  for (const auto& f : facts) {
    if (f.predicate == kHolding && f.args.size() == 2 && f.args[0] == agent) out.insert(f.args[1]);
  }
  return out;
}

size_t Trace::fault_count() const {
  return static_cast<size_t>(
      std::count_if(entries.begin(), entries.end(),
                    [](const TraceEntry& e) { return e.action.faulted; }));
}

WorldState initial_world(const SceneGraph& scene, const DomainSpec& domain) {
  // Same mapping as grounding: build a scratch problem and take its init.
  ProblemSpec scratch;
  scratch.name = "world";
  scratch.domain_name = domain.name;
  add_room_objects(scratch, scene, domain);
  for (const auto& [_, agent] : scene.agents) add_agent(scratch, agent, domain);
  for (const auto& [_, item] : scene.items) set_init_state(scratch, item, domain);
  add_activity_facts(scratch, scene, domain);

  WorldState world;
  world.timestep = 0;
  world.facts.insert(scratch.init.begin(), scratch.init.end());

  for (const auto& [id, agent] : scene.agents) {
    if (agent.kind != AgentKind::human) continue;
    if (!agent.current_action || *agent.current_action == "idle" || agent.current_action->empty()) {
      continue;
    }
    // Target: the item endpoint of an edge labeled with the ongoing activity.
    std::string target;
    for (const auto& e : scene.edges) {
      if (e.relation != *agent.current_action) continue;
      std::string other;
      if (e.source == id) {
        other = e.target;
      } else if (e.target == id) {
        other = e.source;
      } else {
        continue;
      }
      if (scene.items.count(other) == 0) continue;
      if (target.empty() || other < target) target = other;
    }
    world.actives[id] = {*agent.current_action, target};
  }
  return world;
}

namespace {

void move_agent(WorldState& world, const std::string& agent, const std::string& room) {
  const std::string old_room = world.agent_room(agent);
  if (old_room == room || room.empty()) return;
  world.facts.erase({kAtAgent, {agent, old_room}});
  world.facts.insert({kAtAgent, {agent, room}});
}

void refresh_occupancy(WorldState& world) {
  for (auto it = world.facts.begin(); it != world.facts.end();) {
    it = it->predicate == kActiveIn ? world.facts.erase(it) : std::next(it);
  }
  for (const auto& [human, _] : world.actives) {
    const std::string room = world.agent_room(human);
    if (!room.empty()) world.facts.insert({kActiveIn, {room}});
  }
}

std::string next_scripted_target(const Agenda& agenda, int after_timestep) {
  for (const auto& e : agenda.script) {
    if (e.timestep > after_timestep && e.activity != "idle" && !e.target.empty()) {
      return e.target;
    }
  }
  return "";
}

}  // namespace

WorldState step(const WorldState& world, const GroundedTask& task,
                const std::optional<PlanStep>& robot_step, const std::vector<Agenda>& agendas,
                JointAction* out_action) {
  WorldState next = world;
  next.timestep = world.timestep + 1;
  const int t = next.timestep;

  JointAction joint;

  // Scripted human activities for this timestep; no entry means idle.
  next.actives.clear();
  next.next_targets.clear();
  for (const auto& agenda : agendas) {
    for (const auto& e : agenda.script) {
      if (e.timestep != t) continue;
      if (e.activity == "idle" || e.target.empty()) break;
      next.actives[agenda.human_id] = {e.activity, e.target};
      break;
    }
    const std::string upcoming = next_scripted_target(agenda, t);
    if (!upcoming.empty()) next.next_targets[agenda.human_id] = upcoming;
  }
  for (const auto& [human, active] : next.actives) {
    // The human walks to the target's room as part of starting the activity.
    const std::string room = next.item_room(active.target);
    if (!room.empty()) move_agent(next, human, room);
  }
  refresh_occupancy(next);
  joint.activities = next.actives;

  // Robot action, checked against the post-human-update world.
  if (robot_step) {
    joint.robot_step = robot_step;
    auto it = task.action_index.find(robot_step->name());
    if (it == task.action_index.end()) {
      throw UnknownAction("plan step '" + robot_step->name() + "' matches no ground action");
    }
    const GroundAction& action = task.actions[it->second];

    std::string failure;
    for (uint32_t p : action.pre) {
      if (next.facts.count(parse_ground_literal_text(task.atoms[p])) == 0) {
        failure = task.atoms[p];
        break;
      }
    }
    if (failure.empty()) {
      for (uint32_t p : action.neg_pre) {
        if (next.facts.count(parse_ground_literal_text(task.atoms[p])) > 0) {
          failure = "(not " + task.atoms[p] + ")";
          break;
        }
      }
    }

    if (!failure.empty()) {
      joint.faulted = true;
      joint.fault_reason = "precondition " + failure + " does not hold";
    } else {
      for (uint32_t a : action.del) next.facts.erase(parse_ground_literal_text(task.atoms[a]));
      for (uint32_t a : action.add) next.facts.insert(parse_ground_literal_text(task.atoms[a]));
      refresh_occupancy(next);
    }
  }

  if (out_action != nullptr) *out_action = joint;
  return next;
}

Trace run(const SceneGraph& initial, const Plan& plan, const GroundedTask& task,
          const DomainSpec& domain, const std::vector<Agenda>& agendas) {
  std::set<std::string> scripted;
  for (const auto& agenda : agendas) {
    if (!scripted.insert(agenda.human_id).second) {
      throw SchemaError("two agendas script the same human '" + agenda.human_id + "'");
    }
  }

  Trace trace;
  trace.robot_id = get_robot_node(initial).id;
  trace.initial = initial_world(initial, domain);
  for (const auto& agenda : agendas) {
    const std::string upcoming = next_scripted_target(agenda, 0);
    if (!upcoming.empty()) trace.initial.next_targets[agenda.human_id] = upcoming;
  }

  std::vector<PlanStep> robot_steps;
  for (const auto& s : plan.steps) {
    if (s.agent == trace.robot_id) robot_steps.push_back(s);
  }
  int horizon = static_cast<int>(robot_steps.size());
  for (const auto& agenda : agendas) {
    for (const auto& e : agenda.script) horizon = std::max(horizon, e.timestep);
  }

  WorldState world = trace.initial;
  for (int t = 1; t <= horizon; ++t) {
    std::optional<PlanStep> robot_step;
    if (static_cast<size_t>(t - 1) < robot_steps.size()) robot_step = robot_steps[t - 1];
    JointAction joint;
    world = step(world, task, robot_step, agendas, &joint);
    trace.entries.push_back({std::move(joint), world});
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Metrics

DisturbanceReport disturbance_metrics(const Trace& trace) {
  DisturbanceReport report;
  for (const auto& entry : trace.entries) {
    const WorldState& w = entry.state;
    const std::string robot_room = w.agent_room(trace.robot_id);

    bool co_occupied = false;
    for (const auto& [human, _] : w.actives) {
      if (!robot_room.empty() && w.agent_room(human) == robot_room) {
        co_occupied = true;
        break;
      }
    }
    if (co_occupied) ++report.co_occupancy_steps;

    std::set<std::string> robot_items = w.held_by(trace.robot_id);
    if (entry.action.robot_step && !entry.action.faulted) {
      for (const auto& arg : entry.action.robot_step->args) robot_items.insert(arg);
    }
    bool conflicted = false;
    for (const auto& [human, active] : w.actives) {
      if (!active.target.empty() && robot_items.count(active.target) > 0) conflicted = true;
    }
    for (const auto& [human, target] : w.next_targets) {
      if (robot_items.count(target) > 0) conflicted = true;
    }
    if (conflicted) ++report.item_conflicts;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Snapshot generation

SnapshotSequence generate_snapshots(const Trace& trace, const SceneGraph& initial) {
  if (trace.entries.empty()) throw EmptyTrace("cannot generate snapshots from an empty trace");

  SnapshotSequence seq;
  for (size_t i = 0; i < trace.entries.size(); ++i) {
    const TraceEntry& entry = trace.entries[i];
    const WorldState& w = entry.state;
    SceneGraph sg;
    sg.graph_id = initial.graph_id;
    sg.timestep = static_cast<int>(i) + 1;
    sg.floors = initial.floors;
    sg.rooms = initial.rooms;

    for (const auto& [id, item] : initial.items) {
      ItemNode node = item;
      std::string room = w.item_room(id);
      if (room.empty()) {
        const std::string holder = w.holder_of(id);
        if (!holder.empty()) room = w.agent_room(holder);
      }
      if (!room.empty()) node.parent_room = room;
      sg.items[id] = std::move(node);
    }

    for (const auto& [id, agent] : initial.agents) {
      AgentNode node = agent;
      const std::string room = w.agent_room(id);
      if (!room.empty()) node.parent_room = room;
      node.holding = w.held_by(id);
      node.current_action.reset();
      if (agent.kind == AgentKind::human) {
        auto active = w.actives.find(id);
        if (active != w.actives.end()) node.current_action = active->second.activity;
      } else if (entry.action.robot_step && !entry.action.faulted) {
        node.current_action = entry.action.robot_step->schema_name;
      }
      sg.agents[id] = std::move(node);
    }

    for (const auto& [human, active] : w.actives) {
      if (active.target.empty()) continue;
      sg.edges.insert({human, active.target, active.activity, sg.timestep});
    }

    seq.snapshots.push_back(std::move(sg));
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

Json world_to_json(const WorldState& w) {
  Json facts = Json::array();
  for (const auto& f : w.facts) facts.push_back(f.text());
  Json actives = Json::object();
  for (const auto& [human, a] : w.actives) {
    actives[human] = {{"activity", a.activity}, {"target", a.target}};
  }
  Json next_targets = Json::object();
  for (const auto& [human, target] : w.next_targets) next_targets[human] = target;
  return {{"t", w.timestep},
          {"facts", std::move(facts)},
          {"actives", std::move(actives)},
          {"next_targets", std::move(next_targets)}};
}

}  // namespace

std::string trace_to_jsonl(const Trace& trace) {
  std::string out;
  Json head = {{"robot", trace.robot_id}, {"state", world_to_json(trace.initial)}};
  out += head.dump() + "\n";
  for (const auto& entry : trace.entries) {
    Json action;
    if (entry.action.robot_step) {
      action["robot"] = {{"agent", entry.action.robot_step->agent},
                         {"action", entry.action.robot_step->schema_name},
                         {"args", entry.action.robot_step->args}};
    }
    action["faulted"] = entry.action.faulted;
    if (entry.action.faulted) action["fault_reason"] = entry.action.fault_reason;
    Json activities = Json::object();
    for (const auto& [human, a] : entry.action.activities) {
      activities[human] = {{"activity", a.activity}, {"target", a.target}};
    }
    action["activities"] = std::move(activities);
    Json line = {{"action", std::move(action)}, {"state", world_to_json(entry.state)}};
    out += line.dump() + "\n";
  }
  return out;
}

namespace {

WorldState world_from_json(const Json& doc, const std::string& ctx) {
  check_keys(doc, ctx, {"t", "facts", "actives", "next_targets"}, {});
  WorldState w;
  w.timestep = get_int(doc, "t", ctx);
  for (const auto& fact : get_array(doc, "facts", ctx)) {
    if (!fact.is_string()) throw SchemaError(ctx + ": facts must be strings");
    w.facts.insert(parse_ground_literal_text(fact.get<std::string>()));
  }
  require_object(doc["actives"], ctx + " actives");
  for (const auto& [human, active] : doc["actives"].items()) {
    check_keys(active, ctx + " actives entry", {"activity", "target"}, {});
    w.actives[human] = {get_string(active, "activity", ctx), get_string(active, "target", ctx)};
  }
  require_object(doc["next_targets"], ctx + " next_targets");
  for (const auto& [human, target] : doc["next_targets"].items()) {
    if (!target.is_string()) throw SchemaError(ctx + ": next_targets must be strings");
    w.next_targets[human] = target.get<std::string>();
  }
  return w;
}

}  // namespace

Trace trace_from_jsonl(const std::string& text) {
  Trace trace;
  bool saw_head = false;
  size_t line_no = 0;
  std::string line;
  for (size_t pos = 0; pos <= text.size(); ++pos) {
    if (pos < text.size() && text[pos] != '\n') {
      line += text[pos];
      continue;
    }
    const std::string record = std::exchange(line, {});
    if (record.empty()) continue;
    ++line_no;
    const std::string ctx = "trace line " + std::to_string(line_no);
    const Json doc = parse_json_text(record, ctx);

    if (!saw_head) {
      check_keys(doc, ctx, {"robot", "state"}, {});
      trace.robot_id = get_string(doc, "robot", ctx);
      trace.initial = world_from_json(doc["state"], ctx);
      saw_head = true;
      continue;
    }

    check_keys(doc, ctx, {"action", "state"}, {});
    TraceEntry entry;
    const Json& action = doc["action"];
    check_keys(action, ctx + " action", {"faulted", "activities"}, {"robot", "fault_reason"});
    if (action.contains("robot")) {
      const Json& robot = action["robot"];
      check_keys(robot, ctx + " robot", {"agent", "action", "args"}, {});
      PlanStep step;
      step.index = trace.entries.size();
      step.agent = get_string(robot, "agent", ctx);
      step.schema_name = get_string(robot, "action", ctx);
      for (const auto& arg : get_array(robot, "args", ctx)) {
        if (!arg.is_string()) throw SchemaError(ctx + ": step args must be strings");
        step.args.push_back(arg.get<std::string>());
      }
      entry.action.robot_step = std::move(step);
    }
    entry.action.faulted = action["faulted"].is_boolean() && action["faulted"].get<bool>();
    if (action.contains("fault_reason")) {
      entry.action.fault_reason = get_string(action, "fault_reason", ctx);
    }
    require_object(action["activities"], ctx + " activities");
    for (const auto& [human, active] : action["activities"].items()) {
      entry.action.activities[human] = {get_string(active, "activity", ctx),
                                        get_string(active, "target", ctx)};
    }
    entry.state = world_from_json(doc["state"], ctx);
    trace.entries.push_back(std::move(entry));
  }
  if (!saw_head) throw SchemaError("trace document has no header record");
  return trace;
}

Json disturbance_to_json(const DisturbanceReport& report) {
  return {{"co_occupancy_steps", report.co_occupancy_steps},
          {"item_conflicts", report.item_conflicts}};
}

}  // namespace awareplan
