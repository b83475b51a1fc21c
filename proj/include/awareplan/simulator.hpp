#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "awareplan/json_util.hpp"
#include "awareplan/pddl.hpp"
#include "awareplan/planner.hpp"
#include "awareplan/scene_graph.hpp"

namespace awareplan {

// Discrete-step household world. Humans follow their scripted agendas
// open-loop; the robot executes plan steps checked against the world's
// preconditions, recording a fault (and acting as a no-op) when they do not
// hold. One robot action per step; scripted activities span steps via
// repeated entries. Deterministic given (initial, plan, agendas).

struct AgendaEntry {
  int timestep = 0;
  std::string activity;  // "idle" or an activity label like "using"
  std::string target;    // item id; empty for idle

  bool operator==(const AgendaEntry&) const = default;
};

struct Agenda {
  std::string human_id;
  std::vector<AgendaEntry> script;  // timesteps strictly increasing
};

Agenda load_agenda(const std::string& json_text);
Agenda load_agenda_file(const std::string& path);
std::vector<std::string> validate_agenda(const Agenda& agenda, const SceneGraph& world);

struct ActiveActivity {
  std::string activity;
  std::string target;

  bool operator==(const ActiveActivity&) const = default;
};

struct WorldState {
  int timestep = 0;
  std::set<GroundLiteral> facts;
  std::map<std::string, ActiveActivity> actives;      // human -> non-idle activity
  std::map<std::string, std::string> next_targets;    // human -> next scripted target

  bool operator==(const WorldState&) const = default;

  std::string agent_room(const std::string& agent) const;
  std::string item_room(const std::string& item) const;  // empty when held
  std::string holder_of(const std::string& item) const;
  std::set<std::string> held_by(const std::string& agent) const;
};

struct JointAction {
  std::optional<PlanStep> robot_step;
  bool faulted = false;
  std::string fault_reason;
  std::map<std::string, ActiveActivity> activities;  // humans active this step

  bool operator==(const JointAction&) const = default;
};

struct TraceEntry {
  JointAction action;
  WorldState state;  // state after the joint action

  bool operator==(const TraceEntry&) const = default;
};

struct Trace {
  std::string robot_id;
  WorldState initial;
  std::vector<TraceEntry> entries;

  size_t fault_count() const;
};

// World built from the scene graph with the same init mapping grounding
// uses, plus ongoing activities read from current_action and edges.
WorldState initial_world(const SceneGraph& scene, const DomainSpec& domain);

// One world step: scripted human activities for the new timestep are
// applied first, then the robot action is checked and applied; both land in
// the same timestep transition.
WorldState step(const WorldState& world, const GroundedTask& task,
                const std::optional<PlanStep>& robot_step, const std::vector<Agenda>& agendas,
                JointAction* out_action = nullptr);

// Executes the plan's robot steps against the scripted humans until both
// the plan and every agenda are exhausted. Faults are recorded, never
// thrown.
Trace run(const SceneGraph& initial, const Plan& plan, const GroundedTask& task,
          const DomainSpec& domain, const std::vector<Agenda>& agendas);

struct DisturbanceReport {
  long co_occupancy_steps = 0;  // steps where the robot shares a room with an active human
  long item_conflicts = 0;      // steps where the robot holds/uses an item a human needs

  bool operator==(const DisturbanceReport&) const = default;
};

DisturbanceReport disturbance_metrics(const Trace& trace);

// One scene graph per trace step, timesteps renumbered 1..n, with semantic
// edges materialized from human activities (human -> target, labeled by the
// activity). Throws EmptyTrace on an empty trace.
SnapshotSequence generate_snapshots(const Trace& trace, const SceneGraph& initial);

std::string trace_to_jsonl(const Trace& trace);
Trace trace_from_jsonl(const std::string& text);
Json disturbance_to_json(const DisturbanceReport& report);

}  // namespace awareplan
