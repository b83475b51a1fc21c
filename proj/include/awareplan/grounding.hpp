#pragma once

#include <map>
#include <string>
#include <vector>

#include "awareplan/knowledge_base.hpp"
#include "awareplan/pddl.hpp"
#include "awareplan/predictor.hpp"
#include "awareplan/scene_graph.hpp"

namespace awareplan {

// Builds the multi-agent planning specification from scene graph, knowledge
// and predictions.
//
// Init-state mapping:
//   rooms  -> objects plus symmetric (connected a b) pairs
//   items  -> object, (at item room), (accessible item) iff accessible,
//             one "<key>-<value>" literal per state entry (must be declared)
//   agents -> object, (at-agent a room), (holding a i) per held item, and a
//             (robot a) / (human a) marker when those predicates exist
//   edges  -> (relation source target) for every planning-frame edge whose
//             relation names a declared binary predicate with matching
//             endpoint types; other relations are reported as unmapped
//   a human with a non-idle current_action contributes
//   (human-active-in room) when that predicate is declared.
// Closed world: absent literals are false; init holds no negative literals.

// Adds an agent object with its location, holdings and kind marker.
void add_agent(ProblemSpec& problem, const AgentNode& agent, const DomainSpec& domain);

// Adds every room as an object plus the symmetric connected literals.
void add_room_objects(ProblemSpec& problem, const SceneGraph& frame, const DomainSpec& domain);

// Adds one item object and its init literals. Rooms must already be objects.
void set_init_state(ProblemSpec& problem, const ItemNode& item, const DomainSpec& domain);

// Adds the planning-frame activity facts (edge relations, occupancy).
// Returns the edges whose relation could not be mapped.
std::vector<std::string> add_activity_facts(ProblemSpec& problem, const SceneGraph& frame,
                                            const DomainSpec& domain);

// Replaces the goal partition for one human (re-prediction semantics).
void add_goal(ProblemSpec& problem, const std::string& human_id, const GoalCandidate& goal,
              const DomainSpec& domain);

// Sets the robot's own task goal as the robot partition.
void set_robot_goal(ProblemSpec& problem, const std::string& robot_id,
                    const std::vector<GroundLiteral>& goal, const DomainSpec& domain);

struct TransformOptions {
  std::string domain_name = "household";
  std::string problem_name = "task";
  std::vector<GroundLiteral> robot_goal;
};

struct HumanReport {
  std::string human_id;
  GoalDistribution distribution;
  GoalCandidate selected;
  SynthesisResult synthesis;
};

struct TransformReport {
  // Pipeline stage last entered; on failure this names where it stopped.
  std::string stage_reached;
  std::vector<std::string> unmapped_edges;
  std::vector<HumanReport> humans;  // in human-id order
};

struct TransformResult {
  DomainSpec domain;
  ProblemSpec problem;
  TransformReport report;
};

// Full pipeline: extract domain elements, add the robot and its goal, map
// room/item/activity init facts from the latest snapshot, then per human
// (in id order) add the agent, build its history, predict, synthesize
// missing elements when a candidate is uncovered, and add the argmax goal.
// Errors from constituent operations propagate; when `out_report` is given
// it is filled as stages complete, so it names the stage reached on failure.
TransformResult transform(const KnowledgeBase& kb, const SnapshotSequence& seq,
                          Extractor& extractor, PredictorBackend& predictor,
                          SynthesisBackend& synthesis, const TransformOptions& options,
                          TransformReport* out_report = nullptr);

// The robot-goal task file: JSON {"goal": ["(pred args)", ...]}.
std::vector<GroundLiteral> load_task(const std::string& json_text);
std::vector<GroundLiteral> load_task_file(const std::string& path);

Json report_to_json(const TransformReport& report);

}  // namespace awareplan
