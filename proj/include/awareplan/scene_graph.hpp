#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace awareplan {

// Layered household scene graph: floors contain rooms, rooms contain items
// and agents, edges carry semantic relations between nodes of one snapshot.
// Graphs are immutable after load and safe to share across readers.

struct FloorNode {
  std::string id;
  auto operator<=>(const FloorNode&) const = default;
};

struct RoomNode {
  std::string id;
  std::string parent_floor;
  std::set<std::string> neighbors;
  auto operator<=>(const RoomNode&) const = default;
};

struct ItemNode {
  std::string id;
  std::string parent_room;
  std::string category;
  bool accessible = true;
  std::map<std::string, std::string> states;
  std::vector<std::string> affordable_actions;
  auto operator<=>(const ItemNode&) const = default;
};

enum class AgentKind { robot, human };

struct AgentNode {
  std::string id;
  AgentKind kind = AgentKind::human;
  std::string parent_room;
  std::optional<std::string> current_action;
  std::set<std::string> holding;
  auto operator<=>(const AgentNode&) const = default;
};

struct SemanticEdge {
  std::string source;
  std::string target;
  std::string relation;
  int timestep = 0;
  auto operator<=>(const SemanticEdge&) const = default;
};

struct SceneGraph {
  std::string graph_id;
  int timestep = 0;
  std::map<std::string, FloorNode> floors;
  std::map<std::string, RoomNode> rooms;
  std::map<std::string, ItemNode> items;
  std::map<std::string, AgentNode> agents;
  std::set<SemanticEdge> edges;

  bool operator==(const SceneGraph&) const = default;

  const RoomNode* find_room(const std::string& id) const;
  const ItemNode* find_item(const std::string& id) const;
  const AgentNode* find_agent(const std::string& id) const;
  bool has_node(const std::string& id) const;
};

struct SnapshotSequence {
  std::vector<SceneGraph> snapshots;  // timesteps 1..n

  bool operator==(const SnapshotSequence&) const = default;
  const SceneGraph& latest() const;
};

// Per-human union of observed semantic edges and interacted items, ordered
// by timestep.
struct InteractionHistory {
  std::string human_id;
  std::vector<std::pair<int, SemanticEdge>> edge_events;
  std::vector<std::pair<int, std::string>> item_events;

  bool empty() const { return edge_events.empty() && item_events.empty(); }
  int last_timestep() const;
};

// Loading. Documents are UTF-8 JSON per the schema in docs/formats.md;
// unknown keys are rejected. Throws SchemaError on malformed documents,
// HierarchyError on structural violations, MissingRobot when no kind=robot
// agent exists.
SceneGraph load_scene_graph(const std::string& json_text);
SceneGraph load_scene_graph_file(const std::string& path);

// A sequence document is a JSON array of snapshot documents; a single
// snapshot object is accepted as a one-element sequence.
SnapshotSequence load_snapshot_sequence(const std::string& json_text);
SnapshotSequence load_snapshot_sequence_file(const std::string& path);

// Canonical serialization; load_scene_graph(serialize_scene_graph(g)) == g.
std::string serialize_scene_graph(const SceneGraph& sg);
std::string serialize_snapshot_sequence(const SnapshotSequence& seq);

// Total check of every SceneGraph invariant; empty means valid. Each entry
// names the violated rule and the offending ids.
std::vector<std::string> validate_hierarchy(const SceneGraph& sg);
std::vector<std::string> validate_sequence(const SnapshotSequence& seq);

const AgentNode& get_robot_node(const SceneGraph& sg);

// All edges incident to the given human at this snapshot, plus the item
// endpoints of those edges.
std::pair<std::set<SemanticEdge>, std::set<std::string>> get_edges_and_neighbors(
    const SceneGraph& snapshot, const std::string& human_id);

InteractionHistory build_history(const SnapshotSequence& seq, const std::string& human_id);

}  // namespace awareplan
