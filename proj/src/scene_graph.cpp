#include "awareplan/scene_graph.hpp"

#include <algorithm>

#include "awareplan/domain_model.hpp"
#include "awareplan/errors.hpp"
#include "awareplan/json_util.hpp"

namespace awareplan {

const RoomNode* SceneGraph::find_room(const std::string& id) const {
  auto it = rooms.find(id);
  return it == rooms.end() ? nullptr : &it->second;
}

const ItemNode* SceneGraph::find_item(const std::string& id) const {
  auto it = items.find(id);
  return it == items.end() ? nullptr : &it->second;
}

const AgentNode* SceneGraph::find_agent(const std::string& id) const {
  auto it = agents.find(id);
  return it == agents.end() ? nullptr : &it->second;
}

bool SceneGraph::has_node(const std::string& id) const {
  return floors.count(id) || rooms.count(id) || items.count(id) || agents.count(id);
}

const SceneGraph& SnapshotSequence::latest() const {
  if (snapshots.empty()) throw EmptySequence("snapshot sequence is empty");
  return snapshots.back();
}

int InteractionHistory::last_timestep() const {
  int last = 0;
  for (const auto& [t, _] : edge_events) last = std::max(last, t);
  for (const auto& [t, _] : item_events) last = std::max(last, t);
  return last;
}

// ---------------------------------------------------------------------------
// Loading

namespace {

std::string checked_id(const Json& obj, const std::string& key, const std::string& ctx) {
  std::string id = get_string(obj, key, ctx);
  if (!valid_identifier(id)) {
    throw SchemaError(ctx + ": identifier '" + id + "' must match [a-z][a-z0-9_-]*");
  }
  return id;
}

SceneGraph scene_from_json(const Json& doc, const std::string& ctx) {
  check_keys(doc, ctx, {"graph_id", "timestep", "floors", "rooms", "items", "agents", "edges"},
             {});

  SceneGraph sg;
  sg.graph_id = checked_id(doc, "graph_id", ctx);
  sg.timestep = get_int(doc, "timestep", ctx);
  if (sg.timestep < 0) throw SchemaError(ctx + ": 'timestep' must be non-negative");

  auto insert_unique = [&](const std::string& id, auto& map, auto node, const char* layer) {
    if (sg.has_node(id)) {
      throw HierarchyError(ctx + ": duplicate node id '" + id + "' (" + layer + ")");
    }
    map.emplace(id, std::move(node));
  };

  for (const auto& f : get_array(doc, "floors", ctx)) {
    const std::string fctx = ctx + " floors[]";
    check_keys(f, fctx, {"id"}, {});
    std::string id = checked_id(f, "id", fctx);
    insert_unique(id, sg.floors, FloorNode{id}, "floor");
  }

  for (const auto& r : get_array(doc, "rooms", ctx)) {
    const std::string rctx = ctx + " rooms[]";
    check_keys(r, rctx, {"id", "parent_floor", "neighbors"}, {});
    RoomNode room;
    room.id = checked_id(r, "id", rctx);
    room.parent_floor = checked_id(r, "parent_floor", rctx);
    for (const auto& n : get_array(r, "neighbors", rctx)) {
      if (!n.is_string()) throw SchemaError(rctx + ": neighbors entries must be strings");
      room.neighbors.insert(n.get<std::string>());
    }
    std::string id = room.id;
    insert_unique(id, sg.rooms, std::move(room), "room");
  }

  for (const auto& i : get_array(doc, "items", ctx)) {
    const std::string ictx = ctx + " items[]";
    check_keys(i, ictx, {"id", "parent_room", "category"},
               {"accessible", "states", "affordable_actions"});
    ItemNode item;
    item.id = checked_id(i, "id", ictx);
    item.parent_room = get_string(i, "parent_room", ictx);
    item.category = get_string(i, "category", ictx);
    item.accessible = get_bool(i, "accessible", ictx, true);
    if (i.contains("states")) {
      require_object(i["states"], ictx + " states");
      for (const auto& [k, v] : i["states"].items()) {
        if (!v.is_string()) throw SchemaError(ictx + ": state values must be strings");
        item.states[k] = v.get<std::string>();
      }
    }
    if (i.contains("affordable_actions")) {
      for (const auto& a : get_array(i, "affordable_actions", ictx)) {
        if (!a.is_string()) throw SchemaError(ictx + ": affordable_actions must be strings");
        item.affordable_actions.push_back(a.get<std::string>());
      }
    }
    std::string id = item.id;
    insert_unique(id, sg.items, std::move(item), "item");
  }

  for (const auto& a : get_array(doc, "agents", ctx)) {
    const std::string actx = ctx + " agents[]";
    check_keys(a, actx, {"id", "kind", "parent_room"}, {"current_action", "holding"});
    AgentNode agent;
    agent.id = checked_id(a, "id", actx);
    const std::string kind = get_string(a, "kind", actx);
    if (kind == "robot") {
      agent.kind = AgentKind::robot;
    } else if (kind == "human") {
      agent.kind = AgentKind::human;
    } else {
      throw SchemaError(actx + ": kind must be 'robot' or 'human', got '" + kind + "'");
    }
    agent.parent_room = get_string(a, "parent_room", actx);
    if (a.contains("current_action")) {
      if (!a["current_action"].is_string()) {
        throw SchemaError(actx + ": 'current_action' must be a string");
      }
      agent.current_action = a["current_action"].get<std::string>();
    }
    if (a.contains("holding")) {
      for (const auto& h : get_array(a, "holding", actx)) {
        if (!h.is_string()) throw SchemaError(actx + ": holding entries must be strings");
        agent.holding.insert(h.get<std::string>());
      }
    }
    std::string id = agent.id;
    insert_unique(id, sg.agents, std::move(agent), "agent");
  }

  for (const auto& e : get_array(doc, "edges", ctx)) {
    const std::string ectx = ctx + " edges[]";
    check_keys(e, ectx, {"source", "target", "relation"}, {});
    SemanticEdge edge;
    edge.source = get_string(e, "source", ectx);
    edge.target = get_string(e, "target", ectx);
    edge.relation = get_string(e, "relation", ectx);
    if (edge.relation.empty()) throw SchemaError(ectx + ": relation must be non-empty");
    edge.timestep = sg.timestep;
    sg.edges.insert(std::move(edge));
  }

  return sg;
}

void throw_on_violations(const std::vector<std::string>& violations, const std::string& ctx) {
  if (violations.empty()) return;
  std::string joined;
  bool only_missing_robot = true;
  for (const auto& v : violations) {
    if (!joined.empty()) joined += "; ";
    joined += v;
    if (v.find("no robot agent") == std::string::npos) only_missing_robot = false;
  }
  if (only_missing_robot) throw MissingRobot(ctx + ": " + joined);
  throw HierarchyError(ctx + ": " + joined);
}

}  // namespace

SceneGraph load_scene_graph(const std::string& json_text) {
  Json doc = parse_json_text(json_text, "scene graph");
  SceneGraph sg = scene_from_json(doc, "scene graph");
  throw_on_violations(validate_hierarchy(sg), "scene graph '" + sg.graph_id + "'");
  return sg;
}

SceneGraph load_scene_graph_file(const std::string& path) {
  Json doc = parse_json_file(path);
  SceneGraph sg = scene_from_json(doc, path);
  throw_on_violations(validate_hierarchy(sg), path);
  return sg;
}

namespace {

SnapshotSequence sequence_from_json(const Json& doc, const std::string& ctx) {
  SnapshotSequence seq;
  if (doc.is_object()) {
    seq.snapshots.push_back(scene_from_json(doc, ctx));
  } else if (doc.is_array()) {
    int index = 1;
    for (const auto& entry : doc) {
      seq.snapshots.push_back(
          scene_from_json(entry, ctx + " snapshot " + std::to_string(index)));
      ++index;
    }
  } else {
    throw SchemaError(ctx + ": expected a snapshot object or an array of snapshots");
  }
  throw_on_violations(validate_sequence(seq), ctx);
  return seq;
}

}  // namespace

SnapshotSequence load_snapshot_sequence(const std::string& json_text) {
  return sequence_from_json(parse_json_text(json_text, "snapshot sequence"), "snapshot sequence");
}

SnapshotSequence load_snapshot_sequence_file(const std::string& path) {
  return sequence_from_json(parse_json_file(path), path);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

Json scene_to_json(const SceneGraph& sg) {
  Json doc;
  doc["graph_id"] = sg.graph_id;
  doc["timestep"] = sg.timestep;
  doc["floors"] = Json::array();
  for (const auto& [id, _] : sg.floors) doc["floors"].push_back({{"id", id}});
  doc["rooms"] = Json::array();
  for (const auto& [id, r] : sg.rooms) {
    doc["rooms"].push_back(
        {{"id", id}, {"parent_floor", r.parent_floor}, {"neighbors", r.neighbors}});
  }
  doc["items"] = Json::array();
  for (const auto& [id, i] : sg.items) {
    doc["items"].push_back({{"id", id},
                            {"parent_room", i.parent_room},
                            {"category", i.category},
                            {"accessible", i.accessible},
                            {"states", i.states},
                            {"affordable_actions", i.affordable_actions}});
  }
  doc["agents"] = Json::array();
  for (const auto& [id, a] : sg.agents) {
    Json agent = {{"id", id},
                  {"kind", a.kind == AgentKind::robot ? "robot" : "human"},
                  {"parent_room", a.parent_room},
                  {"holding", a.holding}};
    if (a.current_action) agent["current_action"] = *a.current_action;
    doc["agents"].push_back(std::move(agent));
  }
  doc["edges"] = Json::array();
  for (const auto& e : sg.edges) {
    doc["edges"].push_back(
        {{"source", e.source}, {"target", e.target}, {"relation", e.relation}});
  }
  return doc;
}

}  // namespace

std::string serialize_scene_graph(const SceneGraph& sg) { return scene_to_json(sg).dump(2) + "\n"; }

std::string serialize_snapshot_sequence(const SnapshotSequence& seq) {
  Json arr = Json::array();
  for (const auto& sg : seq.snapshots) arr.push_back(scene_to_json(sg));
  return arr.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Validation

std::vector<std::string> validate_hierarchy(const SceneGraph& sg) {
  std::vector<std::string> out;

  // Unique ids across layers. Same-layer duplicates cannot be represented
  // (map keyed by id) and are rejected at load time.
  std::map<std::string, int> id_count;
  for (const auto& [id, _] : sg.floors) ++id_count[id];
  for (const auto& [id, _] : sg.rooms) ++id_count[id];
  for (const auto& [id, _] : sg.items) ++id_count[id];
  for (const auto& [id, _] : sg.agents) ++id_count[id];
  for (const auto& [id, n] : id_count) {
    if (n > 1) out.push_back("duplicate node id across layers: " + id);
  }

  for (const auto& [id, room] : sg.rooms) {
    if (sg.floors.count(room.parent_floor) == 0) {
      out.push_back("room '" + id + "' references missing floor '" + room.parent_floor + "'");
    }
    for (const auto& nb : room.neighbors) {
      if (nb == id) {
        out.push_back("room '" + id + "' lists itself as neighbor");
        continue;
      }
      auto other = sg.rooms.find(nb);
      if (other == sg.rooms.end()) {
        out.push_back("room '" + id + "' references missing neighbor '" + nb + "'");
      } else if (other->second.neighbors.count(id) == 0) {
        out.push_back("asymmetric neighbors: " + id + ", " + nb);
      }
    }
  }

  for (const auto& [id, item] : sg.items) {
    if (sg.rooms.count(item.parent_room) == 0) {
      out.push_back("item '" + id + "' references missing room '" + item.parent_room + "'");
    }
  }

  int robots = 0;
  for (const auto& [id, agent] : sg.agents) {
    if (sg.rooms.count(agent.parent_room) == 0) {
      out.push_back("agent '" + id + "' references missing room '" + agent.parent_room + "'");
    }
    if (agent.kind == AgentKind::robot) ++robots;
    for (const auto& held : agent.holding) {
      auto item = sg.items.find(held);
      if (item == sg.items.end()) {
        out.push_back("agent '" + id + "' holds missing item '" + held + "'");
      } else if (item->second.parent_room != agent.parent_room) {
        out.push_back("agent '" + id + "' holds item '" + held + "' located in '" +
                      item->second.parent_room + "', agent is in '" + agent.parent_room + "'");
      }
    }
  }
  if (robots == 0) out.push_back("no robot agent");
  if (robots > 1) out.push_back("multiple robot agents (" + std::to_string(robots) + ")");

  for (const auto& e : sg.edges) {
    if (!sg.has_node(e.source)) out.push_back("edge source '" + e.source + "' is not a node");
    if (!sg.has_node(e.target)) out.push_back("edge target '" + e.target + "' is not a node");
    if (e.relation.empty()) out.push_back("edge " + e.source + "->" + e.target + " has empty relation");
    if (e.timestep != sg.timestep) {
      out.push_back("edge " + e.source + "->" + e.target + " timestep " +
                    std::to_string(e.timestep) + " != snapshot timestep " +
                    std::to_string(sg.timestep));
    }
  }

  return out;
}

std::vector<std::string> validate_sequence(const SnapshotSequence& seq) {
  std::vector<std::string> out;
  if (seq.snapshots.empty()) {
    out.push_back("sequence has no snapshots");
    return out;
  }

  auto ids_of = [](const SceneGraph& sg) {
    std::set<std::string> ids;
    for (const auto& [id, _] : sg.floors) ids.insert(id);
    for (const auto& [id, _] : sg.rooms) ids.insert(id);
    for (const auto& [id, _] : sg.items) ids.insert(id);
    for (const auto& [id, _] : sg.agents) ids.insert(id);
    return ids;
  };

  const auto first_ids = ids_of(seq.snapshots.front());
  std::string robot_id;
  for (size_t i = 0; i < seq.snapshots.size(); ++i) {
    const SceneGraph& sg = seq.snapshots[i];
    const int expected = static_cast<int>(i) + 1;
    if (sg.timestep != expected) {
      out.push_back("snapshot " + std::to_string(i + 1) + " has timestep " +
                    std::to_string(sg.timestep) + ", expected " + std::to_string(expected));
    }
    for (auto& v : validate_hierarchy(sg)) {
      out.push_back("snapshot " + std::to_string(i + 1) + ": " + v);
    }
    if (ids_of(sg) != first_ids) {
      out.push_back("snapshot " + std::to_string(i + 1) +
                    " has a different node id set than snapshot 1");
    }
    for (const auto& [id, agent] : sg.agents) {
      if (agent.kind != AgentKind::robot) continue;
      if (robot_id.empty()) {
        robot_id = id;
      } else if (robot_id != id) {
        out.push_back("robot id changes from '" + robot_id + "' to '" + id + "' at snapshot " +
                      std::to_string(i + 1));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Queries

const AgentNode& get_robot_node(const SceneGraph& sg) {
  const AgentNode* robot = nullptr;
  for (const auto& [_, agent] : sg.agents) {
    if (agent.kind == AgentKind::robot) {
      if (robot != nullptr) throw HierarchyError("multiple robot agents in '" + sg.graph_id + "'");
      robot = &agent;
    }
  }
  if (robot == nullptr) throw MissingRobot("no robot agent in '" + sg.graph_id + "'");
  return *robot;
}

std::pair<std::set<SemanticEdge>, std::set<std::string>> get_edges_and_neighbors(
    const SceneGraph& snapshot, const std::string& human_id) {
  const AgentNode* agent = snapshot.find_agent(human_id);
  if (agent == nullptr || agent->kind != AgentKind::human) {
    throw UnknownAgent("'" + human_id + "' is not a human agent in '" + snapshot.graph_id + "'");
  }

  std::set<SemanticEdge> edges;
  std::set<std::string> items;
  for (const auto& e : snapshot.edges) {
    if (e.source != human_id && e.target != human_id) continue;
    edges.insert(e);
    const std::string& other = e.source == human_id ? e.target : e.source;
    if (snapshot.items.count(other) > 0) items.insert(other);
  }
  return {std::move(edges), std::move(items)};
}

InteractionHistory build_history(const SnapshotSequence& seq, const std::string& human_id) {
  if (seq.snapshots.empty()) throw EmptySequence("cannot build history from an empty sequence");

  InteractionHistory history;
  history.human_id = human_id;
  for (const auto& snapshot : seq.snapshots) {
    auto [edges, items] = get_edges_and_neighbors(snapshot, human_id);
    for (const auto& e : edges) history.edge_events.emplace_back(snapshot.timestep, e);
    for (const auto& i : items) history.item_events.emplace_back(snapshot.timestep, i);
  }
  return history;
}

}  // namespace awareplan
