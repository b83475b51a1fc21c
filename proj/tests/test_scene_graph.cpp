#include <doctest.h>

#include "awareplan/errors.hpp"
#include "awareplan/json_util.hpp"
#include "awareplan/scene_graph.hpp"
#include "test_support.hpp"

using namespace awareplan;
using testsupport::Rng;

namespace {

const char* kMinimalScene = R"({
  "graph_id": "minimal",
  "timestep": 1,
  "floors": [{"id": "f1"}],
  "rooms": [{"id": "kitchen", "parent_floor": "f1", "neighbors": []}],
  "items": [],
  "agents": [{"id": "r1", "kind": "robot", "parent_room": "kitchen", "holding": []}],
  "edges": []
})";

Json minimal_json() { return Json::parse(kMinimalScene); }

}  // namespace

TEST_CASE("load_scene_graph accepts the smallest valid graph") {
  const SceneGraph sg = load_scene_graph(kMinimalScene);
  CHECK(sg.graph_id == "minimal");
  CHECK(sg.items.empty());
  CHECK(sg.edges.empty());
  CHECK(sg.floors.size() == 1);
  CHECK(sg.rooms.size() == 1);
  CHECK(get_robot_node(sg).id == "r1");
}

TEST_CASE("load_scene_graph accepts the layered allensville fixture") {
  const auto seq = load_snapshot_sequence_file(testsupport::fixture_path("allensville.seq.json"));
  REQUIRE(seq.snapshots.size() == 3);
  const SceneGraph& sg = seq.latest();
  CHECK(sg.floors.size() == 1);
  CHECK(sg.rooms.size() == 6);
  CHECK(sg.items.size() == 12);
  CHECK(sg.agents.size() == 3);
  CHECK(validate_hierarchy(sg).empty());
  CHECK(validate_sequence(seq).empty());
  // Items hang below rooms, rooms below the floor.
  for (const auto& [_, item] : sg.items) CHECK(sg.rooms.count(item.parent_room) == 1);
  for (const auto& [_, room] : sg.rooms) CHECK(sg.floors.count(room.parent_floor) == 1);
}

TEST_CASE("load_scene_graph rejects a dangling parent floor, naming the id") {
  Json doc = minimal_json();
  doc["rooms"][0]["parent_floor"] = "basement";
  CHECK_THROWS_WITH_AS(load_scene_graph(doc.dump()),
                       doctest::Contains("kitchen"), HierarchyError);
}

TEST_CASE("load_scene_graph rejects malformed documents") {
  CHECK_THROWS_AS(load_scene_graph("not json"), SchemaError);
  CHECK_THROWS_AS(load_scene_graph("[1,2]"), SchemaError);

  Json unknown_key = minimal_json();
  unknown_key["cameras"] = Json::array();
  CHECK_THROWS_WITH_AS(load_scene_graph(unknown_key.dump()), doctest::Contains("cameras"),
                       SchemaError);

  Json bad_kind = minimal_json();
  bad_kind["agents"][0]["kind"] = "dog";
  CHECK_THROWS_AS(load_scene_graph(bad_kind.dump()), SchemaError);

  Json bad_id = minimal_json();
  bad_id["rooms"][0]["id"] = "Kitchen";
  CHECK_THROWS_AS(load_scene_graph(bad_id.dump()), SchemaError);
}

TEST_CASE("load_scene_graph rejects a robotless graph") {
  Json doc = minimal_json();
  doc["agents"] = Json::array();
  CHECK_THROWS_AS(load_scene_graph(doc.dump()), MissingRobot);
}

TEST_CASE("load_scene_graph rejects duplicate ids and asymmetric adjacency") {
  Json dup = minimal_json();
  dup["items"].push_back({{"id", "r1"}, {"parent_room", "kitchen"}, {"category", "box"}});
  CHECK_THROWS_AS(load_scene_graph(dup.dump()), HierarchyError);

  Json same_layer = minimal_json();
  same_layer["items"].push_back({{"id", "box1"}, {"parent_room", "kitchen"}, {"category", "box"}});
  same_layer["items"].push_back({{"id", "box1"}, {"parent_room", "kitchen"}, {"category", "box"}});
  CHECK_THROWS_AS(load_scene_graph(same_layer.dump()), HierarchyError);

  Json asym = minimal_json();
  asym["rooms"].push_back({{"id", "hall"}, {"parent_floor", "f1"}, {"neighbors", Json::array()}});
  asym["rooms"][0]["neighbors"].push_back("hall");
  CHECK_THROWS_WITH_AS(load_scene_graph(asym.dump()),
                       doctest::Contains("asymmetric neighbors: kitchen, hall"), HierarchyError);
}

TEST_CASE("full observability: edges must resolve to nodes") {
  Json doc = minimal_json();
  doc["edges"].push_back({{"source", "r1"}, {"target", "ghost"}, {"relation", "next-to"}});
  CHECK_THROWS_WITH_AS(load_scene_graph(doc.dump()), doctest::Contains("ghost"), HierarchyError);
}

TEST_CASE("get_robot_node") {
  SceneGraph sg = load_scene_graph(kMinimalScene);

  SUBCASE("direct lookup") {
    const AgentNode& robot = get_robot_node(sg);
    CHECK(robot.id == "r1");
    CHECK(robot.kind == AgentKind::robot);
    CHECK(robot.parent_room == "kitchen");
  }
  SUBCASE("filters out humans") {
    sg.agents["h1"] = {"h1", AgentKind::human, "kitchen", std::nullopt, {}};
    sg.agents["h2"] = {"h2", AgentKind::human, "kitchen", std::nullopt, {}};
    CHECK(get_robot_node(sg).id == "r1");
  }
  SUBCASE("mutated to zero robots") {
    sg.agents.erase("r1");
    CHECK_THROWS_AS(get_robot_node(sg), MissingRobot);
  }
}

TEST_CASE("get_edges_and_neighbors") {
  SceneGraph sg = load_scene_graph(kMinimalScene);
  sg.agents["h1"] = {"h1", AgentKind::human, "kitchen", std::nullopt, {}};
  sg.items["stove"] = {"stove", "kitchen", "stove", true, {}, {}};
  sg.items["pan"] = {"pan", "kitchen", "pan", true, {}, {}};

  SUBCASE("no incident edges") {
    const auto [edges, items] = get_edges_and_neighbors(sg, "h1");
    CHECK(edges.empty());
    CHECK(items.empty());
  }
  SUBCASE("projects item endpoints") {
    sg.edges.insert({"h1", "stove", "using", 1});
    sg.edges.insert({"h1", "pan", "holding", 1});
    sg.edges.insert({"r1", "stove", "next-to", 1});  // not h1's
    const auto [edges, items] = get_edges_and_neighbors(sg, "h1");
    CHECK(edges.size() == 2);
    CHECK(items == std::set<std::string>{"stove", "pan"});
  }
  SUBCASE("the robot is not a human") {
    CHECK_THROWS_AS(get_edges_and_neighbors(sg, "r1"), UnknownAgent);
    CHECK_THROWS_AS(get_edges_and_neighbors(sg, "nobody"), UnknownAgent);
  }
}

TEST_CASE("build_history") {
  SUBCASE("single snapshot, human next to fridge") {
    SceneGraph sg = load_scene_graph(kMinimalScene);
    sg.agents["h1"] = {"h1", AgentKind::human, "kitchen", std::nullopt, {}};
    sg.items["fridge"] = {"fridge", "kitchen", "fridge", true, {}, {}};
    sg.edges.insert({"h1", "fridge", "next-to", 1});
    SnapshotSequence seq{{sg}};
    const InteractionHistory history = build_history(seq, "h1");
    REQUIRE(history.edge_events.size() == 1);
    REQUIRE(history.item_events.size() == 1);
    CHECK(history.edge_events[0].first == 1);
    CHECK(history.item_events[0] == std::pair<int, std::string>{1, "fridge"});
  }

  SUBCASE("three snapshots accumulate in timestep order") {
    // t1 fridge, t2 stove, t3 stove.
    SceneGraph base = load_scene_graph(kMinimalScene);
    base.agents["h1"] = {"h1", AgentKind::human, "kitchen", std::nullopt, {}};
    base.items["fridge"] = {"fridge", "kitchen", "fridge", true, {}, {}};
    base.items["stove"] = {"stove", "kitchen", "stove", true, {}, {}};
    SnapshotSequence seq;
    const std::vector<std::string> targets = {"fridge", "stove", "stove"};
    for (int t = 1; t <= 3; ++t) {
      SceneGraph snap = base;
      snap.timestep = t;
      snap.edges.insert({"h1", targets[t - 1], "next-to", t});
      seq.snapshots.push_back(std::move(snap));
    }
    const InteractionHistory history = build_history(seq, "h1");
    const std::vector<std::pair<int, std::string>> expected = {
        {1, "fridge"}, {2, "stove"}, {3, "stove"}};
    CHECK(history.item_events == expected);
    CHECK(history.edge_events.size() == 3);
    CHECK(history.last_timestep() == 3);
  }

  SUBCASE("empty sequence") {
    CHECK_THROWS_AS(build_history(SnapshotSequence{}, "h1"), EmptySequence);
  }
}

TEST_CASE("validate_hierarchy reports violations without throwing") {
  SUBCASE("valid fixture yields nothing") {
    const auto seq = load_snapshot_sequence_file(testsupport::fixture_path("allensville.seq.json"));
    CHECK(validate_hierarchy(seq.latest()).empty());
  }
  SUBCASE("asymmetric adjacency names both rooms") {
    SceneGraph sg = load_scene_graph(kMinimalScene);
    sg.rooms["hall"] = {"hall", "f1", {}};
    sg.rooms["kitchen"].neighbors.insert("hall");
    const auto violations = validate_hierarchy(sg);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0] == "asymmetric neighbors: kitchen, hall");
  }
  SUBCASE("duplicate id across layers yields one violation") {
    SceneGraph sg = load_scene_graph(kMinimalScene);
    sg.items["kitchen"] = {"kitchen", "kitchen", "box", true, {}, {}};
    const auto violations = validate_hierarchy(sg);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("kitchen") != std::string::npos);
  }
  SUBCASE("held item must be co-located") {
    SceneGraph sg = load_scene_graph(kMinimalScene);
    sg.rooms["hall"] = {"hall", "f1", {}};
    sg.items["mug"] = {"mug", "hall", "mug", true, {}, {}};
    sg.agents["r1"].holding.insert("mug");
    CHECK(validate_hierarchy(sg).size() == 1);
  }
}

TEST_CASE("sequence invariants: timesteps, identity, robot stability") {
  SceneGraph a = load_scene_graph(kMinimalScene);
  SceneGraph b = a;
  b.timestep = 3;  // should be 2
  SnapshotSequence seq{{a, b}};
  CHECK(!validate_sequence(seq).empty());

  b.timestep = 2;
  b.items["ghost"] = {"ghost", "kitchen", "box", true, {}, {}};
  CHECK(!validate_sequence(SnapshotSequence{{a, b}}).empty());
}

TEST_CASE("property: serialize/load round trip and validity on random graphs") {
  Rng rng(20260808);
  for (int i = 0; i < 50; ++i) {
    const SceneGraph sg = testsupport::random_scene(rng);
    CAPTURE(i);
    CHECK(validate_hierarchy(sg).empty());
    const SceneGraph reloaded = load_scene_graph(serialize_scene_graph(sg));
    CHECK(reloaded == sg);
  }
}

TEST_CASE("property: projection consistency of edges and items") {
  Rng rng(42);
  for (int i = 0; i < 50; ++i) {
    const SceneGraph sg = testsupport::random_scene(rng);
    for (const auto& [id, agent] : sg.agents) {
      if (agent.kind != AgentKind::human) continue;
      const auto [edges, items] = get_edges_and_neighbors(sg, id);
      std::set<std::string> expected;
      for (const auto& e : edges) {
        const std::string& other = e.source == id ? e.target : e.source;
        if (sg.items.count(other) > 0) expected.insert(other);
      }
      CHECK(items == expected);
    }
  }
}

TEST_CASE("property: build_history composes per-snapshot projections") {
  Rng rng(7);
  for (int i = 0; i < 30; ++i) {
    const SnapshotSequence seq = testsupport::random_sequence(rng);
    for (const auto& [id, agent] : seq.snapshots.front().agents) {
      if (agent.kind != AgentKind::human) continue;
      const InteractionHistory history = build_history(seq, id);
      std::vector<std::pair<int, SemanticEdge>> edge_events;
      std::vector<std::pair<int, std::string>> item_events;
      for (const auto& snap : seq.snapshots) {
        const auto [edges, items] = get_edges_and_neighbors(snap, id);
        for (const auto& e : edges) edge_events.emplace_back(snap.timestep, e);
        for (const auto& it : items) item_events.emplace_back(snap.timestep, it);
      }
      CHECK(history.edge_events == edge_events);
      CHECK(history.item_events == item_events);
    }
  }
}
