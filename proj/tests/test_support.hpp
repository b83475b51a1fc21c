#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "awareplan/domain_model.hpp"
#include "awareplan/pddl.hpp"
#include "awareplan/scene_graph.hpp"

namespace testsupport {

inline std::string fixture_path(const std::string& name) {
  return std::string(AWAREPLAN_FIXTURES_DIR) + "/" + name;
}

// Fresh directory under the system temp dir, unique per call.
inline std::string temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto path = std::filesystem::temp_directory_path() /
              ("awareplan_" + tag + "_" + std::to_string(::getpid()) + "_" +
               std::to_string(counter++));
  std::filesystem::create_directories(path);
  return path.string();
}

// ---------------------------------------------------------------------------
// Small scene builders

inline awareplan::SceneGraph two_room_scene() {
  using namespace awareplan;
  SceneGraph sg;
  sg.graph_id = "mini";
  sg.timestep = 1;
  sg.floors["ground_floor"] = {"ground_floor"};
  sg.rooms["room_a"] = {"room_a", "ground_floor", {"room_b"}};
  sg.rooms["room_b"] = {"room_b", "ground_floor", {"room_a"}};
  sg.items["item_x"] = {"item_x", "room_a", "box", true, {}, {}};
  sg.agents["r1"] = {"r1", AgentKind::robot, "room_b", std::nullopt, {}};
  return sg;
}

// The minimal mobile-manipulation domain used across planner tests: plain
// goto/pick/drop with no occupancy or kind guards.
inline awareplan::DomainSpec mini_domain() {
  using namespace awareplan;
  DomainSpec d;
  d.name = "mini";
  d.types.parent = {{"agent", "object"}, {"item", "object"}, {"room", "object"}};
  d.predicates = {
      {"at", {{"i", "item"}, {"r", "room"}}},
      {"at-agent", {{"a", "agent"}, {"r", "room"}}},
      {"connected", {{"r1", "room"}, {"r2", "room"}}},
      {"holding", {{"a", "agent"}, {"i", "item"}}},
  };
  d.actions = {
      {"goto",
       {{"a", "agent"}, {"from", "room"}, {"to", "room"}},
       {{"at-agent", {"a", "from"}}, {"connected", {"from", "to"}}},
       {{"at-agent", {"a", "to"}}},
       {{"at-agent", {"a", "from"}}}},
      {"pick",
       {{"a", "agent"}, {"i", "item"}, {"r", "room"}},
       {{"at-agent", {"a", "r"}}, {"at", {"i", "r"}}},
       {{"holding", {"a", "i"}}},
       {{"at", {"i", "r"}}}},
      {"drop",
       {{"a", "agent"}, {"i", "item"}, {"r", "room"}},
       {{"at-agent", {"a", "r"}}, {"holding", {"a", "i"}}},
       {{"at", {"i", "r"}}},
       {{"holding", {"a", "i"}}}},
  };
  return d;
}

// Fetch task on the mini domain: robot in room_b, item in room_a, goal item
// in room_b. Optimal plan: goto, pick, goto, drop.
inline awareplan::ProblemSpec fetch_problem() {
  using namespace awareplan;
  ProblemSpec p;
  p.name = "fetch";
  p.domain_name = "mini";
  p.objects = {{"r1", "agent"}, {"item_x", "item"}, {"room_a", "room"}, {"room_b", "room"}};
  p.init = {{"at-agent", {"r1", "room_b"}},
            {"at", {"item_x", "room_a"}},
            {"connected", {"room_a", "room_b"}},
            {"connected", {"room_b", "room_a"}}};
  p.goals = {{"r1", PartitionKind::robot, {{"at", {"item_x", "room_b"}}}}};
  return p;
}

// ---------------------------------------------------------------------------
// Random generators for property tests

struct Rng {
  std::mt19937 engine;
  explicit Rng(uint64_t seed) : engine(seed) {}
  int range(int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(engine);
  }
  double real(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine);
  }
  bool chance(double p) { return real(0.0, 1.0) < p; }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<size_t>(range(0, static_cast<int>(v.size()) - 1))];
  }
};

awareplan::SceneGraph random_scene(Rng& rng);
awareplan::SnapshotSequence random_sequence(Rng& rng, int max_steps = 4);
awareplan::DomainSpec random_domain(Rng& rng);
awareplan::ProblemSpec random_problem(Rng& rng, const awareplan::DomainSpec& domain);

// Solvable goto/pick/drop instance whose goal is read off an independent
// random walk, so a plan of at most walk length exists by construction.
struct PlanningInstance {
  awareplan::DomainSpec domain;
  awareplan::ProblemSpec problem;
};
PlanningInstance random_planning_instance(Rng& rng);

}  // namespace testsupport
