#include <algorithm>
#include <deque>
#include <set>

#include "awareplan/errors.hpp"
#include "awareplan/planner.hpp"

namespace awareplan {

// Exhaustive breadth-first search used as the optimality oracle in tests.
// Deliberately naive and structurally independent of plan(): sorted-vector
// states, std::set visited registry, FIFO frontier.

namespace {

using State = std::vector<uint32_t>;  // sorted atom indices

State apply(const GroundAction& action, const State& state) {
  State next;
  next.reserve(state.size() + action.add.size());
  std::set_difference(state.begin(), state.end(), action.del.begin(), action.del.end(),
                      std::back_inserter(next));
  State merged;
  merged.reserve(next.size() + action.add.size());
  std::set_union(next.begin(), next.end(), action.add.begin(), action.add.end(),
                 std::back_inserter(merged));
  return merged;
}

bool holds_all(const State& state, const std::vector<uint32_t>& atoms) {
  return std::includes(state.begin(), state.end(), atoms.begin(), atoms.end());
}

bool holds_none(const State& state, const std::vector<uint32_t>& atoms) {
  State intersection;
  std::set_intersection(state.begin(), state.end(), atoms.begin(), atoms.end(),
                        std::back_inserter(intersection));
  return intersection.empty();
}

}  // namespace

Plan optimal_plan_bfs(const GroundedTask& task, size_t state_cap) {
  State init(task.init.begin(), task.init.end());

  struct Node {
    State state;
    int64_t parent;
    uint32_t action;
  };
  std::vector<Node> nodes;
  nodes.push_back({init, -1, 0});

  std::set<State> visited;
  visited.insert(init);
  std::deque<size_t> frontier;
  frontier.push_back(0);

  while (!frontier.empty()) {
    const size_t current = frontier.front();
    frontier.pop_front();
    const State state = nodes[current].state;

    if (holds_all(state, task.goal)) {
      Plan plan;
      std::vector<uint32_t> chain;
      for (int64_t n = static_cast<int64_t>(current); nodes[n].parent >= 0;
           n = nodes[n].parent) {
        chain.push_back(nodes[n].action);
      }
      std::reverse(chain.begin(), chain.end());
      for (size_t i = 0; i < chain.size(); ++i) {
        const GroundAction& a = task.actions[chain[i]];
        plan.steps.push_back({i, a.agent, a.schema_name, a.args});
      }
      plan.expansions = static_cast<long>(visited.size());
      return plan;
    }

    for (uint32_t ai = 0; ai < task.actions.size(); ++ai) {
      const GroundAction& action = task.actions[ai];
      if (!holds_all(state, action.pre) || !holds_none(state, action.neg_pre)) continue;
      State next = apply(action, state);
      if (!visited.insert(next).second) continue;
      if (visited.size() > state_cap) {
        throw OracleCapExceeded("oracle state cap of " + std::to_string(state_cap) + " exceeded");
      }
      nodes.push_back({std::move(next), static_cast<int64_t>(current), ai});
      frontier.push_back(nodes.size() - 1);
    }
  }

  throw Unsolvable("oracle exhausted " + std::to_string(visited.size()) +
                   " states without reaching the goal");
}

}  // namespace awareplan
