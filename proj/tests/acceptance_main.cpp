// Acceptance suite: runs every criterion end to end and prints one
// [PASS]/[FAIL] line each. Exits non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "awareplan/errors.hpp"
#include "awareplan/grounding.hpp"
#include "awareplan/json_util.hpp"
#include "awareplan/knowledge_base.hpp"
#include "awareplan/pddl.hpp"
#include "awareplan/planner.hpp"
#include "awareplan/predictor.hpp"
#include "awareplan/scene_graph.hpp"
#include "awareplan/simulator.hpp"
#include "test_support.hpp"

using namespace awareplan;
using testsupport::Rng;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool passed, const std::string& detail) {
  std::cout << (passed ? "[PASS]" : "[FAIL]") << " criterion " << number << ": " << name << " — "
            << detail << "\n";
  if (!passed) ++g_failures;
}

void criterion(int number, const std::string& name,
               const std::function<std::pair<bool, std::string>()>& body) {
  try {
    auto [passed, detail] = body();
    report(number, name, passed, detail);
  } catch (const std::exception& e) {
    report(number, name, false, std::string("exception: ") + e.what());
  }
}

std::string fx(const std::string& name) { return testsupport::fixture_path(name); }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(AWAREPLAN_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WEXITSTATUS(status);
}

double timed(const std::function<void()>& body) {
  const auto start = std::chrono::steady_clock::now();
  body();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

uint64_t hash_directory(const std::string& dir) {
  uint64_t h = 14695981039346656037ull;
  auto mix = [&](const std::string& data) {
    for (unsigned char c : data) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    mix(std::filesystem::relative(f, dir).string());
    mix(read_text_file(f.string()));
  }
  return h;
}

TransformResult transform_fixture(const std::string& scene, const std::string& task) {
  const KnowledgeBase kb = load_knowledge_file(fx("household.kb.json"));
  const SnapshotSequence seq = load_snapshot_sequence_file(fx(scene));
  PassthroughExtractor extractor;
  HeuristicPredictor predictor(kb.bundle.goal_templates, 0.5);
  NoSynthesis synthesis;
  TransformOptions options;
  options.robot_goal = load_task_file(fx(task));
  return transform(kb, seq, extractor, predictor, synthesis, options);
}

// 1. Fetch fixture reproduces the four-step go/pick/go/drop plan, under 1s.
std::pair<bool, std::string> fetch_reproduction() {
  const std::string out = testsupport::temp_dir("acc1");
  int exit_code = -1;
  const double elapsed = timed([&] {
    exit_code = run_cli("pipeline --scene " + fx("fetch.scene.json") + " --knowledge " +
                        fx("household.kb.json") + " --task " + fx("fetch.task.json") + " --out " +
                        out);
  });
  if (exit_code != 0) return {false, "pipeline exit " + std::to_string(exit_code)};

  const Plan the_plan = plan_from_json(read_text_file(out + "/plan.json"));
  const std::vector<std::string> shape = {"goto", "pick", "goto", "drop"};
  if (the_plan.steps.size() != 4) {
    return {false, "expected 4 steps, got " + std::to_string(the_plan.steps.size())};
  }
  for (size_t i = 0; i < 4; ++i) {
    if (the_plan.steps[i].schema_name != shape[i]) {
      return {false, "step " + std::to_string(i) + " is " + the_plan.steps[i].schema_name};
    }
  }
  if (the_plan.steps[1].args[1] != "item_x" || the_plan.steps[3].args[2] != "room_b") {
    return {false, "plan moves the wrong object"};
  }
  if (elapsed >= 1.0) return {false, "took " + std::to_string(elapsed) + "s (limit 1s)"};
  std::ostringstream detail;
  detail << "4-step (goto,pick,goto,drop) plan in " << elapsed << "s";
  return {true, detail.str()};
}

// 2. Full pipeline on the 6-room / 12-item / 2-human fixture: exit 0,
//    emitted specs parse back equal, plan validates, both human partitions
//    satisfied, under 5s.
std::pair<bool, std::string> end_to_end() {
  const std::string out = testsupport::temp_dir("acc2");
  int exit_code = -1;
  const double elapsed = timed([&] {
    exit_code = run_cli("pipeline --scene " + fx("allensville.seq.json") + " --knowledge " +
                        fx("household.kb.json") + " --task " + fx("allensville.task.json") +
                        " --out " + out);
  });
  if (exit_code != 0) return {false, "pipeline exit " + std::to_string(exit_code)};
  if (elapsed >= 5.0) return {false, "took " + std::to_string(elapsed) + "s (limit 5s)"};

  const TransformResult reference =
      transform_fixture("allensville.seq.json", "allensville.task.json");
  const DomainSpec domain = parse_domain(read_text_file(out + "/domain.pddl"));
  const ProblemSpec problem = parse_problem(read_text_file(out + "/problem.pddl"));
  if (!structurally_equal(domain, reference.domain)) return {false, "domain round trip differs"};
  if (!structurally_equal(problem, reference.problem)) {
    return {false, "problem round trip differs"};
  }

  const GroundedTask task = ground_task(domain, problem);
  const Plan the_plan = plan_from_json(read_text_file(out + "/plan.json"));
  const Verdict verdict = validate_plan(task, the_plan);
  if (!verdict.valid()) return {false, verdict.describe()};

  int human_partitions = 0;
  const auto& final_state = verdict.trajectory.back();
  for (const auto& partition : problem.goals) {
    if (partition.kind != PartitionKind::human) continue;
    ++human_partitions;
    for (const auto& lit : partition.literals) {
      const auto atom = task.atom_index.find(lit.text());
      if (atom == task.atom_index.end() || final_state.count(atom->second) == 0) {
        return {false, "human goal " + lit.text() + " unmet"};
      }
    }
  }
  if (human_partitions != 2) {
    return {false, "expected 2 human partitions, got " + std::to_string(human_partitions)};
  }
  std::ostringstream detail;
  detail << the_plan.steps.size() << "-step joint plan, both human goals satisfied, in "
         << elapsed << "s";
  return {true, detail.str()};
}

// 3. Distribution invariants over >= 1000 randomized histories.
std::pair<bool, std::string> distribution_invariants() {
  const KnowledgeBase kb = load_knowledge_file(fx("household.kb.json"));
  SceneGraph frame;
  frame.graph_id = "bench";
  frame.timestep = 8;
  frame.floors["f1"] = {"f1"};
  frame.rooms["kitchen"] = {"kitchen", "f1", {}};
  frame.items["stove1"] = {"stove1", "kitchen", "stove", true, {}, {}};
  frame.items["fridge1"] = {"fridge1", "kitchen", "fridge", true, {}, {}};
  frame.items["tv1"] = {"tv1", "kitchen", "tv", true, {}, {}};
  frame.items["sink1"] = {"sink1", "kitchen", "sink", true, {}, {}};
  frame.agents["r1"] = {"r1", AgentKind::robot, "kitchen", std::nullopt, {}};
  frame.agents["h1"] = {"h1", AgentKind::human, "kitchen", std::nullopt, {}};

  const std::vector<std::string> items = {"stove1", "fridge1", "tv1", "sink1"};
  Rng rng(20260808);
  HeuristicPredictor predictor(kb.bundle.goal_templates, 0.5);

  int histories = 0;
  for (int i = 0; i < 1000; ++i) {
    InteractionHistory history;
    history.human_id = "h1";
    const int n = rng.range(0, 10);
    for (int j = 0; j < n; ++j) {
      history.item_events.emplace_back(rng.range(1, 8), rng.pick(items));
    }
    std::sort(history.item_events.begin(), history.item_events.end());
    const GoalDistribution dist = predictor.predict(frame.agents.at("h1"), history, frame,
                                                    kb.bundle.structured);
    if (dist.candidates.empty()) return {false, "empty distribution"};
    double sum = 0.0;
    for (const auto& c : dist.candidates) sum += c.probability;
    if (std::abs(sum - 1.0) > 1e-9) {
      return {false, "sum " + std::to_string(sum) + " at history " + std::to_string(i)};
    }
    ++histories;
  }

  // Argmax invariance under positive rescaling of raw weights.
  for (int i = 0; i < 1000; ++i) {
    GoalDistribution raw;
    raw.human_id = "h1";
    const int n = rng.range(1, 6);
    for (int j = 0; j < n; ++j) {
      GoalCandidate c;
      c.human_id = "h1";
      c.goal = {{"used", {"obj" + std::to_string(j)}}};
      c.probability = rng.real(1e-3, 100.0);
      raw.candidates.push_back(std::move(c));
    }
    GoalDistribution scaled = raw;
    const double factor = rng.real(1e-3, 1e3);
    for (auto& c : scaled.candidates) c.probability *= factor;
    if (select_goal(renormalize(raw)).goal_text() !=
        select_goal(renormalize(scaled)).goal_text()) {
      return {false, "argmax changed under rescaling at case " + std::to_string(i)};
    }
  }
  return {true, std::to_string(histories) + " histories: sum=1 within 1e-9, argmax rescale-invariant"};
}

// 4. UCS length equals the BFS oracle on randomized instances; all plans
//    pass the independent validator.
std::pair<bool, std::string> planner_optimality() {
  Rng rng(424242);
  int checked = 0;
  int attempts = 0;
  while (checked < 25 && attempts < 200) {
    ++attempts;
    const auto inst = testsupport::random_planning_instance(rng);
    const GroundedTask task = ground_task(inst.domain, inst.problem);
    Plan oracle;
    try {
      oracle = optimal_plan_bfs(task, 100000);
    } catch (const OracleCapExceeded&) {
      continue;  // instance above the oracle cap; not part of the criterion
    }
    const Plan ucs = plan(task);
    if (ucs.steps.size() != oracle.steps.size()) {
      return {false, "ucs " + std::to_string(ucs.steps.size()) + " vs oracle " +
                         std::to_string(oracle.steps.size())};
    }
    if (!validate_plan(task, ucs).valid() || !validate_plan(task, oracle).valid()) {
      return {false, "a returned plan failed the independent validator"};
    }
    ++checked;
  }
  if (checked < 25) return {false, "only " + std::to_string(checked) + " instances checked"};
  return {true, std::to_string(checked) + " instances: ucs length == bfs length, 100% validated"};
}

// 5. Parser round trip over >= 100 random specs; emission is a byte-level
//    fixpoint.
std::pair<bool, std::string> parser_round_trip() {
  Rng rng(555777);
  int checked = 0;
  for (int i = 0; i < 110; ++i) {
    const DomainSpec domain = testsupport::random_domain(rng);
    const std::string text = emit_domain(domain);
    const DomainSpec parsed = parse_domain(text);
    if (!structurally_equal(parsed, domain)) {
      return {false, "domain round trip differs at case " + std::to_string(i)};
    }
    if (emit_domain(parsed) != text) {
      return {false, "domain emission not a fixpoint at case " + std::to_string(i)};
    }
    const ProblemSpec problem = testsupport::random_problem(rng, domain);
    const std::string ptext = emit_problem(problem);
    const ProblemSpec pparsed = parse_problem(ptext);
    if (!structurally_equal(pparsed, problem)) {
      return {false, "problem round trip differs at case " + std::to_string(i)};
    }
    if (emit_problem(pparsed) != ptext) {
      return {false, "problem emission not a fixpoint at case " + std::to_string(i)};
    }
    ++checked;
  }
  return {true, std::to_string(checked) + " spec pairs round-tripped, emission fixpoint"};
}

// 6. Occupancy preconditions make the difference: guarded planning avoids
//    the active kitchen entirely; the stripped domain's shortest plan cuts
//    through it.
std::pair<bool, std::string> awareness_contrast() {
  const TransformResult result =
      transform_fixture("conflict.scene.json", "conflict.task.json");
  const SnapshotSequence seq = load_snapshot_sequence_file(fx("conflict.scene.json"));
  const std::vector<Agenda> agendas = {load_agenda_file(fx("conflict_h1.agenda.json"))};

  const GroundedTask guarded_task = ground_task(result.domain, result.problem);
  const Plan guarded_plan = plan(guarded_task);
  const Trace guarded_trace =
      run(seq.latest(), guarded_plan, guarded_task, result.domain, agendas);
  const DisturbanceReport guarded = disturbance_metrics(guarded_trace);

  DomainSpec stripped = result.domain;
  for (auto& action : stripped.actions) {
    std::erase_if(action.preconditions, [](const Literal& l) {
      return l.negated && l.predicate == "human-active-in";
    });
  }
  const GroundedTask stripped_task = ground_task(stripped, result.problem);
  const Plan stripped_plan = plan(stripped_task);  // uniform cost = shortest
  const Trace stripped_trace =
      run(seq.latest(), stripped_plan, stripped_task, stripped, agendas);
  const DisturbanceReport bare = disturbance_metrics(stripped_trace);

  if (guarded.co_occupancy_steps != 0) {
    return {false, "guarded plan co-occupies " + std::to_string(guarded.co_occupancy_steps) +
                       " steps"};
  }
  if (bare.co_occupancy_steps < 1) {
    return {false, "stripped shortest plan has no co-occupancy"};
  }
  std::ostringstream detail;
  detail << "guarded co_occupancy=0 (" << guarded_plan.steps.size()
         << " steps), stripped co_occupancy=" << bare.co_occupancy_steps << " ("
         << stripped_plan.steps.size() << " steps)";
  return {true, detail.str()};
}

// 7. Two identical replay-mode pipeline runs produce byte-identical output
//    directories.
std::pair<bool, std::string> replay_determinism() {
  const std::string out_a = testsupport::temp_dir("acc7a");
  const std::string out_b = testsupport::temp_dir("acc7b");
  const std::string args = "pipeline --scene " + fx("synth.seq.json") + " --knowledge " +
                           fx("household.kb.json") + " --task " + fx("synth.task.json") +
                           " --backend llm --llm-mode replay --fixtures " + fx("llm") +
                           " --prompts " + fx("prompts") + " --out ";
  const int exit_a = run_cli(args + out_a);
  const int exit_b = run_cli(args + out_b);
  if (exit_a != 0 || exit_b != 0) {
    return {false, "pipeline exits " + std::to_string(exit_a) + "/" + std::to_string(exit_b)};
  }
  const uint64_t hash_a = hash_directory(out_a);
  const uint64_t hash_b = hash_directory(out_b);
  if (hash_a != hash_b) return {false, "output directories differ"};
  std::ostringstream detail;
  detail << "both runs hash to " << std::hex << hash_a;
  return {true, detail.str()};
}

// 8. The recorded uncovered-goal fixture synthesizes at least one predicate
//    and one action, after which no candidate is uncovered.
std::pair<bool, std::string> synthesis_path() {
  const KnowledgeBase kb = load_knowledge_file(fx("household.kb.json"));
  const SnapshotSequence seq = load_snapshot_sequence_file(fx("synth.seq.json"));

  GatewayConfig config;
  config.mode = LlmMode::replay;
  config.fixtures_path = fx("llm");
  LlmGateway gateway(config);
  PromptLibrary prompts(fx("prompts"));
  PassthroughExtractor extractor;
  LlmPredictor predictor(gateway, prompts);
  LlmSynthesizer synthesizer(gateway, prompts);
  TransformOptions options;
  options.robot_goal = load_task_file(fx("synth.task.json"));

  const TransformResult result =
      transform(kb, seq, extractor, predictor, synthesizer, options);

  size_t new_predicates = 0;
  size_t new_actions = 0;
  size_t uncovered = 0;
  for (const auto& human : result.report.humans) {
    new_predicates += human.synthesis.predicates.size();
    new_actions += human.synthesis.actions.size();
    for (const auto& c : human.distribution.candidates) uncovered += c.uncovered ? 1 : 0;
  }
  if (new_predicates < 1) return {false, "no predicate synthesized"};
  if (new_actions < 1) return {false, "no action synthesized"};
  if (!validate_domain(result.domain).empty()) return {false, "extended domain invalid"};
  if (uncovered != 0) {
    return {false, std::to_string(uncovered) + " candidates remain uncovered"};
  }

  // The extended problem is actually solvable with the synthesized action.
  const GroundedTask task = ground_task(result.domain, result.problem);
  const Plan the_plan = plan(task);
  if (!validate_plan(task, the_plan).valid()) return {false, "plan on extended domain invalid"};
  std::ostringstream detail;
  detail << new_predicates << " predicate(s) and " << new_actions
         << " action(s) synthesized, 0 uncovered, plan of " << the_plan.steps.size()
         << " steps validates";
  return {true, detail.str()};
}

}  // namespace

int main() {
  criterion(1, "fetch-task reproduction", fetch_reproduction);
  criterion(2, "full pipeline on the 6-room fixture", end_to_end);
  criterion(3, "distribution invariants", distribution_invariants);
  criterion(4, "planner optimality and soundness", planner_optimality);
  criterion(5, "parser round-trip", parser_round_trip);
  criterion(6, "human-awareness contrast", awareness_contrast);
  criterion(7, "replay determinism", replay_determinism);
  criterion(8, "synthesis path", synthesis_path);

  if (g_failures > 0) {
    std::cout << g_failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}
