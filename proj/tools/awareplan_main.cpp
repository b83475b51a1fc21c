#include <chrono>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "awareplan/errors.hpp"
#include "awareplan/grounding.hpp"
#include "awareplan/json_util.hpp"
#include "awareplan/knowledge_base.hpp"
#include "awareplan/llm_gateway.hpp"
#include "awareplan/pddl.hpp"
#include "awareplan/planner.hpp"
#include "awareplan/predictor.hpp"
#include "awareplan/prompts.hpp"
#include "awareplan/scene_graph.hpp"
#include "awareplan/simulator.hpp"

namespace {

using namespace awareplan;

// Exit codes are a stable contract:
//   0 success, 1 validation violations, 2 unreadable/malformed input,
//   3 no plan (unsolvable or resource limit), 4 prediction/synthesis
//   failure, 5 LLM gateway failure.
constexpr int kExitOk = 0;
constexpr int kExitViolations = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitUnsolvable = 3;
constexpr int kExitPrediction = 4;
constexpr int kExitGateway = 5;

struct CommonOptions {
  std::string scene_path;
  std::string knowledge_path;
  std::string task_path;
  std::vector<std::string> agenda_paths;
  std::string backend = "heuristic";
  std::string extractor = "passthrough";
  std::string strategy = "ucs";
  std::string llm_mode = "replay";
  std::string out_dir = "out";
  std::string fixtures_path;
  std::string prompts_dir = "fixtures/prompts";
  std::string domain_name = "household";
  std::string problem_name = "task";
  double gamma = 0.5;
  int max_candidates = 5;
  long max_expansions = 5000000;
  uint64_t seed = 0;
};

struct Toolchain {
  std::unique_ptr<LlmGateway> gateway;
  std::unique_ptr<Extractor> extractor;
  std::unique_ptr<PredictorBackend> predictor;
  std::unique_ptr<SynthesisBackend> synthesis;
};

Toolchain make_toolchain(const CommonOptions& opt, const KnowledgeBase& kb) {
  Toolchain chain;
  const bool wants_llm = opt.backend == "llm" || opt.extractor == "llm";
  if (wants_llm) {
    GatewayConfig config;
    config.mode = parse_llm_mode(opt.llm_mode);
    config.fixtures_path = opt.fixtures_path;
    config = config_from_env(config);
    if (!opt.fixtures_path.empty()) config.fixtures_path = opt.fixtures_path;
    chain.gateway = std::make_unique<LlmGateway>(config);
  }

  PromptLibrary prompts = wants_llm ? PromptLibrary(opt.prompts_dir) : PromptLibrary();

  if (opt.extractor == "passthrough") {
    chain.extractor = std::make_unique<PassthroughExtractor>();
  } else if (opt.extractor == "llm") {
    chain.extractor = std::make_unique<LlmExtractor>(*chain.gateway, prompts);
  } else {
    throw SchemaError("unknown extractor '" + opt.extractor + "' (expected passthrough|llm)");
  }

  if (opt.backend == "heuristic") {
    chain.predictor = std::make_unique<HeuristicPredictor>(kb.bundle.goal_templates, opt.gamma,
                                                           opt.max_candidates);
    chain.synthesis = std::make_unique<NoSynthesis>();
  } else if (opt.backend == "llm") {
    chain.predictor = std::make_unique<LlmPredictor>(*chain.gateway, prompts, opt.max_candidates);
    chain.synthesis = std::make_unique<LlmSynthesizer>(*chain.gateway, prompts);
  } else {
    throw SchemaError("unknown backend '" + opt.backend + "' (expected heuristic|llm)");
  }
  return chain;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const TransportError*>(&e) || dynamic_cast<const ReplayMiss*>(&e) ||
      dynamic_cast<const SchemaViolation*>(&e) || dynamic_cast<const BudgetExceeded*>(&e)) {
    return kExitGateway;
  }
  if (dynamic_cast<const PredictionError*>(&e) ||
      dynamic_cast<const UncoveredGoalWithoutSynthesis*>(&e) ||
      dynamic_cast<const DegenerateWeights*>(&e) || dynamic_cast<const SynthesisInvalid*>(&e) ||
      dynamic_cast<const ExtractionInvalid*>(&e) || dynamic_cast<const EmptySource*>(&e)) {
    return kExitPrediction;
  }
  if (dynamic_cast<const Unsolvable*>(&e) || dynamic_cast<const ResourceLimit*>(&e) ||
      dynamic_cast<const ExplosionGuard*>(&e)) {
    return kExitUnsolvable;
  }
  if (dynamic_cast<const Error*>(&e)) return kExitBadInput;
  return kExitViolations;
}

void write_artifact(const CommonOptions& opt, const std::string& name,
                    const std::string& content) {
  std::filesystem::create_directories(opt.out_dir);
  write_text_file((std::filesystem::path(opt.out_dir) / name).string(), content);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// validate

int cmd_validate(const CommonOptions& opt) {
  std::vector<std::string> violations;
  SnapshotSequence seq;
  bool have_scene = false;

  try {
    if (!opt.scene_path.empty()) {
      Json doc = parse_json_file(opt.scene_path);
      // Re-run the total validators so every violation is listed, not just
      // the first load failure.
      try {
        seq = load_snapshot_sequence_file(opt.scene_path);
        have_scene = true;
      } catch (const HierarchyError& e) {
        violations.push_back(e.what());
      } catch (const MissingRobot& e) {
        violations.push_back(e.what());
      }
    }
    if (!opt.knowledge_path.empty()) {
      try {
        load_knowledge_file(opt.knowledge_path);
      } catch (const TypeCycle& e) {
        violations.push_back(e.what());
      } catch (const UndeclaredPredicate& e) {
        violations.push_back(e.what());
      }
    }
    for (const auto& path : opt.agenda_paths) {
      Agenda agenda = load_agenda_file(path);
      if (have_scene) {
        for (auto& v : validate_agenda(agenda, seq.latest())) violations.push_back(v);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }

  for (const auto& v : violations) std::cout << v << "\n";
  if (violations.empty()) std::cout << "ok\n";
  return violations.empty() ? kExitOk : kExitViolations;
}

// ---------------------------------------------------------------------------
// predict

int cmd_predict(const CommonOptions& opt) {
  const auto seq = load_snapshot_sequence_file(opt.scene_path);
  const auto kb = load_knowledge_file(opt.knowledge_path);
  auto chain = make_toolchain(opt, kb);

  const SceneGraph& frame = seq.latest();
  const DomainElements elements = chain.extractor->extract(get_knowledge(kb, opt.domain_name));

  Json out = Json::array();
  for (const auto& [id, agent] : frame.agents) {
    if (agent.kind != AgentKind::human) continue;
    const auto history = build_history(seq, id);
    const auto dist = chain.predictor->predict(agent, history, frame, elements);
    Json candidates = Json::array();
    for (const auto& c : dist.candidates) {
      candidates.push_back({{"goal", c.goal_text()},
                            {"probability", c.probability},
                            {"rationale", c.rationale},
                            {"uncovered", c.uncovered}});
    }
    out.push_back({{"human_id", id},
                   {"candidates", std::move(candidates)},
                   {"selected_goal", select_goal(dist).goal_text()}});
    std::cout << id << " -> " << select_goal(dist).goal_text() << "\n";
  }
  write_artifact(opt, "prediction.json", out.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// ground / plan / simulate / pipeline

TransformResult run_transform(const CommonOptions& opt, const KnowledgeBase& kb,
                              const SnapshotSequence& seq, Toolchain& chain,
                              TransformReport* report) {
  TransformOptions toptions;
  toptions.domain_name = opt.domain_name;
  toptions.problem_name = opt.problem_name;
  if (!opt.task_path.empty()) toptions.robot_goal = load_task_file(opt.task_path);
  return transform(kb, seq, *chain.extractor, *chain.predictor, *chain.synthesis, toptions,
                   report);
}

int cmd_ground(const CommonOptions& opt) {
  const auto seq = load_snapshot_sequence_file(opt.scene_path);
  const auto kb = load_knowledge_file(opt.knowledge_path);
  auto chain = make_toolchain(opt, kb);

  TransformReport report;
  try {
    const TransformResult result = run_transform(opt, kb, seq, chain, &report);
    write_artifact(opt, "domain.pddl", emit_domain(result.domain));
    write_artifact(opt, "problem.pddl", emit_problem(result.problem));
    write_artifact(opt, "prediction.json", report_to_json(result.report).dump(2) + "\n");
  } catch (...) {
    write_artifact(opt, "prediction.json", report_to_json(report).dump(2) + "\n");
    throw;
  }
  std::cout << "wrote domain.pddl, problem.pddl, prediction.json to " << opt.out_dir << "\n";
  return kExitOk;
}

int cmd_plan(const CommonOptions& opt, const std::string& domain_path,
             const std::string& problem_path) {
  const DomainSpec domain = parse_domain(read_text_file(domain_path));
  const ProblemSpec problem = parse_problem(read_text_file(problem_path));
  const GroundedTask task = ground_task(domain, problem);

  SearchConfig config;
  config.strategy = parse_strategy(opt.strategy);
  config.max_expansions = opt.max_expansions;
  config.seed = opt.seed;

  const auto start = std::chrono::steady_clock::now();
  const Plan result = plan(task, config);
  const double elapsed = seconds_since(start);

  write_artifact(opt, "plan.json", plan_to_json(result));
  write_artifact(opt, "plan.plan", plan_to_text(result));
  std::cout << "plan: " << result.steps.size() << " steps, " << result.expansions
            << " expansions, " << elapsed << "s\n";
  return kExitOk;
}

std::vector<Agenda> load_checked_agendas(const CommonOptions& opt, const SceneGraph& frame) {
  std::vector<Agenda> agendas;
  std::vector<std::string> violations;
  for (const auto& path : opt.agenda_paths) {
    agendas.push_back(load_agenda_file(path));
    for (auto& v : validate_agenda(agendas.back(), frame)) violations.push_back(v);
  }
  if (!violations.empty()) {
    std::string joined;
    for (const auto& v : violations) joined += (joined.empty() ? "" : "; ") + v;
    throw HierarchyError("agendas do not fit the scene: " + joined);
  }
  return agendas;
}

int cmd_simulate(const CommonOptions& opt, const std::string& domain_path,
                 const std::string& problem_path, const std::string& plan_path) {
  const DomainSpec domain = parse_domain(read_text_file(domain_path));
  const ProblemSpec problem = parse_problem(read_text_file(problem_path));
  const GroundedTask task = ground_task(domain, problem);
  const Plan the_plan = plan_from_json(read_text_file(plan_path));
  const auto seq = load_snapshot_sequence_file(opt.scene_path);

  const std::vector<Agenda> agendas = load_checked_agendas(opt, seq.latest());

  const Trace trace = run(seq.latest(), the_plan, task, domain, agendas);
  const DisturbanceReport report = disturbance_metrics(trace);

  write_artifact(opt, "trace.jsonl", trace_to_jsonl(trace));
  write_artifact(opt, "disturbance.json", disturbance_to_json(report).dump(2) + "\n");
  if (!trace.entries.empty()) {
    write_artifact(opt, "snapshots.json",
                   serialize_snapshot_sequence(generate_snapshots(trace, seq.latest())));
  }
  std::cout << "trace: " << trace.entries.size() << " steps, " << trace.fault_count()
            << " faults, co_occupancy=" << report.co_occupancy_steps
            << ", item_conflicts=" << report.item_conflicts << "\n";
  return kExitOk;
}

int cmd_pipeline(const CommonOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto seq = load_snapshot_sequence_file(opt.scene_path);
  const auto kb = load_knowledge_file(opt.knowledge_path);
  auto chain = make_toolchain(opt, kb);

  TransformReport report;
  TransformResult result;
  try {
    result = run_transform(opt, kb, seq, chain, &report);
  } catch (...) {
    write_artifact(opt, "prediction.json", report_to_json(report).dump(2) + "\n");
    throw;
  }
  write_artifact(opt, "domain.pddl", emit_domain(result.domain));
  write_artifact(opt, "problem.pddl", emit_problem(result.problem));
  write_artifact(opt, "prediction.json", report_to_json(result.report).dump(2) + "\n");
  const double t_transform = seconds_since(t0);

  const auto t1 = std::chrono::steady_clock::now();
  const GroundedTask task = ground_task(result.domain, result.problem);
  SearchConfig config;
  config.strategy = parse_strategy(opt.strategy);
  config.max_expansions = opt.max_expansions;
  config.seed = opt.seed;
  const Plan the_plan = plan(task, config);
  write_artifact(opt, "plan.json", plan_to_json(the_plan));
  write_artifact(opt, "plan.plan", plan_to_text(the_plan));
  const double t_plan = seconds_since(t1);

  double t_sim = 0.0;
  std::optional<DisturbanceReport> disturbance;
  size_t trace_steps = 0;
  if (!opt.agenda_paths.empty()) {
    const auto t2 = std::chrono::steady_clock::now();
    const std::vector<Agenda> agendas = load_checked_agendas(opt, seq.latest());
    const Trace trace = run(seq.latest(), the_plan, task, result.domain, agendas);
    disturbance = disturbance_metrics(trace);
    trace_steps = trace.entries.size();
    write_artifact(opt, "trace.jsonl", trace_to_jsonl(trace));
    write_artifact(opt, "disturbance.json", disturbance_to_json(*disturbance).dump(2) + "\n");
    if (!trace.entries.empty()) {
      write_artifact(opt, "snapshots.json",
                     serialize_snapshot_sequence(generate_snapshots(trace, seq.latest())));
    }
    t_sim = seconds_since(t2);
  }

  std::cout << "stage        result                          time\n";
  std::cout << "ground       " << result.problem.objects.size() << " objects, "
            << result.problem.init.size() << " init, " << result.problem.goals.size()
            << " goal partitions    " << t_transform << "s\n";
  std::cout << "plan         " << the_plan.steps.size() << " steps, " << the_plan.expansions
            << " expansions        " << t_plan << "s\n";
  if (disturbance) {
    std::cout << "simulate     " << trace_steps
              << " steps, co_occupancy=" << disturbance->co_occupancy_steps
              << ", item_conflicts=" << disturbance->item_conflicts << "    " << t_sim << "s\n";
  }
  std::cout << "output       " << opt.out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"awareplan: human-aware household task planning"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string domain_path;
  std::string problem_path;
  std::string plan_path;

  auto add_common = [&](CLI::App* cmd, bool needs_llm_flags = true) {
    cmd->add_option("--out", opt.out_dir, "output directory");
    if (needs_llm_flags) {
      cmd->add_option("--llm-mode", opt.llm_mode, "live|record|replay");
      cmd->add_option("--fixtures", opt.fixtures_path, "replay fixture directory");
      cmd->add_option("--prompts", opt.prompts_dir, "prompt template directory");
    }
  };

  CLI::App* validate = app.add_subcommand("validate", "validate scene/knowledge/agenda files");
  validate->add_option("--scene", opt.scene_path, "scene graph or snapshot sequence");
  validate->add_option("--knowledge", opt.knowledge_path, "knowledge document");
  validate->add_option("--agenda", opt.agenda_paths, "agenda files");

  CLI::App* predict = app.add_subcommand("predict", "predict next activities for every human");
  predict->add_option("--scene", opt.scene_path)->required();
  predict->add_option("--knowledge", opt.knowledge_path)->required();
  predict->add_option("--backend", opt.backend, "heuristic|llm");
  predict->add_option("--extractor", opt.extractor, "passthrough|llm");
  predict->add_option("--gamma", opt.gamma, "recency discount");
  predict->add_option("--max-candidates", opt.max_candidates);
  predict->add_option("--domain-name", opt.domain_name);
  add_common(predict);

  CLI::App* ground = app.add_subcommand("ground", "emit domain/problem PDDL");
  ground->add_option("--scene", opt.scene_path)->required();
  ground->add_option("--knowledge", opt.knowledge_path)->required();
  ground->add_option("--task", opt.task_path, "robot goal file");
  ground->add_option("--backend", opt.backend, "heuristic|llm");
  ground->add_option("--extractor", opt.extractor, "passthrough|llm");
  ground->add_option("--gamma", opt.gamma);
  ground->add_option("--max-candidates", opt.max_candidates);
  ground->add_option("--domain-name", opt.domain_name);
  ground->add_option("--problem-name", opt.problem_name);
  add_common(ground);

  CLI::App* planc = app.add_subcommand("plan", "solve a domain/problem pair");
  planc->add_option("--domain", domain_path)->required();
  planc->add_option("--problem", problem_path)->required();
  planc->add_option("--strategy", opt.strategy, "ucs|astar|gbfs");
  planc->add_option("--max-expansions", opt.max_expansions);
  planc->add_option("--seed", opt.seed);
  add_common(planc, false);

  CLI::App* simulate = app.add_subcommand("simulate", "execute a plan against agendas");
  simulate->add_option("--scene", opt.scene_path)->required();
  simulate->add_option("--domain", domain_path)->required();
  simulate->add_option("--problem", problem_path)->required();
  simulate->add_option("--plan", plan_path)->required();
  simulate->add_option("--agenda", opt.agenda_paths, "agenda files");
  add_common(simulate, false);

  CLI::App* pipeline = app.add_subcommand("pipeline", "full transform + solve + simulate");
  pipeline->add_option("--scene", opt.scene_path)->required();
  pipeline->add_option("--knowledge", opt.knowledge_path)->required();
  pipeline->add_option("--task", opt.task_path, "robot goal file");
  pipeline->add_option("--agenda", opt.agenda_paths, "agenda files");
  pipeline->add_option("--backend", opt.backend, "heuristic|llm");
  pipeline->add_option("--extractor", opt.extractor, "passthrough|llm");
  pipeline->add_option("--strategy", opt.strategy, "ucs|astar|gbfs");
  pipeline->add_option("--gamma", opt.gamma);
  pipeline->add_option("--max-candidates", opt.max_candidates);
  pipeline->add_option("--max-expansions", opt.max_expansions);
  pipeline->add_option("--seed", opt.seed);
  pipeline->add_option("--domain-name", opt.domain_name);
  pipeline->add_option("--problem-name", opt.problem_name);
  add_common(pipeline);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(opt);
    if (predict->parsed()) return cmd_predict(opt);
    if (ground->parsed()) return cmd_ground(opt);
    if (planc->parsed()) return cmd_plan(opt, domain_path, problem_path);
    if (simulate->parsed()) return cmd_simulate(opt, domain_path, problem_path, plan_path);
    if (pipeline->parsed()) return cmd_pipeline(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitOk;
}
