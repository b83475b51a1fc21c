// Regenerates the canned LLM replay fixtures under fixtures/llm/ by running
// the llm-backed paths in record mode against a scripted transport. Run this
// whenever a prompt template, the knowledge narrative, or a fixture scene
// changes, so the recorded fingerprints stay in sync.

#include <iostream>

#include <CLI11.hpp>

#include "awareplan/errors.hpp"
#include "awareplan/grounding.hpp"
#include "awareplan/knowledge_base.hpp"
#include "awareplan/llm_gateway.hpp"
#include "awareplan/predictor.hpp"
#include "awareplan/prompts.hpp"
#include "awareplan/scene_graph.hpp"

using namespace awareplan;

namespace {

Json synth_prediction_reply() {
  return {{"candidates",
           Json::array(
               {{{"goal", "(watered plant1)"},
                 {"weight", 0.7},
                 {"rationale", "h1 has stayed next to plant1; watering it is the likely chore"}},
                {{"goal", "(used sink1)"},
                 {"weight", 0.3},
                 {"rationale", "fetching water from the sink is a plausible follow-up"}}})}};
}

Json synth_synthesis_reply() {
  return {{"predicates",
           Json::array({{{"name", "watered"},
                         {"params", Json::array({{{"name", "i"}, {"type", "item"}}})}}})},
          {"actions",
           Json::array({{{"name", "water"},
                         {"params", Json::array({{{"name", "a"}, {"type", "agent"}},
                                                 {{"name", "i"}, {"type", "item"}},
                                                 {{"name", "r"}, {"type", "room"}}})},
                         {"pre", Json::array({"(human ?a)", "(at-agent ?a ?r)", "(at ?i ?r)",
                                              "(accessible ?i)"})},
                         {"add", Json::array({"(watered ?i)"})},
                         {"del", Json::array()}}})}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"awareplan-fixturegen: record the canned LLM replay fixtures"};
  std::string knowledge_path = "fixtures/household.kb.json";
  std::string scene_path = "fixtures/synth.seq.json";
  std::string prompts_dir = "fixtures/prompts";
  std::string out_dir = "fixtures/llm";
  app.add_option("--knowledge", knowledge_path);
  app.add_option("--scene", scene_path, "uncovered-goal snapshot sequence");
  app.add_option("--prompts", prompts_dir);
  app.add_option("--out", out_dir);
  CLI11_PARSE(app, argc, argv);

  try {
    const KnowledgeBase kb = load_knowledge_file(knowledge_path);
    const SnapshotSequence seq = load_snapshot_sequence_file(scene_path);
    const std::string extraction_reply = domain_elements_to_json(kb.bundle.structured).dump();

    Transport scripted = [&](const GatewayConfig&, const CompletionRequest&,
                             const std::string& prompt) -> std::string {
      if (prompt.rfind("You are given household domain knowledge", 0) == 0) {
        return extraction_reply;
      }
      if (prompt.rfind("Predict the next activity", 0) == 0) {
        return synth_prediction_reply().dump();
      }
      if (prompt.rfind("These predicted human goals", 0) == 0) {
        return synth_synthesis_reply().dump();
      }
      throw TransportError("no scripted reply for this prompt");
    };

    GatewayConfig config;
    config.mode = LlmMode::record;
    config.fixtures_path = out_dir;
    LlmGateway gateway(config, scripted);
    PromptLibrary prompts(prompts_dir);

    // Extraction fixture for the knowledge narrative.
    LlmExtractor extractor(gateway, prompts);
    extractor.extract(kb.bundle);

    // Prediction + synthesis fixtures for the uncovered-goal scene.
    PassthroughExtractor passthrough;
    LlmPredictor predictor(gateway, prompts);
    LlmSynthesizer synthesizer(gateway, prompts);
    TransformOptions options;
    options.domain_name = kb.bundle.name;
    options.problem_name = "synth";
    options.robot_goal = {{"at-agent", {get_robot_node(seq.latest()).id, "garden"}}};
    transform(kb, seq, passthrough, predictor, synthesizer, options);

    std::cout << "recorded fixtures in " << out_dir << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
