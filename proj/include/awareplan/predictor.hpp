#pragma once

#include <map>
#include <string>
#include <vector>

#include "awareplan/domain_model.hpp"
#include "awareplan/llm_gateway.hpp"
#include "awareplan/prompts.hpp"
#include "awareplan/scene_graph.hpp"

namespace awareplan {

// Next-activity prediction: a distribution over candidate goal states per
// human, plus synthesis of missing predicates/actions when a predicted goal
// is not expressible in the current domain.

struct GoalCandidate {
  std::string human_id;
  std::vector<GroundLiteral> goal;  // non-empty, kept sorted
  double probability = 0.0;
  std::string rationale;
  bool uncovered = false;

  std::string goal_text() const { return canonical_goal_text(goal); }
};

struct GoalDistribution {
  std::string human_id;
  std::vector<GoalCandidate> candidates;  // M >= 1, probabilities sum to 1
};

// Checks M >= 1, probability bounds, sum within 1e-9 of 1, non-empty and
// pairwise distinct goal sets. Empty result means valid.
std::vector<std::string> validate_distribution(const GoalDistribution& dist);

// Normalizes candidate weights into probabilities, order preserved. Throws
// DegenerateWeights when any weight is negative or all are zero.
GoalDistribution renormalize(GoalDistribution raw);

// Highest-probability candidate; ties break toward the lexicographically
// smallest canonical goal text.
const GoalCandidate& select_goal(const GoalDistribution& dist);

// Object id -> type (agent/room/item) for the planning frame.
std::map<std::string, std::string> frame_object_types(const SceneGraph& frame);

// A goal is covered when every literal uses a declared predicate with
// type-correct arguments and some action's add effects can produce it.
bool goal_covered(const std::vector<GroundLiteral>& goal, const DomainElements& domain,
                  const std::map<std::string, std::string>& object_types);

// Splits "(a x) (b y)" into ground literals.
std::vector<GroundLiteral> parse_goal_text(const std::string& text);

class PredictorBackend {
 public:
  virtual ~PredictorBackend() = default;
  virtual GoalDistribution predict(const AgentNode& human, const InteractionHistory& history,
                                   const SceneGraph& frame, const DomainElements& domain) = 0;
};

// Deterministic recency-weighted frequency over interacted item categories.
// score(category) = sum over item events (t, i) with category(i) = category
// of gamma^(t_n - t); each scored category maps to a goal through the
// knowledge document's goal-template table with {item}/{room}/{human}
// placeholders. Empty history falls back to a uniform prior over templates
// of accessible items in the human's current room.
class HeuristicPredictor final : public PredictorBackend {
 public:
  explicit HeuristicPredictor(std::map<std::string, std::string> goal_templates,
                              double gamma = 0.5, int max_candidates = 5);

  GoalDistribution predict(const AgentNode& human, const InteractionHistory& history,
                           const SceneGraph& frame, const DomainElements& domain) override;

 private:
  std::map<std::string, std::string> goal_templates_;
  double gamma_;
  int max_candidates_;
};

// Serializes scene context and history into a prompt; replies carry goal
// literals with raw weights, which are renormalized.
class LlmPredictor final : public PredictorBackend {
 public:
  LlmPredictor(LlmGateway& gateway, PromptLibrary prompts, int max_candidates = 5,
               int max_retries = 2);

  GoalDistribution predict(const AgentNode& human, const InteractionHistory& history,
                           const SceneGraph& frame, const DomainElements& domain) override;

 private:
  LlmGateway* gateway_;
  PromptLibrary prompts_;
  int max_candidates_;
  int max_retries_;
};

struct SynthesisResult {
  std::vector<PredicateSignature> predicates;
  std::vector<ActionSchema> actions;

  bool empty() const { return predicates.empty() && actions.empty(); }
};

class SynthesisBackend {
 public:
  virtual ~SynthesisBackend() = default;
  virtual SynthesisResult synthesize(const std::vector<GoalCandidate>& uncovered,
                                     const DomainElements& domain,
                                     const std::map<std::string, std::string>& object_types) = 0;
};

// Deterministic stand-in that cannot invent anything.
class NoSynthesis final : public SynthesisBackend {
 public:
  SynthesisResult synthesize(const std::vector<GoalCandidate>& uncovered,
                             const DomainElements& domain,
                             const std::map<std::string, std::string>& object_types) override;
};

class LlmSynthesizer final : public SynthesisBackend {
 public:
  LlmSynthesizer(LlmGateway& gateway, PromptLibrary prompts, int max_retries = 2);

  SynthesisResult synthesize(const std::vector<GoalCandidate>& uncovered,
                             const DomainElements& domain,
                             const std::map<std::string, std::string>& object_types) override;

 private:
  LlmGateway* gateway_;
  PromptLibrary prompts_;
  int max_retries_;
};

// No-op with empty result when nothing is uncovered; otherwise asks the
// backend for predicates/actions that make every uncovered goal expressible
// and producible. The returned elements already passed domain validation
// against `domain` extended with them.
SynthesisResult synthesize_missing_elements(const GoalDistribution& dist,
                                            const DomainElements& domain,
                                            const std::map<std::string, std::string>& object_types,
                                            SynthesisBackend& backend);

}  // namespace awareplan
