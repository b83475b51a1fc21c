#include "awareplan/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "awareplan/errors.hpp"
#include "awareplan/knowledge_base.hpp"

namespace awareplan {

std::vector<std::string> validate_distribution(const GoalDistribution& dist) {
  std::vector<std::string> out;
  if (dist.candidates.empty()) {
    out.push_back("distribution for '" + dist.human_id + "' has no candidates");
    return out;
  }
  double sum = 0.0;
  std::set<std::string> seen;
  for (const auto& c : dist.candidates) {
    if (c.goal.empty()) out.push_back("candidate with empty goal set");
    if (c.probability < 0.0 || c.probability > 1.0) {
      out.push_back("candidate probability " + std::to_string(c.probability) + " out of [0,1]");
    }
    if (!seen.insert(c.goal_text()).second) {
      out.push_back("duplicate goal set '" + c.goal_text() + "'");
    }
    sum += c.probability;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    out.push_back("probabilities sum to " + std::to_string(sum) + ", expected 1");
  }
  return out;
}

GoalDistribution renormalize(GoalDistribution raw) {
  if (raw.candidates.empty()) {
    throw DegenerateWeights("no candidates to normalize for '" + raw.human_id + "'");
  }
  double sum = 0.0;
  for (const auto& c : raw.candidates) {
    if (c.probability < 0.0) {
      throw DegenerateWeights("negative weight " + std::to_string(c.probability) + " for goal '" +
                              c.goal_text() + "'");
    }
    sum += c.probability;
  }
  if (sum <= 0.0) throw DegenerateWeights("all candidate weights are zero");
  for (auto& c : raw.candidates) c.probability /= sum;
  return raw;
}

const GoalCandidate& select_goal(const GoalDistribution& dist) {
  if (dist.candidates.empty()) throw DegenerateWeights("empty distribution");
  const GoalCandidate* best = &dist.candidates.front();
  for (const auto& c : dist.candidates) {
    if (c.probability > best->probability ||
        (c.probability == best->probability && c.goal_text() < best->goal_text())) {
      best = &c;
    }
  }
  return *best;
}

std::map<std::string, std::string> frame_object_types(const SceneGraph& frame) {
  std::map<std::string, std::string> types;
  for (const auto& [id, _] : frame.rooms) types[id] = "room";
  for (const auto& [id, _] : frame.items) types[id] = "item";
  for (const auto& [id, _] : frame.agents) types[id] = "agent";
  return types;
}

bool goal_covered(const std::vector<GroundLiteral>& goal, const DomainElements& domain,
                  const std::map<std::string, std::string>& object_types) {
  for (const auto& lit : goal) {
    const PredicateSignature* sig = domain.find_predicate(lit.predicate);
    if (sig == nullptr || sig->params.size() != lit.args.size()) return false;
    for (size_t i = 0; i < lit.args.size(); ++i) {
      auto obj = object_types.find(lit.args[i]);
      if (obj == object_types.end()) return false;
      if (!domain.types.is_subtype(obj->second, sig->params[i].type)) return false;
    }
    const bool producible = std::any_of(
        domain.actions.begin(), domain.actions.end(), [&](const ActionSchema& a) {
          return std::any_of(a.add_effects.begin(), a.add_effects.end(),
                             [&](const Literal& e) { return e.predicate == lit.predicate; });
        });
    // A goal already achievable only through init is fine when some action
    // can produce it; otherwise it must at least be declared and static.
    if (!producible) return false;
  }
  return true;
}

std::vector<GroundLiteral> parse_goal_text(const std::string& text) {
  std::vector<GroundLiteral> out;
  int depth = 0;
  std::string cur;
  for (char c : text) {
    if (c == '(') ++depth;
    if (depth > 0) cur += c;
    if (c == ')') {
      --depth;
      if (depth < 0) throw ParseError("unbalanced ')' in goal text '" + text + "'", 1, 1);
      if (depth == 0) {
        out.push_back(parse_ground_literal_text(cur));
        cur.clear();
      }
    }
  }
  if (depth != 0) throw ParseError("unbalanced '(' in goal text '" + text + "'", 1, 1);
  return out;
}

// ---------------------------------------------------------------------------
// Heuristic backend

HeuristicPredictor::HeuristicPredictor(std::map<std::string, std::string> goal_templates,
                                       double gamma, int max_candidates)
    : goal_templates_(std::move(goal_templates)), gamma_(gamma), max_candidates_(max_candidates) {
  if (gamma_ <= 0.0 || gamma_ > 1.0) throw Error("gamma must be in (0, 1]");
  if (max_candidates_ < 1) throw Error("max_candidates must be >= 1");
}

namespace {

std::string instantiate_template(const std::string& tmpl, const std::string& item,
                                 const std::string& room, const std::string& human) {
  std::string out = tmpl;
  for (const auto& [key, value] : std::map<std::string, std::string>{
           {"{item}", item}, {"{room}", room}, {"{human}", human}}) {
    size_t pos = 0;
    while ((pos = out.find(key, pos)) != std::string::npos) {
      out.replace(pos, key.size(), value);
      pos += value.size();
    }
  }
  return out;
}

GoalCandidate make_candidate(const std::string& human_id, const std::string& tmpl,
                             const ItemNode& item, double weight, std::string rationale) {
  GoalCandidate c;
  c.human_id = human_id;
  c.goal = parse_goal_text(instantiate_template(tmpl, item.id, item.parent_room, human_id));
  std::sort(c.goal.begin(), c.goal.end());
  if (c.goal.empty()) throw PredictionError("goal template for category '" + item.category +
                                            "' produced no literals");
  c.probability = weight;
  c.rationale = std::move(rationale);
  return c;
}

void mark_coverage(GoalDistribution& dist, const DomainElements& domain,
                   const std::map<std::string, std::string>& object_types) {
  for (auto& c : dist.candidates) c.uncovered = !goal_covered(c.goal, domain, object_types);
}

}  // namespace

GoalDistribution HeuristicPredictor::predict(const AgentNode& human,
                                             const InteractionHistory& history,
                                             const SceneGraph& frame,
                                             const DomainElements& domain) {
  GoalDistribution dist;
  dist.human_id = human.id;

  if (history.empty()) {
    // Uniform prior over goal templates of accessible items in the human's
    // current room.
    for (const auto& [id, item] : frame.items) {
      if (item.parent_room != human.parent_room || !item.accessible) continue;
      auto tmpl = goal_templates_.find(item.category);
      if (tmpl == goal_templates_.end()) continue;
      GoalCandidate candidate =
          make_candidate(human.id, tmpl->second, item, 1.0,
                         "uniform prior: accessible '" + id + "' in '" + human.parent_room + "'");
      const bool duplicate =
          std::any_of(dist.candidates.begin(), dist.candidates.end(),
                      [&](const GoalCandidate& c) { return c.goal == candidate.goal; });
      if (!duplicate) dist.candidates.push_back(std::move(candidate));
    }
    if (dist.candidates.empty()) {
      throw PredictionError("human '" + human.id +
                            "' has no history and no templated accessible items in room '" +
                            human.parent_room + "'");
    }
  } else {
    const int t_n = frame.timestep;
    struct CategoryScore {
      double score = 0.0;
      int latest_t = -1;
      std::string item_id;  // latest interacted item of this category
    };
    std::map<std::string, CategoryScore> scores;
    for (const auto& [t, item_id] : history.item_events) {
      const ItemNode* item = frame.find_item(item_id);
      if (item == nullptr) {
        throw PredictionError("history references item '" + item_id +
                              "' missing from the planning frame");
      }
      auto& entry = scores[item->category];
      entry.score += std::pow(gamma_, t_n - t);
      if (t > entry.latest_t || (t == entry.latest_t && item_id < entry.item_id)) {
        entry.latest_t = t;
        entry.item_id = item_id;
      }
    }
    for (const auto& [category, entry] : scores) {
      auto tmpl = goal_templates_.find(category);
      if (tmpl == goal_templates_.end()) continue;
      GoalCandidate candidate = make_candidate(
          human.id, tmpl->second, *frame.find_item(entry.item_id), entry.score,
          "recency-weighted score " + std::to_string(entry.score) + " for category '" + category +
              "'");
      // Two categories may instantiate to the same goal set; merge scores.
      bool merged = false;
      for (auto& existing : dist.candidates) {
        if (existing.goal == candidate.goal) {
          existing.probability += candidate.probability;
          merged = true;
          break;
        }
      }
      if (!merged) dist.candidates.push_back(std::move(candidate));
    }
    if (dist.candidates.empty()) {
      throw PredictionError("no goal template matches any interacted category for '" + human.id +
                            "'");
    }
  }

  std::stable_sort(dist.candidates.begin(), dist.candidates.end(),
                   [](const GoalCandidate& a, const GoalCandidate& b) {
                     if (a.probability != b.probability) return a.probability > b.probability;
                     return a.goal_text() < b.goal_text();
                   });
  if (static_cast<int>(dist.candidates.size()) > max_candidates_) {
    dist.candidates.resize(max_candidates_);
  }

  dist = renormalize(std::move(dist));
  mark_coverage(dist, domain, frame_object_types(frame));
  return dist;
}

// ---------------------------------------------------------------------------
// LLM backend

LlmPredictor::LlmPredictor(LlmGateway& gateway, PromptLibrary prompts, int max_candidates,
                           int max_retries)
    : gateway_(&gateway),
      prompts_(std::move(prompts)),
      max_candidates_(max_candidates),
      max_retries_(max_retries) {}

namespace {

std::string history_text(const InteractionHistory& history) {
  std::string out;
  for (const auto& [t, edge] : history.edge_events) {
    out += "t=" + std::to_string(t) + ": " + edge.source + " --" + edge.relation + "--> " +
           edge.target + "\n";
  }
  if (out.empty()) out = "(no observed interactions)\n";
  return out;
}

std::string scene_text(const AgentNode& human, const SceneGraph& frame) {
  std::string out = "human '" + human.id + "' is in room '" + human.parent_room + "'";
  if (human.current_action) out += ", currently: " + *human.current_action;
  out += "\nitems in that room:\n";
  for (const auto& [id, item] : frame.items) {
    if (item.parent_room != human.parent_room) continue;
    out += "- " + id + " (category " + item.category + ", " +
           (item.accessible ? "accessible" : "not accessible") + ")\n";
  }
  return out;
}

std::string predicates_text(const DomainElements& domain) {
  std::string out;
  for (const auto& p : domain.predicates) {
    out += "(" + p.name;
    for (const auto& param : p.params) out += " ?" + param.name + " - " + param.type;
    out += ")\n";
  }
  return out;
}

}  // namespace

GoalDistribution LlmPredictor::predict(const AgentNode& human, const InteractionHistory& history,
                                       const SceneGraph& frame, const DomainElements& domain) {
  CompletionRequest req;
  req.prompt = prompts_.render("predict_goals", {{"human", human.id},
                                                 {"scene", scene_text(human, frame)},
                                                 {"history", history_text(history)},
                                                 {"predicates", predicates_text(domain)},
                                                 {"max_candidates",
                                                  std::to_string(max_candidates_)}});
  req.max_retries = max_retries_;
  req.response_schema = {
      {"type", "object"},
      {"required", {"candidates"}},
      {"properties",
       {{"candidates",
         {{"type", "array"},
          {"minItems", 1},
          {"items",
           {{"type", "object"},
            {"required", {"goal", "weight"}},
            {"properties",
             {{"goal", {{"type", "string"}}},
              {"weight", {{"type", "number"}}},
              {"rationale", {{"type", "string"}}}}}}}}}}}};

  GoalDistribution dist;
  auto check = [&](const Json& reply) -> std::vector<std::string> {
    GoalDistribution parsed;
    parsed.human_id = human.id;
    try {
      for (const auto& entry : reply["candidates"]) {
        GoalCandidate c;
        c.human_id = human.id;
        c.goal = parse_goal_text(entry["goal"].get<std::string>());
        std::sort(c.goal.begin(), c.goal.end());
        if (c.goal.empty()) return {"candidate goal '" + entry["goal"].get<std::string>() +
                                    "' contains no literals"};
        c.probability = entry["weight"].get<double>();
        c.rationale = entry.value("rationale", "");
        // Merge duplicate goal sets by summing their weights.
        bool merged = false;
        for (auto& existing : parsed.candidates) {
          if (existing.goal == c.goal) {
            existing.probability += c.probability;
            merged = true;
            break;
          }
        }
        if (!merged) parsed.candidates.push_back(std::move(c));
      }
      if (static_cast<int>(parsed.candidates.size()) > max_candidates_) {
        parsed.candidates.resize(max_candidates_);
      }
      parsed = renormalize(std::move(parsed));
    } catch (const Error& e) {
      return {e.what()};
    }
    dist = std::move(parsed);
    return {};
  };

  auto [reply, errors] = complete_with_semantic_check(*gateway_, req, check);
  (void)reply;
  if (!errors.empty()) {
    std::string joined;
    for (const auto& e : errors) joined += (joined.empty() ? "" : "; ") + e;
    throw PredictionError("llm prediction failed validation: " + joined);
  }
  mark_coverage(dist, domain, frame_object_types(frame));
  return dist;
}

// ---------------------------------------------------------------------------
// Synthesis

SynthesisResult NoSynthesis::synthesize(const std::vector<GoalCandidate>& uncovered,
                                        const DomainElements& domain,
                                        const std::map<std::string, std::string>& object_types) {
  (void)domain;
  (void)object_types;
  std::string goals;
  for (const auto& c : uncovered) goals += (goals.empty() ? "" : ", ") + c.goal_text();
  throw UncoveredGoalWithoutSynthesis(
      "the deterministic backend cannot synthesize elements for uncovered goals: " + goals);
}

LlmSynthesizer::LlmSynthesizer(LlmGateway& gateway, PromptLibrary prompts, int max_retries)
    : gateway_(&gateway), prompts_(std::move(prompts)), max_retries_(max_retries) {}

SynthesisResult LlmSynthesizer::synthesize(const std::vector<GoalCandidate>& uncovered,
                                           const DomainElements& domain,
                                           const std::map<std::string, std::string>& object_types) {
  std::string goals;
  for (const auto& c : uncovered) goals += "- " + c.goal_text() + "\n";
  std::string types;
  for (const auto& [type, parent] : domain.types.parent) types += type + " - " + parent + "\n";

  CompletionRequest req;
  req.prompt = prompts_.render("synthesize_elements", {{"goals", goals},
                                                       {"types", types},
                                                       {"predicates", predicates_text(domain)}});
  req.max_retries = max_retries_;
  req.response_schema = {{"type", "object"},
                         {"required", {"predicates", "actions"}},
                         {"properties",
                          {{"predicates", {{"type", "array"}}},
                           {"actions", {{"type", "array"}}}}}};

  SynthesisResult result;
  auto check = [&](const Json& reply) -> std::vector<std::string> {
    try {
      Json doc = {{"predicates", reply["predicates"]}, {"actions", reply["actions"]}};
      DomainElements extension = [&] {
        // Parse against the merged domain so new actions may use existing
        // predicates and types.
        Json merged_doc = domain_elements_to_json(domain);
        for (const auto& p : doc["predicates"]) merged_doc["predicates"].push_back(p);
        for (const auto& a : doc["actions"]) merged_doc["actions"].push_back(a);
        return domain_elements_from_json(merged_doc, "synthesized domain");
      }();
      std::vector<std::string> errors;
      for (const auto& c : uncovered) {
        if (!goal_covered(c.goal, extension, object_types)) {
          errors.push_back("goal '" + c.goal_text() + "' is still not covered");
        }
      }
      if (!errors.empty()) return errors;
      // Keep only the newly added elements.
      SynthesisResult r;
      for (const auto& p : extension.predicates) {
        if (domain.find_predicate(p.name) == nullptr) r.predicates.push_back(p);
      }
      for (const auto& a : extension.actions) {
        if (domain.find_action(a.name) == nullptr) r.actions.push_back(a);
      }
      result = std::move(r);
      return {};
    } catch (const Error& e) {
      return {e.what()};
    }
  };

  auto [reply, errors] = complete_with_semantic_check(*gateway_, req, check);
  (void)reply;
  if (!errors.empty()) {
    std::string joined;
    for (const auto& e : errors) joined += (joined.empty() ? "" : "; ") + e;
    throw SynthesisInvalid("synthesized elements failed validation: " + joined);
  }
  return result;
}

SynthesisResult synthesize_missing_elements(const GoalDistribution& dist,
                                            const DomainElements& domain,
                                            const std::map<std::string, std::string>& object_types,
                                            SynthesisBackend& backend) {
  std::vector<GoalCandidate> uncovered;
  for (const auto& c : dist.candidates) {
    if (c.uncovered) uncovered.push_back(c);
  }
  if (uncovered.empty()) return {};
  return backend.synthesize(uncovered, domain, object_types);
}

}  // namespace awareplan
