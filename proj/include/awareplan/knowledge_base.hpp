#pragma once

#include <map>
#include <string>

#include "awareplan/domain_model.hpp"
#include "awareplan/json_util.hpp"
#include "awareplan/llm_gateway.hpp"
#include "awareplan/prompts.hpp"

namespace awareplan {

// Domain knowledge for one planning domain: a structured section (types,
// predicate signatures, action schemas), a natural-language section for LLM
// extraction, and the affordance-to-goal template table the predictor uses.
struct KnowledgeBundle {
  std::string name;
  bool has_structured = false;
  DomainElements structured;
  std::map<std::string, std::string> narrative;       // topic -> passage
  std::map<std::string, std::string> goal_templates;  // item category -> literal template
};

// Immutable after load; shareable across readers.
struct KnowledgeBase {
  KnowledgeBundle bundle;
};

KnowledgeBase load_knowledge(const std::string& json_text);
KnowledgeBase load_knowledge_file(const std::string& path);

const KnowledgeBundle& get_knowledge(const KnowledgeBase& kb, const std::string& domain_name);

// Shared decoder for the structured section; also validates the result.
// Used by the loader, the LLM extraction path and the synthesis path so all
// three accept exactly the same shape.
DomainElements domain_elements_from_json(const Json& doc, const std::string& context);
Json domain_elements_to_json(const DomainElements& elements);

class Extractor {
 public:
  virtual ~Extractor() = default;
  virtual DomainElements extract(const KnowledgeBundle& bundle) = 0;
};

// Identity on the structured section; requires it to be non-empty.
class PassthroughExtractor final : public Extractor {
 public:
  DomainElements extract(const KnowledgeBundle& bundle) override;
};

// Extracts object types, predicates and action schemas from the narrative
// section via the gateway; replies are re-validated exactly like loaded
// documents.
class LlmExtractor final : public Extractor {
 public:
  LlmExtractor(LlmGateway& gateway, PromptLibrary prompts, int max_retries = 2);
  DomainElements extract(const KnowledgeBundle& bundle) override;

 private:
  LlmGateway* gateway_;
  PromptLibrary prompts_;
  int max_retries_;
};

}  // namespace awareplan
