#include "awareplan/knowledge_base.hpp"

#include <algorithm>

#include "awareplan/errors.hpp"

namespace awareplan {

namespace {

std::vector<Param> params_from_json(const Json& arr, const std::string& ctx) {
  if (!arr.is_array()) throw SchemaError(ctx + ": 'params' must be an array");
  std::vector<Param> params;
  for (const auto& p : arr) {
    check_keys(p, ctx + " params[]", {"name", "type"}, {});
    std::string name = get_string(p, "name", ctx);
    if (!name.empty() && name[0] == '?') name.erase(name.begin());
    params.push_back({name, get_string(p, "type", ctx)});
  }
  return params;
}

std::vector<Literal> literals_from_json(const Json& obj, const std::string& key,
                                        const std::string& ctx) {
  std::vector<Literal> out;
  if (!obj.contains(key)) return out;
  for (const auto& entry : get_array(obj, key, ctx)) {
    if (!entry.is_string()) throw SchemaError(ctx + ": '" + key + "' entries must be strings");
    out.push_back(parse_literal_text(entry.get<std::string>()));
  }
  return out;
}

void throw_classified(const std::vector<std::string>& violations, const std::string& ctx) {
  if (violations.empty()) return;
  std::string joined;
  for (const auto& v : violations) joined += (joined.empty() ? "" : "; ") + v;
  for (const auto& v : violations) {
    if (v.find("type cycle") != std::string::npos) throw TypeCycle(ctx + ": " + joined);
  }
  for (const auto& v : violations) {
    if (v.find("undeclared predicate") != std::string::npos) {
      throw UndeclaredPredicate(ctx + ": " + joined);
    }
  }
  throw SchemaError(ctx + ": " + joined);
}

}  // namespace

DomainElements domain_elements_from_json(const Json& doc, const std::string& ctx) {
  DomainElements elements;

  if (doc.contains("types")) {
    require_object(doc["types"], ctx + " types");
    for (const auto& [type, parent] : doc["types"].items()) {
      if (!parent.is_string()) throw SchemaError(ctx + ": type parents must be strings");
      elements.types.parent[type] = parent.get<std::string>();
    }
  }

  if (doc.contains("predicates")) {
    for (const auto& p : get_array(doc, "predicates", ctx)) {
      check_keys(p, ctx + " predicates[]", {"name", "params"}, {});
      elements.predicates.push_back(
          {get_string(p, "name", ctx), params_from_json(p["params"], ctx)});
    }
  }

  if (doc.contains("actions")) {
    for (const auto& a : get_array(doc, "actions", ctx)) {
      check_keys(a, ctx + " actions[]", {"name", "params"}, {"pre", "add", "del"});
      ActionSchema schema;
      schema.name = get_string(a, "name", ctx);
      schema.params = params_from_json(a["params"], ctx);
      schema.preconditions = literals_from_json(a, "pre", ctx);
      schema.add_effects = literals_from_json(a, "add", ctx);
      schema.del_effects = literals_from_json(a, "del", ctx);
      elements.actions.push_back(std::move(schema));
    }
  }

  throw_classified(validate_domain_elements(elements), ctx);
  return elements;
}

Json domain_elements_to_json(const DomainElements& elements) {
  Json doc;
  doc["types"] = Json::object();
  for (const auto& [type, parent] : elements.types.parent) doc["types"][type] = parent;
  doc["predicates"] = Json::array();
  for (const auto& p : elements.predicates) {
    Json params = Json::array();
    for (const auto& param : p.params) params.push_back({{"name", param.name}, {"type", param.type}});
    doc["predicates"].push_back({{"name", p.name}, {"params", std::move(params)}});
  }
  doc["actions"] = Json::array();
  for (const auto& a : elements.actions) {
    Json params = Json::array();
    for (const auto& param : a.params) params.push_back({{"name", param.name}, {"type", param.type}});
    auto texts = [](const std::vector<Literal>& lits) {
      Json arr = Json::array();
      for (const auto& l : lits) arr.push_back(l.text());
      return arr;
    };
    doc["actions"].push_back({{"name", a.name},
                              {"params", std::move(params)},
                              {"pre", texts(a.preconditions)},
                              {"add", texts(a.add_effects)},
                              {"del", texts(a.del_effects)}});
  }
  return doc;
}

KnowledgeBase load_knowledge(const std::string& json_text) {
  Json doc = parse_json_text(json_text, "knowledge document");
  const std::string ctx = "knowledge document";
  check_keys(doc, ctx, {"name"},
             {"types", "predicates", "actions", "narrative", "goal_templates"});

  KnowledgeBase kb;
  kb.bundle.name = get_string(doc, "name", ctx);
  kb.bundle.has_structured =
      doc.contains("types") || doc.contains("predicates") || doc.contains("actions");
  if (kb.bundle.has_structured) {
    kb.bundle.structured = domain_elements_from_json(doc, ctx);
  }
  if (doc.contains("narrative")) {
    require_object(doc["narrative"], ctx + " narrative");
    for (const auto& [topic, text] : doc["narrative"].items()) {
      if (!text.is_string()) throw SchemaError(ctx + ": narrative passages must be strings");
      kb.bundle.narrative[topic] = text.get<std::string>();
    }
  }
  if (doc.contains("goal_templates")) {
    require_object(doc["goal_templates"], ctx + " goal_templates");
    for (const auto& [category, tmpl] : doc["goal_templates"].items()) {
      if (!tmpl.is_string()) throw SchemaError(ctx + ": goal templates must be strings");
      kb.bundle.goal_templates[category] = tmpl.get<std::string>();
    }
  }
  return kb;
}

KnowledgeBase load_knowledge_file(const std::string& path) {
  try {
    return load_knowledge(read_text_file(path));
  } catch (const Error& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

const KnowledgeBundle& get_knowledge(const KnowledgeBase& kb, const std::string& domain_name) {
  if (kb.bundle.name != domain_name) {
    throw UnknownDomain("knowledge base holds domain '" + kb.bundle.name + "', not '" +
                        domain_name + "'");
  }
  return kb.bundle;
}

// ---------------------------------------------------------------------------
// Extraction

DomainElements PassthroughExtractor::extract(const KnowledgeBundle& bundle) {
  if (!bundle.has_structured) {
    throw EmptySource("passthrough extraction needs a structured knowledge section");
  }
  return bundle.structured;
}

LlmExtractor::LlmExtractor(LlmGateway& gateway, PromptLibrary prompts, int max_retries)
    : gateway_(&gateway), prompts_(std::move(prompts)), max_retries_(max_retries) {}

DomainElements LlmExtractor::extract(const KnowledgeBundle& bundle) {
  if (bundle.narrative.empty()) {
    throw EmptySource("llm extraction needs a narrative knowledge section");
  }

  std::string narrative;
  for (const auto& [topic, text] : bundle.narrative) {
    narrative += "## " + topic + "\n" + text + "\n";
  }

  CompletionRequest req;
  req.prompt = prompts_.render("extract_domain", {{"domain", bundle.name},
                                                  {"narrative", narrative}});
  req.max_retries = max_retries_;
  req.response_schema = {
      {"type", "object"},
      {"required", {"types", "predicates", "actions"}},
      {"properties",
       {{"types", {{"type", "object"}}},
        {"predicates", {{"type", "array"}}},
        {"actions", {{"type", "array"}}}}}};

  DomainElements extracted;
  auto check = [&](const Json& reply) -> std::vector<std::string> {
    try {
      extracted = domain_elements_from_json(reply, "extracted domain");
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
    throw ExtractionInvalid("extracted domain failed validation: " + joined);
  }
  return extracted;
}

}  // namespace awareplan
