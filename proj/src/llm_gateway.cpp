#include "awareplan/llm_gateway.hpp"

#include <cstdint>
#include <cstdlib>
#include <filesystem>

#include <httplib.h>

#include "awareplan/errors.hpp"

namespace awareplan {

LlmMode parse_llm_mode(const std::string& text) {
  if (text == "live") return LlmMode::live;
  if (text == "record") return LlmMode::record;
  if (text == "replay") return LlmMode::replay;
  throw SchemaError("unknown llm mode '" + text + "' (expected live|record|replay)");
}

std::string to_string(LlmMode mode) {
  switch (mode) {
    case LlmMode::live: return "live";
    case LlmMode::record: return "record";
    case LlmMode::replay: return "replay";
  }
  return "replay";
}

GatewayConfig config_from_env(GatewayConfig base) {
  if (const char* v = std::getenv("LLM_BASE_URL")) base.base_url = v;
  if (const char* v = std::getenv("LLM_MODEL")) base.model = v;
  if (const char* v = std::getenv("LLM_API_KEY")) base.api_key = v;
  if (const char* v = std::getenv("LLM_MODE")) base.mode = parse_llm_mode(v);
  if (const char* v = std::getenv("LLM_FIXTURES_PATH")) base.fixtures_path = v;
  return base;
}

// ---------------------------------------------------------------------------
// Schema validation

std::vector<std::string> validate_against_schema(const Json& schema, const Json& value,
                                                 const std::string& path) {
  std::vector<std::string> errors;
  if (!schema.is_object()) {
    errors.push_back(path + ": schema node must be an object");
    return errors;
  }

  if (schema.contains("enum")) {
    for (const auto& allowed : schema["enum"]) {
      if (value == allowed) return errors;
    }
    errors.push_back(path + ": value " + value.dump() + " not in enum " + schema["enum"].dump());
    return errors;
  }

  const std::string type = schema.value("type", "");
  if (type == "object") {
    if (!value.is_object()) {
      errors.push_back(path + ": expected object, got " + std::string(value.type_name()));
      return errors;
    }
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!value.contains(key.get<std::string>())) {
          errors.push_back(path + ": missing required field '" + key.get<std::string>() + "'");
        }
      }
    }
    if (schema.contains("properties")) {
      for (const auto& [key, sub] : schema["properties"].items()) {
        if (value.contains(key)) {
          auto sub_errors = validate_against_schema(sub, value[key], path + "." + key);
          errors.insert(errors.end(), sub_errors.begin(), sub_errors.end());
        }
      }
    }
  } else if (type == "array") {
    if (!value.is_array()) {
      errors.push_back(path + ": expected array, got " + std::string(value.type_name()));
      return errors;
    }
    if (schema.contains("minItems") && value.size() < schema["minItems"].get<size_t>()) {
      errors.push_back(path + ": expected at least " + schema["minItems"].dump() + " items, got " +
                       std::to_string(value.size()));
    }
    if (schema.contains("items")) {
      for (size_t i = 0; i < value.size(); ++i) {
        auto sub_errors = validate_against_schema(schema["items"], value[i],
                                                  path + "[" + std::to_string(i) + "]");
        errors.insert(errors.end(), sub_errors.begin(), sub_errors.end());
      }
    }
  } else if (type == "string") {
    if (!value.is_string()) errors.push_back(path + ": expected string");
  } else if (type == "number") {
    if (!value.is_number()) errors.push_back(path + ": expected number");
  } else if (type == "integer") {
    if (!value.is_number_integer()) errors.push_back(path + ": expected integer");
  } else if (type == "boolean") {
    if (!value.is_boolean()) errors.push_back(path + ": expected boolean");
  } else if (!type.empty()) {
    errors.push_back(path + ": unknown schema type '" + type + "'");
  }
  return errors;
}

// ---------------------------------------------------------------------------
// Fingerprint and store

namespace {

std::string fnv1a64_hex(const std::string& data) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

}  // namespace

std::string request_fingerprint(const std::string& prompt, const Json& response_schema) {
  // nlohmann objects are key-sorted, so dump() is canonical.
  return fnv1a64_hex(prompt + '\x1f' + response_schema.dump());
}

ReplayStore::ReplayStore(std::string dir) : dir_(std::move(dir)) {
  if (dir_.empty() || !std::filesystem::exists(dir_)) return;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    Json fixture = parse_json_file(entry.path().string());
    if (!fixture.is_object() || !fixture.contains("reply")) {
      throw SchemaError("replay fixture '" + entry.path().string() + "' has no 'reply' field");
    }
    entries_[entry.path().stem().string()] = fixture["reply"].get<std::string>();
  }
}

std::optional<std::string> ReplayStore::lookup(const std::string& fingerprint) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(fingerprint);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ReplayStore::record(const std::string& fingerprint, const std::string& prompt,
                         const Json& schema, const std::string& reply) {
  std::unique_lock lock(mutex_);
  if (entries_.count(fingerprint) > 0) return;  // at most once per fingerprint
  entries_[fingerprint] = reply;
  if (dir_.empty()) return;
  std::filesystem::create_directories(dir_);
  Json fixture = {{"prompt", prompt}, {"schema", schema}, {"reply", reply}};
  write_text_file((std::filesystem::path(dir_) / (fingerprint + ".json")).string(),
                  fixture.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Transport

namespace {

struct UrlParts {
  std::string host_port;  // scheme://host[:port]
  std::string path;       // possibly empty prefix
};

UrlParts split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw TransportError("LLM base url '" + url + "' has no scheme");
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, ""};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::string http_chat_transport(const GatewayConfig& config, const CompletionRequest& req,
                                const std::string& prompt) {
  if (config.base_url.empty()) throw TransportError("no LLM endpoint configured (LLM_BASE_URL)");
  const UrlParts url = split_url(config.base_url);

  httplib::Client client(url.host_port);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(120, 0);
  httplib::Headers headers;
  if (!config.api_key.empty()) headers.emplace("Authorization", "Bearer " + config.api_key);

  Json body = {{"model", config.model},
               {"temperature", req.temperature},
               {"messages", Json::array({{{"role", "user"}, {"content", prompt}}})}};

  auto res = client.Post(url.path + "/chat/completions", headers, body.dump(),
                         "application/json");
  if (!res) {
    throw TransportError("LLM request to '" + config.base_url +
                         "' failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw TransportError("LLM request returned HTTP " + std::to_string(res->status) + ": " +
                         res->body);
  }
  Json reply = parse_json_text(res->body, "LLM response");
  if (!reply.contains("choices") || !reply["choices"].is_array() || reply["choices"].empty() ||
      !reply["choices"][0].contains("message") ||
      !reply["choices"][0]["message"].contains("content") ||
      !reply["choices"][0]["message"]["content"].is_string()) {
    throw TransportError("LLM response has no choices[0].message.content");
  }
  return reply["choices"][0]["message"]["content"].get<std::string>();
}

// ---------------------------------------------------------------------------
// Gateway

LlmGateway::LlmGateway(GatewayConfig config, Transport transport)
    : config_(std::move(config)),
      transport_(transport ? std::move(transport) : http_chat_transport),
      store_(config_.fixtures_path) {}

Json LlmGateway::complete_structured(const CompletionRequest& req) {
  if (req.prompt.empty()) throw SchemaError("completion request has an empty prompt");
  if (req.max_retries < 0) throw SchemaError("max_retries must be >= 0");

  long spent_tokens = 0;
  std::string prompt = req.prompt;
  std::vector<std::string> last_errors;

  for (int attempt = 0; attempt <= req.max_retries; ++attempt) {
    // Coarse token accounting: ~4 chars per token.
    spent_tokens += static_cast<long>(prompt.size() / 4) + 1;
    if (req.budget_tokens > 0 && spent_tokens > req.budget_tokens) {
      throw BudgetExceeded("token budget " + std::to_string(req.budget_tokens) +
                           " exceeded after " + std::to_string(attempt) + " attempts");
    }

    const std::string fingerprint = request_fingerprint(prompt, req.response_schema);
    std::string raw;
    switch (config_.mode) {
      case LlmMode::replay: {
        auto hit = store_.lookup(fingerprint);
        if (!hit) {
          throw ReplayMiss("no recorded reply for fingerprint " + fingerprint +
                           (store_.dir().empty() ? " (no fixtures path configured)"
                                                 : " in '" + store_.dir() + "'"));
        }
        raw = *hit;
        break;
      }
      case LlmMode::record: {
        auto hit = store_.lookup(fingerprint);
        if (hit) {
          raw = *hit;
        } else {
          raw = transport_(config_, req, prompt);
          store_.record(fingerprint, prompt, req.response_schema, raw);
        }
        break;
      }
      case LlmMode::live:
        raw = transport_(config_, req, prompt);
        break;
    }

    Json parsed = Json::parse(raw, nullptr, false);
    if (parsed.is_discarded()) {
      last_errors = {"reply is not valid JSON"};
    } else {
      last_errors = validate_against_schema(req.response_schema, parsed);
      if (last_errors.empty()) return parsed;
    }

    std::string issues;
    for (const auto& e : last_errors) issues += "\n- " + e;
    prompt = req.prompt +
             "\n\nYour previous reply was rejected for these reasons:" + issues +
             "\nReply again with JSON that satisfies the schema, and nothing else.";
  }

  std::string joined;
  for (const auto& e : last_errors) joined += (joined.empty() ? "" : "; ") + e;
  throw SchemaViolation("reply failed schema validation after " +
                        std::to_string(req.max_retries + 1) + " attempts: " + joined);
}

std::pair<Json, std::vector<std::string>> complete_with_semantic_check(
    LlmGateway& gateway, CompletionRequest req,
    const std::function<std::vector<std::string>(const Json&)>& check) {
  const std::string base_prompt = req.prompt;
  Json reply;
  std::vector<std::string> errors;
  for (int round = 0; round <= req.max_retries; ++round) {
    reply = gateway.complete_structured(req);
    errors = check(reply);
    if (errors.empty()) return {reply, errors};
    std::string issues;
    for (const auto& e : errors) issues += "\n- " + e;
    req.prompt = base_prompt +
                 "\n\nYour previous reply was structurally valid but semantically wrong:" +
                 issues + "\nReply again with corrected JSON, and nothing else.";
  }
  return {reply, errors};
}

}  // namespace awareplan
