#pragma once

#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>

#include "awareplan/json_util.hpp"

namespace awareplan {

enum class LlmMode { live, record, replay };

LlmMode parse_llm_mode(const std::string& text);
std::string to_string(LlmMode mode);

struct GatewayConfig {
  std::string base_url;       // chat-completions endpoint base, e.g. http://host:port/v1
  std::string model;
  std::string api_key;
  LlmMode mode = LlmMode::replay;
  std::string fixtures_path;  // directory holding one JSON file per fingerprint
};

// Applies LLM_BASE_URL, LLM_MODEL, LLM_API_KEY, LLM_MODE, LLM_FIXTURES_PATH
// environment overrides on top of `base`.
GatewayConfig config_from_env(GatewayConfig base = {});

struct CompletionRequest {
  std::string prompt;
  Json response_schema;  // structural description, see validate_against_schema
  double temperature = 0.0;
  int max_retries = 2;
  long budget_tokens = 0;  // 0 = no budget
};

// Minimal structural validator for LLM replies: type/object/array/enum with
// required fields. Returns one message per violation; empty means valid.
std::vector<std::string> validate_against_schema(const Json& schema, const Json& value,
                                                 const std::string& path = "$");

// Stable fingerprint of prompt + schema; invariant under reordering of
// schema-description keys.
std::string request_fingerprint(const std::string& prompt, const Json& response_schema);

// On-disk store of recorded replies, one JSON file per fingerprint. Lookups
// are read-concurrent; record-mode writes are serialized and happen at most
// once per fingerprint.
class ReplayStore {
 public:
  ReplayStore() = default;
  explicit ReplayStore(std::string dir);

  std::optional<std::string> lookup(const std::string& fingerprint) const;
  void record(const std::string& fingerprint, const std::string& prompt, const Json& schema,
              const std::string& reply);
  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::string> entries_;
};

// Transport returns the raw completion content for a prompt. The default is
// an HTTP chat-completions client; tests inject fakes.
using Transport = std::function<std::string(const GatewayConfig&, const CompletionRequest&,
                                            const std::string& prompt)>;

std::string http_chat_transport(const GatewayConfig& config, const CompletionRequest& req,
                                const std::string& prompt);

class LlmGateway {
 public:
  explicit LlmGateway(GatewayConfig config, Transport transport = {});

  // Returns a reply that parses against req.response_schema. On validation
  // failure the request is retried with an error-explaining suffix up to
  // req.max_retries times; all exits are validated-or-error.
  Json complete_structured(const CompletionRequest& req);

  const GatewayConfig& config() const { return config_; }

 private:
  GatewayConfig config_;
  Transport transport_;
  ReplayStore store_;
};

// Runs a structured completion, then applies a caller-side semantic check;
// on semantic failure the prompt is retried with the errors appended, up to
// req.max_retries more rounds. Returns the first reply with no errors, or
// the last (reply, errors) pair with errors non-empty.
std::pair<Json, std::vector<std::string>> complete_with_semantic_check(
    LlmGateway& gateway, CompletionRequest req,
    const std::function<std::vector<std::string>(const Json&)>& check);

}  // namespace awareplan
