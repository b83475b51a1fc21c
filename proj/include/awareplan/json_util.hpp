#pragma once

#include <json.hpp>

#include <set>
#include <string>

namespace awareplan {

using Json = nlohmann::json;

// Strict JSON helpers shared by the document loaders. All failures throw
// SchemaError with the document context in the message.

Json parse_json_text(const std::string& text, const std::string& context);
Json parse_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

void require_object(const Json& v, const std::string& context);
// Rejects keys outside required+optional and requires every required key.
void check_keys(const Json& obj, const std::string& context,
                const std::set<std::string>& required, const std::set<std::string>& optional);

std::string get_string(const Json& obj, const std::string& key, const std::string& context);
int get_int(const Json& obj, const std::string& key, const std::string& context);
bool get_bool(const Json& obj, const std::string& key, const std::string& context,
              bool fallback);
const Json& get_array(const Json& obj, const std::string& key, const std::string& context);

}  // namespace awareplan
