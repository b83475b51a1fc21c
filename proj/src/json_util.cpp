#include "awareplan/json_util.hpp"

#include <fstream>
#include <sstream>

#include "awareplan/errors.hpp"

namespace awareplan {

Json parse_json_text(const std::string& text, const std::string& context) {
  Json v = Json::parse(text, nullptr, false);
  if (v.is_discarded()) throw SchemaError(context + ": not valid JSON");
  return v;
}

Json parse_json_file(const std::string& path) {
  return parse_json_text(read_text_file(path), path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file '" + path + "'");
  out << content;
  if (!out) throw Error("failed writing file '" + path + "'");
}

void require_object(const Json& v, const std::string& context) {
  if (!v.is_object()) throw SchemaError(context + ": expected a JSON object");
}

void check_keys(const Json& obj, const std::string& context,
                const std::set<std::string>& required, const std::set<std::string>& optional) {
  require_object(obj, context);
  for (const auto& [key, _] : obj.items()) {
    if (required.count(key) == 0 && optional.count(key) == 0) {
      throw SchemaError(context + ": unknown key '" + key + "'");
    }
  }
  for (const auto& key : required) {
    if (!obj.contains(key)) throw SchemaError(context + ": missing key '" + key + "'");
  }
}

std::string get_string(const Json& obj, const std::string& key, const std::string& context) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    throw SchemaError(context + ": '" + key + "' must be a string");
  }
  return obj[key].get<std::string>();
}

int get_int(const Json& obj, const std::string& key, const std::string& context) {
  if (!obj.contains(key) || !obj[key].is_number_integer()) {
    throw SchemaError(context + ": '" + key + "' must be an integer");
  }
  return obj[key].get<int>();
}

bool get_bool(const Json& obj, const std::string& key, const std::string& context,
              bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) throw SchemaError(context + ": '" + key + "' must be a boolean");
  return obj[key].get<bool>();
}

const Json& get_array(const Json& obj, const std::string& key, const std::string& context) {
  if (!obj.contains(key) || !obj[key].is_array()) {
    throw SchemaError(context + ": '" + key + "' must be an array");
  }
  return obj[key];
}

}  // namespace awareplan
