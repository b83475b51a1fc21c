#include "awareplan/prompts.hpp"

#include <filesystem>

#include "awareplan/errors.hpp"
#include "awareplan/json_util.hpp"

namespace awareplan {

PromptLibrary::PromptLibrary(std::string dir) : dir_(std::move(dir)) {
  if (!dir_.empty() && !std::filesystem::is_directory(dir_)) {
    throw SchemaError("prompt directory '" + dir_ + "' does not exist");
  }
}

std::string PromptLibrary::render(const std::string& name,
                                  const std::map<std::string, std::string>& vars) const {
  if (dir_.empty()) throw Error("no prompt directory configured");
  std::string text = read_text_file((std::filesystem::path(dir_) / (name + ".txt")).string());
  for (const auto& [key, value] : vars) {
    const std::string placeholder = "{{" + key + "}}";
    size_t pos = 0;
    while ((pos = text.find(placeholder, pos)) != std::string::npos) {
      text.replace(pos, placeholder.size(), value);
      pos += value.size();
    }
  }
  return text;
}

}  // namespace awareplan
