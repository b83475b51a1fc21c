#pragma once

#include <map>
#include <string>

namespace awareplan {

// Versioned prompt templates loaded from a directory of .txt files.
// Placeholders use {{name}} syntax.
class PromptLibrary {
 public:
  PromptLibrary() = default;
  explicit PromptLibrary(std::string dir);

  std::string render(const std::string& name,
                     const std::map<std::string, std::string>& vars) const;
  bool available() const { return !dir_.empty(); }

 private:
  std::string dir_;
};

}  // namespace awareplan
