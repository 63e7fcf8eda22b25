#include "ionflux/presets.hpp"

#include "ionflux/errors.hpp"

namespace ionflux {

std::vector<std::string> preset_names()
{
  std::vector<std::string> names;
  for (const auto& [name, text] : detail::preset_table()) {
    names.emplace_back(name);
  }
  return names;
}

std::string_view preset_text(std::string_view name)
{
  for (const auto& [known, text] : detail::preset_table()) {
    if (known == name) {
      return text;
    }
  }
  std::string available;
  for (const auto& n : preset_names()) {
    available += (available.empty() ? "" : ", ") + n;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "' (available: " + available + ")");
}

}  // namespace ionflux
