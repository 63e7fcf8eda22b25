#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ionflux {

namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& preset_table();
}

/// Names of the shipped figure configs.
std::vector<std::string> preset_names();

/// YAML text of a shipped config; throws ConfigError for unknown names.
std::string_view preset_text(std::string_view name);

}  // namespace ionflux
