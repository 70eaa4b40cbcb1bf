#pragma once

#include <optional>
#include <string>
#include <vector>

namespace mdn {

// Network presets compiled in from data/presets/*.json.
std::optional<std::string> builtin_preset_text(const std::string& name);
std::vector<std::string> builtin_preset_list();

}  // namespace mdn
