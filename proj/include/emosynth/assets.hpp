#pragma once

#include <string_view>
#include <vector>

namespace emosynth {

// Repo data files compiled into the library at build time, keyed by their
// repo-relative path (e.g. "templates/seeker.tmpl"). Throws Error for
// unknown names.
std::string_view embedded_asset(std::string_view name);

std::vector<std::string_view> embedded_asset_names();

}  // namespace emosynth
