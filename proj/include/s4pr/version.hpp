#pragma once

namespace s4pr {

inline constexpr const char* tool_version = "0.1.0";

} // namespace s4pr
