#pragma once

namespace hexmpo {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hexmpo
