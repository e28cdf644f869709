#pragma once

namespace adaptnet {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace adaptnet
