#pragma once

namespace tmeval {

inline constexpr const char* kVersion = "0.3.0";

}  // namespace tmeval
