#pragma once

#include <string>
#include <vector>

namespace tmeval {

struct Diagnostic {
  std::string code;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

/// Optional sink for non-fatal conditions. Operations accept a nullable
/// pointer and append to it when given one.
using Warnings = std::vector<Diagnostic>;

inline void warn(Warnings* sink, std::string code, std::string message) {
  if (sink != nullptr) sink->push_back({std::move(code), std::move(message)});
}

}  // namespace tmeval
