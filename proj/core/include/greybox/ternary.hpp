#pragma once

#include <optional>
#include <string_view>

namespace greybox {

/// Answer to a yes/no question where "we do not know" is a legitimate answer.
enum class Ternary { Yes, No, Unknown };

constexpr std::string_view to_string(Ternary t) {
  switch (t) {
    case Ternary::Yes: return "yes";
    case Ternary::No: return "no";
    case Ternary::Unknown: return "unknown";
  }
  return "unknown";
}

inline std::optional<Ternary> ternary_from_string(std::string_view s) {
  if (s == "yes") return Ternary::Yes;
  if (s == "no") return Ternary::No;
  if (s == "unknown") return Ternary::Unknown;
  return std::nullopt;
}

}  // namespace greybox
