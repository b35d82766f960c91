#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace ispu {

inline constexpr int kNumClasses = 5;

enum class ClassLabel : std::uint8_t {
  kIdle = 0,
  kStandUp = 1,
  kSitDown = 2,
  kRotate = 3,
  kMove = 4,
};

inline constexpr std::array<std::string_view, kNumClasses> kClassNames = {
    "idle", "standup", "sitdown", "rotate", "move"};

constexpr std::string_view class_name(ClassLabel label) {
  return kClassNames[static_cast<std::size_t>(label)];
}

constexpr int class_index(ClassLabel label) { return static_cast<int>(label); }

// Accepts the lowercase names above, a few spellings with separators, or the
// integer code.
std::optional<ClassLabel> parse_class_label(std::string_view text);

std::optional<ClassLabel> label_from_index(long code);

}  // namespace ispu
