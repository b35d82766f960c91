#include "ispu/labels.hpp"

#include <cctype>
#include <charconv>
#include <string>

namespace ispu {

std::optional<ClassLabel> label_from_index(long code) {
  if (code < 0 || code >= kNumClasses) return std::nullopt;
  return static_cast<ClassLabel>(code);
}

std::optional<ClassLabel> parse_class_label(std::string_view text) {
  long code = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), code);
  if (ec == std::errc{} && ptr == text.data() + text.size()) {
    return label_from_index(code);
  }
  std::string folded;
  for (char c : text) {
    if (c == '_' || c == '-' || c == ' ') continue;
    folded.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (std::size_t i = 0; i < kClassNames.size(); ++i) {
    if (folded == kClassNames[i]) return static_cast<ClassLabel>(i);
  }
  return std::nullopt;
}

}  // namespace ispu
