#include <cctype>

#include "leam/corpus.hpp"
#include "leam/error.hpp"

namespace leam {

std::string_view to_string(Mode mode) noexcept { return mode == Mode::single ? "single" : "multi"; }

Mode parse_mode(std::string_view text) {
  if (text == "single") return Mode::single;
  if (text == "multi") return Mode::multi;
  throw ConfigError("unknown mode '" + std::string(text) + "' (expected single or multi)");
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  for (const char ch : text) {
    const auto byte = static_cast<unsigned char>(ch);
    if (byte < 0x80 && std::isspace(byte)) {
      flush();
    } else if (byte < 0x80 && std::ispunct(byte)) {
      flush();
      out.emplace_back(1, ch);
    } else {
      current.push_back(byte < 0x80 ? static_cast<char>(std::tolower(byte)) : ch);
    }
  }
  flush();
  return out;
}

}  // namespace leam
