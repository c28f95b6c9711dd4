#include "docsray/text.hpp"

#include <cctype>

namespace docsray::text {
namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

}  // namespace

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string_view first_nonempty_line(std::string_view s) {
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t nl = s.find('\n', pos);
    if (nl == std::string_view::npos) nl = s.size();
    auto line = trim(s.substr(pos, nl - pos));
    if (!line.empty()) return line;
    pos = nl + 1;
  }
  return {};
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_word_byte(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    std::string w;
    while (i < s.size() && is_word_byte(static_cast<unsigned char>(s[i]))) {
      auto c = static_cast<unsigned char>(s[i]);
      w.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
      ++i;
    }
    out.push_back(std::move(w));
  }
  return out;
}

std::string_view utf8_head(std::string_view s, std::size_t max_bytes) {
  if (s.size() <= max_bytes) return s;
  std::size_t cut = max_bytes;
  while (cut > 0 && is_continuation(static_cast<unsigned char>(s[cut]))) --cut;
  return s.substr(0, cut);
}

std::string_view utf8_tail(std::string_view s, std::size_t max_bytes) {
  if (s.size() <= max_bytes) return s;
  std::size_t start = s.size() - max_bytes;
  while (start < s.size() && is_continuation(static_cast<unsigned char>(s[start]))) ++start;
  return s.substr(start);
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t nl = s.find('\n', pos);
    if (nl == std::string_view::npos) nl = s.size();
    auto line = s.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.emplace_back(line);
    pos = nl + 1;
  }
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

std::string_view between(std::string_view s, std::string_view open, std::string_view close) {
  auto b = s.find(open);
  if (b == std::string_view::npos) return {};
  b += open.size();
  auto e = s.find(close, b);
  if (e == std::string_view::npos) e = s.size();
  return s.substr(b, e - b);
}

}  // namespace docsray::text
