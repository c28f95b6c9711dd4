#include "docsray/corpus.hpp"

#include <cctype>

#include <fmt/format.h>

#include "docsray/error.hpp"

namespace docsray {
namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

}  // namespace

std::string_view to_string(SourceKind kind) {
  return kind == SourceKind::plain_text ? "plain_text" : "paged_layout";
}

void Document::validate() const {
  if (pages.empty()) throw PreconditionError(fmt::format("document '{}' has no pages", doc_id));
  for (std::size_t i = 0; i < pages.size(); ++i) {
    if (pages[i].index != i)
      throw PreconditionError(
          fmt::format("document '{}': page at position {} has index {}", doc_id, i, pages[i].index));
  }
}

std::string Document::text_of(std::size_t first, std::size_t last) const {
  std::string out;
  for (std::size_t p = first; p <= last && p < pages.size(); ++p) {
    if (p != first) out += "\n\n";
    out += pages[p].text;
  }
  return out;
}

void check_partition(const std::vector<Section>& sections, std::size_t page_count) {
  if (sections.empty()) throw PreconditionError("partition has no sections");
  std::size_t expected = 0;
  for (const auto& s : sections) {
    if (s.page_start > s.page_end)
      throw PreconditionError(fmt::format("section {} has page_start > page_end", s.index));
    if (s.page_start != expected)
      throw PreconditionError(
          fmt::format("section {} starts at page {}, expected {}", s.index, s.page_start, expected));
    expected = s.page_end + 1;
  }
  if (expected != page_count)
    throw PreconditionError(
        fmt::format("sections cover {} pages, document has {}", expected, page_count));
}

std::string make_section_id(std::string_view doc_id, std::size_t section_index) {
  return fmt::format("{}/s{}", doc_id, section_index);
}

std::string make_chunk_id(std::string_view doc_id, std::size_t section_index,
                          std::size_t chunk_index) {
  return fmt::format("{}/s{}/c{}", doc_id, section_index, chunk_index);
}

std::vector<TokenSpan> WhitespaceTokenizer::split(std::string_view text) const {
  std::vector<TokenSpan> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
    if (i == text.size()) break;
    std::size_t b = i;
    while (i < text.size() && !is_space(static_cast<unsigned char>(text[i]))) ++i;
    out.push_back({b, i});
  }
  return out;
}

std::vector<TokenSpan> WordPunctTokenizer::split(std::string_view text) const {
  std::vector<TokenSpan> out;
  std::size_t i = 0;
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    if (is_space(c)) {
      ++i;
    } else if (is_word_byte(c)) {
      std::size_t b = i;
      while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
      out.push_back({b, i});
    } else {
      out.push_back({i, i + 1});
      ++i;
    }
  }
  return out;
}

std::shared_ptr<const Tokenizer> make_tokenizer(std::string_view id) {
  if (id == "wordpunct") return std::make_shared<WordPunctTokenizer>();
  if (id == "whitespace") return std::make_shared<WhitespaceTokenizer>();
  throw PreconditionError(fmt::format("unknown tokenizer '{}'", id));
}

}  // namespace docsray
