#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace docsray {

enum class SourceKind { plain_text, paged_layout };

std::string_view to_string(SourceKind kind);

struct Page {
  std::size_t index = 0;
  std::string text;
  std::vector<std::string> visual_descriptions;
  bool ocr_applied = false;
};

struct Document {
  std::string doc_id;
  std::vector<Page> pages;
  SourceKind source_kind = SourceKind::plain_text;

  // Throws PreconditionError unless pages are non-empty and indexed 0..n-1.
  void validate() const;

  // Texts of pages [first, last] joined by a blank line.
  std::string text_of(std::size_t first, std::size_t last) const;
};

// One pseudo-TOC node. Embeddings live in the index, not here.
struct Section {
  std::string id;
  std::size_t index = 0;
  std::string title;
  std::size_t page_start = 0;
  std::size_t page_end = 0;

  std::size_t page_count() const { return page_end - page_start + 1; }
  bool operator==(const Section&) const = default;
};

// Throws PreconditionError unless `sections` cover [0, page_count) exactly once, in order.
void check_partition(const std::vector<Section>& sections, std::size_t page_count);

std::string make_section_id(std::string_view doc_id, std::size_t section_index);
std::string make_chunk_id(std::string_view doc_id, std::size_t section_index, std::size_t chunk_index);

// Byte range [begin, end) of one token inside the tokenized text.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Deterministic token counter; count("") is 0.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::string_view id() const = 0;
  virtual std::vector<TokenSpan> split(std::string_view text) const = 0;
  std::size_t count(std::string_view text) const { return split(text).size(); }
};

// Whitespace-separated runs.
class WhitespaceTokenizer final : public Tokenizer {
 public:
  std::string_view id() const override { return "whitespace"; }
  std::vector<TokenSpan> split(std::string_view text) const override;
};

// Alphanumeric runs plus one token per punctuation character. Default counter.
class WordPunctTokenizer final : public Tokenizer {
 public:
  std::string_view id() const override { return "wordpunct"; }
  std::vector<TokenSpan> split(std::string_view text) const override;
};

// "whitespace" or "wordpunct"; throws PreconditionError otherwise.
std::shared_ptr<const Tokenizer> make_tokenizer(std::string_view id);

inline std::size_t count_tokens(std::string_view text, const Tokenizer& tokenizer) {
  return tokenizer.count(text);
}

}  // namespace docsray
