#include <gtest/gtest.h>

#include <random>

#include "docsray/corpus.hpp"
#include "docsray/error.hpp"
#include "docsray/text.hpp"
#include "support/oracles.hpp"

using namespace docsray;

TEST(Tokenizer, EmptyTextCountsZero) {
  EXPECT_EQ(WhitespaceTokenizer().count(""), 0u);
  EXPECT_EQ(WordPunctTokenizer().count(""), 0u);
  EXPECT_EQ(WordPunctTokenizer().count("   \n\t"), 0u);
}

TEST(Tokenizer, WhitespaceCountsRuns) {
  EXPECT_EQ(count_tokens("a b c", WhitespaceTokenizer()), 3u);
  EXPECT_EQ(count_tokens("  a\tb\n\nc  ", WhitespaceTokenizer()), 3u);
}

TEST(Tokenizer, WordPunctSplitsPunctuation) {
  WordPunctTokenizer t;
  EXPECT_EQ(t.count("Hello, world!"), 4u);
  EXPECT_EQ(t.count("snake_case x2"), 2u);
  const std::string s = "don't";
  const auto spans = t.split(s);
  ASSERT_EQ(spans.size(), 3u);
  EXPECT_EQ(s.substr(spans[0].begin, spans[0].end - spans[0].begin), "don");
  EXPECT_EQ(s.substr(spans[1].begin, spans[1].end - spans[1].begin), "'");
}

TEST(Tokenizer, SpansAreOrderedAndInsideText) {
  std::mt19937 rng(3);
  const std::string chars = "ab ,.\n\xc3\xa9x_-";
  std::uniform_int_distribution<std::size_t> pick(0, chars.size() - 1);
  WordPunctTokenizer t;
  for (int trial = 0; trial < 200; ++trial) {
    std::string s;
    for (int i = 0; i < 60; ++i) s += chars[pick(rng)];
    std::size_t prev_end = 0;
    for (const auto& sp : t.split(s)) {
      EXPECT_LE(prev_end, sp.begin);
      EXPECT_LT(sp.begin, sp.end);
      EXPECT_LE(sp.end, s.size());
      prev_end = sp.end;
    }
  }
}

TEST(Tokenizer, WhitespaceMatchesIndependentSplitterOn2000WordPage) {
  std::mt19937 rng(11);
  std::string page = fixtures::words(rng, 2000, 500);
  // Mix in irregular whitespace.
  for (std::size_t i = 0; i < page.size(); i += 37)
    if (page[i] == ' ') page[i] = (i % 2) ? '\n' : '\t';
  EXPECT_EQ(WhitespaceTokenizer().count(page), oracle::whitespace_count(page));
  EXPECT_EQ(WhitespaceTokenizer().count(page), 2000u);
}

TEST(Tokenizer, AdditiveWithinOneAcrossConcatenation) {
  std::mt19937 rng(5);
  const std::string alphabet = "abc ,.;";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  for (const auto& id : {"whitespace", "wordpunct"}) {
    auto t = make_tokenizer(id);
    for (int trial = 0; trial < 300; ++trial) {
      std::string a, b;
      for (int i = 0; i < 20; ++i) a += alphabet[pick(rng)];
      for (int i = 0; i < 20; ++i) b += alphabet[pick(rng)];
      const long joined = static_cast<long>(t->count(a + b));
      const long parts = static_cast<long>(t->count(a) + t->count(b));
      EXPECT_LE(std::labs(joined - parts), 1) << id << " '" << a << "' + '" << b << "'";
    }
  }
}

TEST(Tokenizer, FactoryRejectsUnknownIds) {
  EXPECT_EQ(make_tokenizer("wordpunct")->id(), "wordpunct");
  EXPECT_EQ(make_tokenizer("whitespace")->id(), "whitespace");
  EXPECT_THROW(make_tokenizer("bpe"), PreconditionError);
}

TEST(Ids, FollowTheDocumentedScheme) {
  EXPECT_EQ(make_section_id("report", 3), "report/s3");
  EXPECT_EQ(make_chunk_id("report", 3, 12), "report/s3/c12");
}

TEST(DocumentModel, ValidateRequiresContiguousPages) {
  auto d = fixtures::doc_of({"a", "b"});
  EXPECT_NO_THROW(d.validate());
  d.pages[1].index = 5;
  EXPECT_THROW(d.validate(), PreconditionError);
  Document empty;
  empty.doc_id = "x";
  EXPECT_THROW(empty.validate(), PreconditionError);
}

TEST(DocumentModel, TextOfJoinsWithBlankLine) {
  auto d = fixtures::doc_of({"one", "two", "three"});
  EXPECT_EQ(d.text_of(0, 2), "one\n\ntwo\n\nthree");
  EXPECT_EQ(d.text_of(1, 1), "two");
}

TEST(DocumentModel, PartitionCheck) {
  auto d = fixtures::doc_of({"a", "b", "c", "d"});
  auto ok = fixtures::toc_of(d, {{"A", {0, 1}}, {"B", {2, 3}}});
  EXPECT_NO_THROW(check_partition(ok.sections, 4));
  auto gap = fixtures::toc_of(d, {{"A", {0, 0}}, {"B", {2, 3}}});
  EXPECT_THROW(check_partition(gap.sections, 4), PreconditionError);
  auto overlap = fixtures::toc_of(d, {{"A", {0, 2}}, {"B", {2, 3}}});
  EXPECT_THROW(check_partition(overlap.sections, 4), PreconditionError);
  auto short_cover = fixtures::toc_of(d, {{"A", {0, 2}}});
  EXPECT_THROW(check_partition(short_cover.sections, 4), PreconditionError);
}

TEST(Text, Utf8SafeExcerpts) {
  const std::string s = "ab\xc3\xa9\xc3\xa9";  // "abéé", 6 bytes
  EXPECT_EQ(text::utf8_head(s, 3), "ab");
  EXPECT_EQ(text::utf8_head(s, 4), "ab\xc3\xa9");
  EXPECT_EQ(text::utf8_tail(s, 3), "\xc3\xa9");
  EXPECT_EQ(text::utf8_tail(s, 100), s);
}

TEST(Text, FirstNonEmptyLineAndWords) {
  EXPECT_EQ(text::first_nonempty_line("\n  \n  Title here \nrest"), "Title here");
  EXPECT_EQ(text::first_nonempty_line("   "), "");
  EXPECT_EQ(text::words("Hello, World-42!"), (std::vector<std::string>{"hello", "world", "42"}));
}
