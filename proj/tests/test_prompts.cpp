#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "docsray/prompts.hpp"

namespace p = docsray::prompts;
using p::Kind;

namespace {

std::string golden(const std::string& name) {
  std::ifstream in(std::string(DOCSRAY_FIXTURE_DIR) + "/prompts/" + name, std::ios::binary);
  EXPECT_TRUE(in.good()) << name;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(PromptGolden, FixedPrompts) {
  EXPECT_EQ(std::string(p::kSingleImage), golden("single_image.txt"));
  EXPECT_EQ(std::string(p::kOcr), golden("ocr.txt"));
  EXPECT_EQ(std::string(p::kChatbotSystem), golden("chatbot_system.txt"));
  EXPECT_EQ(std::string(p::kDocumentAnalystSystem), golden("analyst_system.txt"));
}

TEST(PromptGolden, SlottedPrompts) {
  EXPECT_EQ(p::multi_image(3), golden("multi_image_3.txt"));
  EXPECT_EQ(p::boundary("Revenue grew 12% in 2023.", "## Risk Factors\nCurrency exposure."),
            golden("boundary.txt"));
  EXPECT_EQ(p::title("Financial Overview\nRevenue grew."), golden("title.txt"));
  EXPECT_EQ(p::refine("Revenue growth in Asia", "[Markets, p.3-5]\nAsia revenue rose."),
            golden("refine.txt"));
  EXPECT_EQ(p::alternative_queries("quarterly revenue"), golden("alternative_queries.txt"));
  EXPECT_EQ(p::executive_summary({"Introduction", "Financial Overview", "Outlook"}),
            golden("executive_summary.txt"));
  EXPECT_EQ(p::section_summary_detailed("Financial Overview", "Revenue grew.\nCosts fell."),
            golden("section_detailed.txt"));
}

TEST(PromptGolden, BriefSummaryTruncatesContentTo1500) {
  const std::string content(1600, 'x');
  EXPECT_EQ(p::section_summary_brief("Financial Overview", content), golden("section_brief.txt"));
}

TEST(PromptGolden, BoundaryTemplateKeepsTrailingSpaces) {
  const auto prompt = p::boundary("a", "b");
  EXPECT_NE(prompt.find("reply with '0'. \n"), std::string::npos);
  EXPECT_NE(prompt.find("reply with '1'. \n"), std::string::npos);
}

TEST(PromptClassify, EveryBuilderIsRecognised) {
  EXPECT_EQ(p::classify(p::kSingleImage), Kind::single_image);
  EXPECT_EQ(p::classify(p::kOcr), Kind::ocr);
  EXPECT_EQ(p::classify(p::multi_image(4)), Kind::multi_image);
  EXPECT_EQ(p::classify(p::boundary("a", "b")), Kind::boundary);
  EXPECT_EQ(p::classify(p::title("t")), Kind::title);
  EXPECT_EQ(p::classify(p::refine("q", "c")), Kind::refine);
  EXPECT_EQ(p::classify(p::alternative_queries("q")), Kind::alternative_queries);
  EXPECT_EQ(p::classify(p::executive_summary({"A"})), Kind::executive_summary);
  EXPECT_EQ(p::classify(p::section_summary_brief("A", "c")), Kind::section_summary_brief);
  EXPECT_EQ(p::classify(p::section_summary_detailed("A", "c")), Kind::section_summary_detailed);
  EXPECT_EQ(p::classify(p::answer("ctx", "q")), Kind::answer);
  EXPECT_EQ(p::classify("hello"), Kind::unknown);
}

TEST(PromptSlots, ExtractorsReturnWhatWasSubstituted) {
  const auto b = p::boundary("first text", "second\ntext");
  EXPECT_EQ(p::boundary_page_a(b), "first text");
  EXPECT_EQ(p::boundary_page_b(b), "second\ntext");
  EXPECT_EQ(p::title_sample(p::title("the sample")), "the sample");
  const auto r = p::refine("my query", "chunk one\nchunk two");
  EXPECT_EQ(p::refine_query_slot(r), "my query");
  EXPECT_EQ(p::refine_context_slot(r), "chunk one\nchunk two");
  EXPECT_EQ(p::alternative_query_slot(p::alternative_queries("abc def")), "abc def");
  const auto s = p::section_summary_detailed("Costs", "body text");
  EXPECT_EQ(p::summary_title_slot(s), "Costs");
  EXPECT_EQ(p::summary_content_slot(s), "body text");
  EXPECT_EQ(p::answer_context_slot(p::answer("the context", "why?")), "the context");
}
