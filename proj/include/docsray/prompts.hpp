#pragma once

#include <string>
#include <string_view>
#include <vector>

// Prompt templates used by the pipeline. Builders substitute slots only;
// the surrounding text is fixed and golden-tested byte for byte.
namespace docsray::prompts {

inline constexpr std::string_view kSingleImage =
    "Describe this visual content. If it's a chart, graph, or diagram, explain what data or "
    "information it shows. If it's a photo or illustration, describe what it depicts. Be concise "
    "but informative.";

inline constexpr std::string_view kOcr =
    "Extract text from this image and present it as readable paragraphs. Start directly with the "
    "content.";

inline constexpr std::string_view kChatbotSystem =
    "Basic Principles\n"
    "1) Check document context first, then use reliable knowledge if needed.\n"
    "2) Provide accurate information without unnecessary disclaimers.\n"
    "3) Always respond in the same language as the user's question.";

inline constexpr std::string_view kDocumentAnalystSystem =
    "You are a professional document analyst. Your task is to create a comprehensive summary of a "
    "PDF document based on its sections.\n"
    "\n"
    "Guidelines:\n"
    "- Provide a structured summary that follows the document's table of contents\n"
    "- For each section, include key points, main arguments, and important details\n"
    "- Maintain the hierarchical structure of the document\n"
    "- Use clear, concise language while preserving technical accuracy\n"
    "- Include relevant quotes or specific data points when they are crucial\n"
    "- Highlight connections between different sections when relevant";

std::string multi_image(std::size_t n);
std::string boundary(std::string_view first_page_text, std::string_view second_page_text);
std::string title(std::string_view section_sample);
std::string refine(std::string_view query, std::string_view combined_answer);
std::string alternative_queries(std::string_view query);
std::string executive_summary(const std::vector<std::string>& section_titles);
std::string section_summary_brief(std::string_view title, std::string_view combined_content);
std::string section_summary_detailed(std::string_view title, std::string_view combined_content);
std::string answer(std::string_view context, std::string_view question);

// Which template a prompt was built from; used by rule-driven mock backends.
enum class Kind {
  unknown,
  single_image,
  multi_image,
  ocr,
  boundary,
  title,
  refine,
  alternative_queries,
  executive_summary,
  section_summary_brief,
  section_summary_detailed,
  answer,
};

Kind classify(std::string_view prompt);
std::string_view to_string(Kind kind);

// Slot extraction for the mock backends.
std::string_view boundary_page_a(std::string_view prompt);
std::string_view boundary_page_b(std::string_view prompt);
std::string_view title_sample(std::string_view prompt);
std::string_view refine_query_slot(std::string_view prompt);
std::string_view refine_context_slot(std::string_view prompt);
std::string_view alternative_query_slot(std::string_view prompt);
std::string_view summary_content_slot(std::string_view prompt);
std::string_view summary_title_slot(std::string_view prompt);
std::string_view answer_context_slot(std::string_view prompt);

}  // namespace docsray::prompts
