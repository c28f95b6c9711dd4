#include "docsray/chat.hpp"

#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "docsray/error.hpp"
#include "docsray/text.hpp"

namespace docsray {

std::vector<Section> sections_of(const IndexedCorpus& corpus) {
  std::vector<Section> out;
  for (const auto& s : corpus.sections) out.push_back(s.section);
  return out;
}

std::string format_refinement_trace(const Answer& a) {
  std::string out = fmt::format("Refinement:\n  q0: {}\n", a.refinement.q0);
  for (std::size_t i = 0; i < a.refinement.refined_queries.size(); ++i)
    out += fmt::format("  r{}: {}\n", i + 1, a.refinement.refined_queries[i]);
  for (const auto& note : a.refinement.notes) out += fmt::format("  note: {}\n", note);
  out += fmt::format("  final: {}\n  retrievals: {}\n", a.refinement.final_query, a.retrievals);
  return out;
}

std::size_t run_chat(std::istream& in, std::ostream& out, const Engine& engine,
                     ChatSession& session, const ChatOptions& options) {
  if (!session.corpus) throw PreconditionError("chat session has no document");
  std::size_t answered = 0;
  std::string line;
  while (true) {
    out << options.prompt << std::flush;
    if (!std::getline(in, line)) break;
    const auto q = text::trim(line);
    if (q.empty()) continue;
    if (q == ":quit") break;
    if (q == ":toc") {
      out << format_toc_table(sections_of(*session.corpus));
      continue;
    }
    try {
      std::lock_guard lock(session.mu);
      auto answer = engine.ask(*session.corpus, q, options.query);
      out << render_answer(answer);
      if (options.show_trace) out << format_refinement_trace(answer);
      out << '\n';
      session.turns.push_back({std::string(q), std::move(answer)});
      ++answered;
    } catch (const Error& e) {
      out << "error: " << e.what() << "\n";
    }
  }
  return answered;
}

}  // namespace docsray
