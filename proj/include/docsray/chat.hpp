#pragma once

#include <iosfwd>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "docsray/answer.hpp"
#include "docsray/engine.hpp"

namespace docsray {

struct ChatTurn {
  std::string user_text;
  Answer answer;
};

struct ChatSession {
  std::string session_id;
  std::string doc_id;
  std::shared_ptr<const IndexedCorpus> corpus;
  std::vector<ChatTurn> turns;
  // Serializes the session's own request stream.
  std::mutex mu;
};

struct ChatOptions {
  QueryOptions query;
  std::string prompt = "> ";
  bool show_trace = false;  // print the refinement trace after each answer
};

// Line-oriented REPL. ":quit" ends it, ":toc" prints the pseudo-TOC, blank
// lines are skipped. A failing turn prints "error: ..." and the loop goes on.
// Returns the number of answered turns.
std::size_t run_chat(std::istream& in, std::ostream& out, const Engine& engine,
                     ChatSession& session, const ChatOptions& options = {});

std::string format_refinement_trace(const Answer& answer);

std::vector<Section> sections_of(const IndexedCorpus& corpus);

}  // namespace docsray
