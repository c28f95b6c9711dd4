// docsray: ingest documents, query them, chat, and serve the HTTP API.

#include <csignal>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "docsray/chat.hpp"
#include "docsray/config.hpp"
#include "docsray/engine.hpp"
#include "docsray/error.hpp"
#include "docsray/service.hpp"

namespace {

using namespace docsray;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitBackend = 3;

struct Common {
  std::string config_path;

  EngineConfig config() const {
    return resolve_config(config_path.empty() ? std::nullopt
                                              : std::optional<std::filesystem::path>(config_path));
  }
};

IndexedCorpus load_for(const Engine& engine, const std::string& path) {
  auto loaded = load_index(path, engine.fingerprints());
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
  return std::move(loaded.corpus);
}

void print_stats_line(const Engine& engine, const IndexedCorpus& corpus, const std::string& q) {
  RetrievalParams hier = engine.config().retrieval;
  hier.mode = RetrievalMode::hierarchical;
  RetrievalParams flat = hier;
  flat.mode = RetrievalMode::flat;
  const auto h = retrieve(q, corpus, hier, engine.fusion());
  const auto f = retrieve(q, corpus, flat, engine.fusion());
  const double ratio = h.stats.similarity_comparisons
                           ? static_cast<double>(f.stats.similarity_comparisons) /
                                 static_cast<double>(h.stats.similarity_comparisons)
                           : 0.0;
  std::cout << fmt::format(
      "Stats: hierarchical={} comparisons (S={}, chunks={}) | flat={} comparisons | "
      "reduction={:.2f}x\n",
      h.stats.similarity_comparisons, h.stats.sections_scored, h.stats.chunks_scored,
      f.stats.similarity_comparisons, ratio);
}

Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Document question answering over an inferred table of contents"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "YAML config (default: built-in, or $DOCSRAY_CONFIG)");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Build the pseudo-TOC and index of a document");
  std::string in_path, in_format = "text", in_out, in_doc_id;
  ingest->add_option("path", in_path, "Input file")->required();
  ingest->add_option("--format", in_format, "text | paged-layout")
      ->check(CLI::IsMember({"text", "paged-layout"}));
  ingest->add_option("--out", in_out, "Index path (default: {doc_id}.docsray-index)");
  ingest->add_option("--doc-id", in_doc_id, "Document id (default: file stem)");
  bool in_json = false;
  ingest->add_flag("--toc-json", in_json, "Print the TOC as JSON instead of a table");

  // query
  auto* query = app.add_subcommand("query", "Answer one question against an index");
  std::string q_index, q_text;
  bool q_flat = false, q_stats = false, q_trace = false;
  std::optional<int> q_iters;
  query->add_option("index", q_index, "Index file")->required();
  query->add_option("question", q_text, "Question")->required();
  query->add_flag("--flat", q_flat, "Score every chunk, skipping the coarse stage");
  query->add_option("--iterations", q_iters, "Refinement iterations (0-2)")->check(CLI::Range(0, 2));
  query->add_flag("--stats", q_stats, "Print comparison counts for both modes");
  query->add_flag("--trace", q_trace, "Print the refinement trace");

  // chat
  auto* chat = app.add_subcommand("chat", "Interactive question answering");
  std::string c_index;
  std::optional<int> c_iters;
  bool c_trace = false;
  chat->add_option("index", c_index, "Index file")->required();
  chat->add_option("--iterations", c_iters, "Refinement iterations (0-2)")->check(CLI::Range(0, 2));
  chat->add_flag("--trace", c_trace, "Print the refinement trace");

  // summarize
  auto* summarize = app.add_subcommand("summarize", "Summarize an indexed document");
  std::string s_index, s_mode = "brief";
  summarize->add_option("index", s_index, "Index file")->required();
  summarize->add_option("--mode", s_mode, "brief | detailed")->check(CLI::IsMember({"brief", "detailed"}));

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  std::string v_host = "127.0.0.1", v_dir;
  int v_port = 8000;
  serve->add_option("--host", v_host, "Bind address");
  serve->add_option("--port", v_port, "Port (0 picks a free one)");
  serve->add_option("--index-dir", v_dir, "Load indexes from and save new ones to this directory");

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic index with uniform section sizes");
  SyntheticSpec spec;
  std::string y_out;
  synth->add_option("--sections", spec.sections, "S")->check(CLI::PositiveNumber);
  synth->add_option("--chunks-per-section", spec.chunks_per_section, "N_s")->check(CLI::PositiveNumber);
  synth->add_option("--seed", spec.seed, "Random seed");
  synth->add_option("--out", y_out, "Index path (default: synthetic.docsray-index)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    const Engine engine(common.config());

    if (*ingest) {
      auto r = engine.ingest_file(in_path, parse_input_format(in_format),
                                  in_doc_id.empty() ? std::nullopt : std::optional(in_doc_id));
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
      const auto out = in_out.empty() ? default_index_path(r.corpus.doc_id) : in_out;
      save_index(r.corpus, out);
      std::cout << (in_json ? export_toc_json(r.toc) + "\n" : format_toc_table(r.toc.sections));
      std::cout << fmt::format("Indexed {} pages, {} sections, {} chunks -> {}\n",
                               r.corpus.page_count, r.corpus.section_count(),
                               r.corpus.total_chunks(), out);
    } else if (*query) {
      const auto corpus = load_for(engine, q_index);
      QueryOptions opts;
      if (q_flat) opts.mode = RetrievalMode::flat;
      opts.iterations = q_iters;
      const auto answer = engine.ask(corpus, q_text, opts);
      std::cout << render_answer(answer);
      if (q_trace || (q_iters && *q_iters > 0)) std::cout << "\n" << format_refinement_trace(answer);
      if (q_stats) {
        std::cout << "\n";
        print_stats_line(engine, corpus, answer.refinement.final_query);
      }
    } else if (*chat) {
      ChatSession session;
      session.session_id = "cli";
      session.corpus = std::make_shared<const IndexedCorpus>(load_for(engine, c_index));
      session.doc_id = session.corpus->doc_id;
      ChatOptions opts;
      opts.query.iterations = c_iters;
      opts.show_trace = c_trace;
      std::cout << format_toc_table(sections_of(*session.corpus))
                << "Type a question, :toc for the contents, :quit to leave.\n";
      run_chat(std::cin, std::cout, engine, session, opts);
    } else if (*summarize) {
      const auto corpus = load_for(engine, s_index);
      std::cout << render_summary(engine.summarize(corpus, parse_summary_mode(s_mode)));
    } else if (*serve) {
      ServiceOptions opts;
      if (!v_dir.empty()) opts.index_dir = v_dir;
      auto shared = std::make_shared<const Engine>(engine);
      Service service(shared, opts);
      for (const auto& w : service.warnings()) std::cerr << "warning: " << w << "\n";
      const int port = service.bind(v_host, v_port);
      std::cout << fmt::format("Listening on http://{}:{}\n", v_host, port) << std::flush;
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      service.run();
      g_service = nullptr;
    } else if (*synth) {
      const auto r = build_synthetic_corpus(spec, engine.config(), engine.fusion());
      const auto out = y_out.empty() ? default_index_path(r.corpus.doc_id) : y_out;
      save_index(r.corpus, out);
      std::cout << fmt::format("Synthetic index: S={}, N={}, N_s={} -> {}\n",
                               r.corpus.section_count(), r.corpus.total_chunks(),
                               spec.chunks_per_section, out);
    }
    return kExitOk;
  } catch (const BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
