#include "docsray/service.hpp"

#include <atomic>
#include <map>
#include <shared_mutex>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>
#include <zlib.h>

#include "docsray/error.hpp"
#include "docsray/text.hpp"

namespace docsray {
namespace {

using nlohmann::json;

struct HttpFailure {
  int status;
  std::string code;
  std::string message;
};

[[noreturn]] void fail(int status, std::string code, std::string message) {
  throw HttpFailure{status, std::move(code), std::move(message)};
}

json parse_body(const httplib::Request& req) {
  try {
    auto body = json::parse(req.body);
    if (!body.is_object()) fail(400, "bad_request", "request body must be a JSON object");
    return body;
  } catch (const json::parse_error& e) {
    fail(400, "bad_request", fmt::format("malformed JSON body: {}", e.what()));
  }
}

std::string string_field(const json& body, const char* key, bool required = true) {
  if (!body.contains(key)) {
    if (required) fail(400, "bad_request", fmt::format("missing field '{}'", key));
    return {};
  }
  if (!body[key].is_string()) fail(400, "bad_request", fmt::format("field '{}' must be a string", key));
  return body[key].get<std::string>();
}

QueryOptions query_options(const json& body) {
  QueryOptions o;
  if (body.contains("mode")) {
    if (!body["mode"].is_string()) fail(400, "bad_request", "field 'mode' must be a string");
    try {
      o.mode = parse_retrieval_mode(body["mode"].get<std::string>());
    } catch (const PreconditionError& e) {
      fail(400, "bad_request", e.what());
    }
  }
  if (body.contains("iterations")) {
    const auto& it = body["iterations"];
    if (!it.is_number_integer() || it.get<int>() < 0 || it.get<int>() > kMaxRefinementIterations)
      fail(400, "bad_request",
           fmt::format("field 'iterations' must be an integer in 0..{}", kMaxRefinementIterations));
    o.iterations = it.get<int>();
  }
  return o;
}

std::string page_label(std::size_t a, std::size_t b) {
  return a == b ? std::to_string(a + 1) : fmt::format("{}-{}", a + 1, b + 1);
}

json toc_json(const IndexedCorpus& c) {
  json sections = json::array();
  for (const auto& s : c.sections) {
    sections.push_back({{"section_id", s.section.id},
                        {"title", s.section.title},
                        {"page_start", s.section.page_start},
                        {"page_end", s.section.page_end},
                        {"pages", page_label(s.section.page_start, s.section.page_end)},
                        {"chunk_count", s.chunk_count}});
  }
  return {{"doc_id", c.doc_id}, {"page_count", c.page_count}, {"sections", sections}};
}

json answer_json(const Answer& a) {
  json refs = json::array();
  for (const auto& r : a.references) {
    refs.push_back({{"section_id", r.section_id},
                    {"title", r.title},
                    {"page_start", r.page_start},
                    {"page_end", r.page_end},
                    {"pages", page_label(r.page_start, r.page_end)}});
  }
  json hits = json::array();
  for (const auto& h : a.retrieval.hits)
    hits.push_back({{"chunk_id", h.chunk_id}, {"section_id", h.section_id}, {"score", h.score}});
  const auto& st = a.retrieval.stats;
  return {
      {"answer", a.text},
      {"rendered", render_answer(a)},
      {"no_relevant_content", a.no_relevant_content},
      {"references", refs},
      {"hits", hits},
      {"consulted_sections", a.retrieval.consulted_sections},
      {"stats",
       {{"mode", std::string(to_string(a.retrieval.mode))},
        {"similarity_comparisons", st.similarity_comparisons},
        {"sections_scored", st.sections_scored},
        {"chunks_scored", st.chunks_scored},
        {"dot_products", st.dot_products}}},
      {"refinement",
       {{"q0", a.refinement.q0},
        {"refined_queries", a.refinement.refined_queries},
        {"final_query", a.refinement.final_query},
        {"skipped", a.refinement.skipped},
        {"notes", a.refinement.notes},
        {"retrievals", a.retrievals}}},
  };
}

json summary_json(const DocumentSummary& s) {
  json sections = json::array();
  for (const auto& x : s.sections) {
    sections.push_back({{"section_id", x.section_id},
                        {"title", x.title},
                        {"pages", page_label(x.page_start, x.page_end)},
                        {"summary", x.summary},
                        {"summarized", x.summarized},
                        {"note", x.note}});
  }
  return {{"mode", std::string(to_string(s.mode))},
          {"executive_summary", s.executive},
          {"executive_ok", s.executive_ok},
          {"sections", sections}};
}

void check_doc_id(const std::string& id) {
  if (id.empty() || id.size() > 128) fail(400, "bad_request", "doc_id must be 1-128 characters");
  for (char ch : id) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '.' || ch == '_' || ch == '-';
    if (!ok) fail(400, "bad_request", "doc_id may only contain letters, digits, '.', '_' and '-'");
  }
  if (id == "." || id == "..") fail(400, "bad_request", "invalid doc_id");
}

std::string content_doc_id(std::string_view bytes) {
  const auto crc = crc32(crc32(0L, Z_NULL, 0), reinterpret_cast<const Bytef*>(bytes.data()),
                         static_cast<uInt>(bytes.size()));
  return fmt::format("doc-{:08x}", static_cast<std::uint32_t>(crc));
}

}  // namespace

struct Service::Impl {
  std::shared_ptr<const Engine> engine;
  ServiceOptions options;
  httplib::Server server;
  std::thread thread;

  mutable std::shared_mutex mu;
  std::map<std::string, std::shared_ptr<const IndexedCorpus>> documents;
  std::map<std::string, std::shared_ptr<ChatSession>> sessions;
  std::atomic<std::uint64_t> next_session{1};
  std::vector<std::string> warnings;

  std::shared_ptr<const IndexedCorpus> document(const std::string& id) const {
    std::shared_lock lock(mu);
    auto it = documents.find(id);
    if (it == documents.end()) fail(404, "not_found", fmt::format("unknown document '{}'", id));
    return it->second;
  }

  std::shared_ptr<ChatSession> session(const std::string& id) const {
    std::shared_lock lock(mu);
    auto it = sessions.find(id);
    if (it == sessions.end()) fail(404, "not_found", fmt::format("unknown session '{}'", id));
    return it->second;
  }

  void store(std::shared_ptr<const IndexedCorpus> corpus) {
    if (options.index_dir)
      save_index(*corpus, *options.index_dir / default_index_path(corpus->doc_id));
    std::unique_lock lock(mu);
    documents[corpus->doc_id] = std::move(corpus);
  }

  void preload() {
    if (!options.index_dir) return;
    std::filesystem::create_directories(*options.index_dir);
    for (const auto& entry : std::filesystem::directory_iterator(*options.index_dir)) {
      if (entry.path().extension() != ".docsray-index") continue;
      try {
        auto loaded = load_index(entry.path(), engine->fingerprints());
        for (auto& w : loaded.warnings) warnings.push_back(entry.path().filename().string() + ": " + w);
        auto id = loaded.corpus.doc_id;
        documents[id] = std::make_shared<const IndexedCorpus>(std::move(loaded.corpus));
      } catch (const Error& e) {
        warnings.push_back(fmt::format("{}: skipped ({})", entry.path().filename().string(), e.what()));
      }
    }
  }

  template <class F>
  httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      auto reply_error = [&](int status, const std::string& code, const std::string& msg) {
        res.status = status;
        res.set_content(json{{"code", code}, {"message", msg}}.dump(), "application/json");
      };
      try {
        json body = f(req);
        res.status = 200;
        res.set_content(body.dump(), "application/json");
      } catch (const HttpFailure& e) {
        reply_error(e.status, e.code, e.message);
      } catch (const BackendError& e) {
        reply_error(502, "backend_error", e.what());
      } catch (const ParseError& e) {
        reply_error(400, "bad_request", e.what());
      } catch (const PreconditionError& e) {
        reply_error(400, "bad_request", e.what());
      } catch (const std::exception& e) {
        reply_error(500, "internal", e.what());
      }
    };
  }

  json ingest(const httplib::Request& req) {
    std::string doc_id;
    IngestResult r;
    if (req.is_multipart_form_data()) {
      if (!req.has_file("file")) fail(400, "bad_request", "multipart upload needs a 'file' part");
      const auto file = req.get_file_value("file");
      if (file.content.empty()) fail(400, "bad_request", "uploaded file is empty");
      doc_id = req.has_file("doc_id") ? req.get_file_value("doc_id").content : "";
      if (doc_id.empty() && !file.filename.empty()) doc_id = doc_id_from_path(file.filename);
      if (doc_id.empty()) doc_id = content_doc_id(file.content);
      check_doc_id(doc_id);
      std::string format = req.has_file("format") ? req.get_file_value("format").content : "";
      if (format.empty())
        format = text::trim(file.content).starts_with("{") ? "paged-layout" : "text";
      InputFormat f;
      try {
        f = parse_input_format(format);
      } catch (const PreconditionError& e) {
        fail(400, "bad_request", e.what());
      }
      if (f == InputFormat::paged_layout)
        r = engine->ingest_pages(doc_id, parse_paged_layout(file.content, std::nullopt));
      else
        r = engine->ingest_text(doc_id, file.content);
    } else {
      const auto body = parse_body(req);
      doc_id = string_field(body, "doc_id", false);
      if (doc_id.empty()) doc_id = content_doc_id(req.body);
      check_doc_id(doc_id);
      if (body.contains("pages")) {
        r = engine->ingest_pages(doc_id, parse_paged_layout(req.body, std::nullopt));
      } else if (body.contains("text")) {
        const auto text = string_field(body, "text");
        if (text::trim(text).empty()) fail(400, "bad_request", "field 'text' is empty");
        r = engine->ingest_text(doc_id, text);
      } else {
        fail(400, "bad_request", "body needs 'text' or 'pages'");
      }
    }
    auto corpus = std::make_shared<const IndexedCorpus>(std::move(r.corpus));
    auto out = toc_json(*corpus);
    out["warnings"] = r.warnings;
    store(std::move(corpus));
    return out;
  }

  void routes() {
    server.Get("/healthz", guarded([this](const httplib::Request&) {
      std::shared_lock lock(mu);
      return json{{"status", "ok"}, {"documents", documents.size()}};
    }));
    server.Post("/documents", guarded([this](const httplib::Request& req) { return ingest(req); }));
    server.Get(R"(/documents/([^/]+)/toc)", guarded([this](const httplib::Request& req) {
      return toc_json(*document(req.matches[1]));
    }));
    server.Post(R"(/documents/([^/]+)/query)", guarded([this](const httplib::Request& req) {
      auto corpus = document(req.matches[1]);
      const auto body = parse_body(req);
      const auto question = string_field(body, "question");
      if (text::trim(question).empty()) fail(400, "bad_request", "field 'question' is empty");
      return answer_json(engine->ask(*corpus, question, query_options(body)));
    }));
    server.Get(R"(/documents/([^/]+)/summary)", guarded([this](const httplib::Request& req) {
      auto corpus = document(req.matches[1]);
      SummaryMode mode = SummaryMode::brief;
      if (req.has_param("mode")) {
        try {
          mode = parse_summary_mode(req.get_param_value("mode"));
        } catch (const PreconditionError& e) {
          fail(400, "bad_request", e.what());
        }
      }
      return summary_json(engine->summarize(*corpus, mode));
    }));
    server.Post("/sessions", guarded([this](const httplib::Request& req) {
      const auto body = parse_body(req);
      auto corpus = document(string_field(body, "doc_id"));
      auto s = std::make_shared<ChatSession>();
      s->session_id = fmt::format("session-{}", next_session++);
      s->doc_id = corpus->doc_id;
      s->corpus = std::move(corpus);
      json out = {{"session_id", s->session_id}, {"doc_id", s->doc_id}};
      std::unique_lock lock(mu);
      sessions[s->session_id] = std::move(s);
      return out;
    }));
    server.Post(R"(/sessions/([^/]+)/messages)", guarded([this](const httplib::Request& req) {
      auto s = session(req.matches[1]);
      const auto body = parse_body(req);
      const auto text = string_field(body, "text");
      if (text::trim(text).empty()) fail(400, "bad_request", "field 'text' is empty");
      const auto opts = query_options(body);
      std::lock_guard lock(s->mu);
      auto answer = engine->ask(*s->corpus, text, opts);
      auto out = answer_json(answer);
      s->turns.push_back({text, std::move(answer)});
      out["session_id"] = s->session_id;
      out["turn"] = s->turns.size();
      return out;
    }));
  }
};

Service::Service(std::shared_ptr<const Engine> engine, ServiceOptions options)
    : impl_(std::make_unique<Impl>()) {
  if (!engine) throw PreconditionError("service needs an engine");
  impl_->engine = std::move(engine);
  impl_->options = std::move(options);
  impl_->preload();
  impl_->routes();
}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                        : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw Error(fmt::format("cannot bind {}:{}", host, port));
  return bound;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::start() {
  impl_->thread = std::thread([this] { run(); });
  impl_->server.wait_until_ready();
}

void Service::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void Service::add_document(std::shared_ptr<const IndexedCorpus> corpus) {
  impl_->store(std::move(corpus));
}

std::vector<std::string> Service::warnings() const { return impl_->warnings; }

}  // namespace docsray
