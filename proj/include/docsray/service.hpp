#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "docsray/chat.hpp"
#include "docsray/engine.hpp"

namespace docsray {

struct ServiceOptions {
  // Indexes found here are loaded at startup; newly ingested documents are saved here.
  std::optional<std::filesystem::path> index_dir;
};

// JSON HTTP API over one Engine.
//
//   POST /documents                    ingest (JSON text, JSON paged layout, or multipart "file")
//   GET  /documents/{id}/toc
//   POST /documents/{id}/query         {question, mode?, iterations?}
//   GET  /documents/{id}/summary?mode=brief|detailed
//   POST /sessions                     {doc_id}
//   POST /sessions/{id}/messages       {text, mode?, iterations?}
//   GET  /healthz
//
// Failures reply {"code", "message"} with 400 (bad input), 404 (unknown id)
// or 502 (backend failure).
class Service {
 public:
  Service(std::shared_ptr<const Engine> engine, ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws on failure.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void run();
  // run() on a background thread; returns once the server accepts connections.
  void start();
  void stop();

  void add_document(std::shared_ptr<const IndexedCorpus> corpus);
  std::vector<std::string> warnings() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace docsray
