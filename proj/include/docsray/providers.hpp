#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "docsray/prompts.hpp"

namespace docsray {

struct Sampling {
  double temperature = 0.7;
  double top_p = 0.95;
  double repeat_penalty = 1.1;
};

// Raw image bytes plus a media type tag ("image/png", ...). width/height are
// the dimensions the image should be presented at (0 when unknown).
struct ImagePayload {
  std::string media_type = "image/png";
  std::string bytes;
  int width = 0;
  int height = 0;
};

struct LlmRequest {
  std::optional<std::string> system_prompt;
  std::string user_prompt;
  std::vector<ImagePayload> images;
  Sampling sampling;
};

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual std::string id() const = 0;
  virtual bool supports_vision() const = 0;
  // Raw completion text. Implementations may assume the request was validated.
  virtual std::string complete_raw(const LlmRequest& request) const = 0;
};

// Validates the request (non-empty prompt, vision capability) and forwards it.
// The reply is returned verbatim; an empty reply is the caller's to handle.
std::string complete(const LlmBackend& backend, const LlmRequest& request);

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::string id() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::vector<double> embed_raw(std::string_view text) const = 0;
};

// Rejects empty text and enforces the backend's declared output dimension.
std::vector<double> embed_raw(const Embedder& embedder, std::string_view text);

// ---------------------------------------------------------------------------
// Mock backends

// Token-hashing embedder: every word adds 1 to one of `dim` buckets (FNV-1a of
// the model id and the word), then the vector is L2-normalized. Texts sharing
// more words have higher cosine.
class MockEmbedder final : public Embedder {
 public:
  MockEmbedder(std::string model_id, std::size_t dim);
  std::string id() const override;
  std::size_t dim() const override { return dim_; }
  std::vector<double> embed_raw(std::string_view text) const override;

  std::size_t bucket(std::string_view word) const;

 private:
  std::string model_id_;
  std::size_t dim_;
};

struct MockLlmOptions {
  std::string id = "mock-llm";
  bool vision = true;
};

// Rule-driven LLM. Each prompt template has a documented deterministic rule
// (see rule_reply); tests can override a template's reply or make it fail.
class MockLlm final : public LlmBackend {
 public:
  explicit MockLlm(MockLlmOptions options = {});

  std::string id() const override { return options_.id; }
  bool supports_vision() const override { return options_.vision; }
  std::string complete_raw(const LlmRequest& request) const override;

  void script(prompts::Kind kind, std::string reply);
  void fail(prompts::Kind kind, bool enabled = true);
  void fail_all(bool enabled = true);

  std::vector<LlmRequest> calls() const;
  std::size_t call_count(prompts::Kind kind) const;
  std::size_t call_count() const;

  // The pure rule: a function of the request alone.
  //   boundary  "1" iff Page B's first line starts with "## " or the word
  //             Jaccard overlap of the two excerpts is below 0.2, else "0"
  //   title     first non-empty line of the passage, at most 8 tokens
  //   refine    "more about " + the 3 rarest words of query+context
  //             (ties broken lexicographically)
  //   answer    "According to the document: " + first text line of the context
  static std::string rule_reply(const LlmRequest& request);

 private:
  MockLlmOptions options_;
  mutable std::mutex mu_;
  std::map<prompts::Kind, std::string> scripted_;
  std::set<prompts::Kind> failing_;
  bool fail_all_ = false;
  mutable std::vector<LlmRequest> calls_;
};

double word_jaccard(std::string_view a, std::string_view b);

// ---------------------------------------------------------------------------
// OpenAI-compatible HTTP backends

struct HttpEndpoint {
  std::string base_url;  // e.g. http://localhost:8080/v1
  std::string model;
  std::string auth_token_env;  // name of the env var holding the bearer token
  std::chrono::milliseconds timeout{60000};
  int max_attempts = 3;
  std::chrono::milliseconds retry_backoff{200};
};

class HttpLlm final : public LlmBackend {
 public:
  HttpLlm(HttpEndpoint endpoint, bool vision);
  std::string id() const override;
  bool supports_vision() const override { return vision_; }
  std::string complete_raw(const LlmRequest& request) const override;

  // Chat-completions JSON body for `request`.
  std::string request_body(const LlmRequest& request) const;

 private:
  HttpEndpoint endpoint_;
  bool vision_;
};

class HttpEmbedder final : public Embedder {
 public:
  HttpEmbedder(HttpEndpoint endpoint, std::size_t dim);
  std::string id() const override;
  std::size_t dim() const override { return dim_; }
  std::vector<double> embed_raw(std::string_view text) const override;

 private:
  HttpEndpoint endpoint_;
  std::size_t dim_;
};

// POSTs `body` to base_url + path with bounded retries on transport failures
// and 5xx replies. Returns the response body of the first 2xx reply.
std::string http_post_json(const HttpEndpoint& endpoint, std::string_view path,
                           const std::string& body);

// ---------------------------------------------------------------------------
// Construction from configuration

enum class BackendKind { mock, http };

struct LlmBackendConfig {
  BackendKind kind = BackendKind::mock;
  HttpEndpoint endpoint;
  bool vision = true;
};

struct EmbedderConfig {
  BackendKind kind = BackendKind::mock;
  std::string model_id;
  std::size_t output_dim = 0;
  HttpEndpoint endpoint;
};

std::shared_ptr<LlmBackend> make_llm(const LlmBackendConfig& config);
std::shared_ptr<const Embedder> make_embedder(const EmbedderConfig& config);

}  // namespace docsray
