#include "docsray/providers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "docsray/error.hpp"
#include "docsray/text.hpp"

namespace docsray {
namespace {

std::uint64_t fnv1a(std::string_view a, std::string_view b) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  mix(a);
  mix(std::string_view("\x1f", 1));
  mix(b);
  return h;
}

std::string describe_payload(const ImagePayload& image) {
  auto line = text::first_nonempty_line(image.bytes);
  bool printable = !line.empty() && std::all_of(line.begin(), line.end(), [](unsigned char c) {
    return c >= 0x20 && c != 0x7f;
  });
  if (printable) return fmt::format("Visual content: {}", text::utf8_head(line, 80));
  return fmt::format("Visual content: {}x{} image", image.width, image.height);
}

std::string first_words(std::string_view s, std::size_t n) {
  auto w = text::words(s);
  if (w.size() > n) w.resize(n);
  return text::join(w, " ");
}

std::string rarest_words_reply(std::string_view query, std::string_view context) {
  std::unordered_map<std::string, std::size_t> freq;
  for (auto& w : text::words(query)) ++freq[w];
  for (auto& w : text::words(context)) ++freq[w];
  std::vector<std::pair<std::size_t, std::string>> ranked;
  ranked.reserve(freq.size());
  for (auto& [w, c] : freq) ranked.emplace_back(c, w);
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::string> picked;
  for (std::size_t i = 0; i < ranked.size() && i < 3; ++i) picked.push_back(ranked[i].second);
  return "more about " + text::join(picked, " ");
}

}  // namespace

std::string complete(const LlmBackend& backend, const LlmRequest& request) {
  if (text::trim(request.user_prompt).empty())
    throw PreconditionError("LLM request has an empty user prompt");
  if (!request.images.empty() && !backend.supports_vision())
    throw CapabilityError(
        fmt::format("backend '{}' does not accept image input", backend.id()));
  return backend.complete_raw(request);
}

std::vector<double> embed_raw(const Embedder& embedder, std::string_view text) {
  if (text::trim(text).empty()) throw PreconditionError("cannot embed empty text");
  auto v = embedder.embed_raw(text);
  if (v.size() != embedder.dim())
    throw DimensionMismatch(fmt::format("embedder '{}' returned {} components, expected {}",
                                        embedder.id(), v.size(), embedder.dim()));
  return v;
}

double word_jaccard(std::string_view a, std::string_view b) {
  auto wa = text::words(a);
  auto wb = text::words(b);
  std::unordered_set<std::string> sa(wa.begin(), wa.end());
  std::unordered_set<std::string> sb(wb.begin(), wb.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& w : sa) inter += sb.count(w);
  std::size_t uni = sa.size() + sb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// ---------------------------------------------------------------------------

MockEmbedder::MockEmbedder(std::string model_id, std::size_t dim)
    : model_id_(std::move(model_id)), dim_(dim) {
  if (dim_ == 0) throw PreconditionError("embedder output_dim must be positive");
}

std::string MockEmbedder::id() const { return fmt::format("mock:{}:{}", model_id_, dim_); }

std::size_t MockEmbedder::bucket(std::string_view word) const {
  return static_cast<std::size_t>(fnv1a(model_id_, word) % dim_);
}

std::vector<double> MockEmbedder::embed_raw(std::string_view input) const {
  std::vector<double> v(dim_, 0.0);
  auto ws = text::words(input);
  if (ws.empty()) {
    auto whole = text::trim(input);
    if (whole.empty()) throw PreconditionError("cannot embed empty text");
    v[bucket(whole)] = 1.0;
    return v;
  }
  for (const auto& w : ws) v[bucket(w)] += 1.0;
  double ss = 0.0;
  for (double x : v) ss += x * x;
  const double inv = 1.0 / std::sqrt(ss);
  for (double& x : v) x *= inv;
  return v;
}

// ---------------------------------------------------------------------------

MockLlm::MockLlm(MockLlmOptions options) : options_(std::move(options)) {}

void MockLlm::script(prompts::Kind kind, std::string reply) {
  std::lock_guard lock(mu_);
  scripted_[kind] = std::move(reply);
}

void MockLlm::fail(prompts::Kind kind, bool enabled) {
  std::lock_guard lock(mu_);
  if (enabled)
    failing_.insert(kind);
  else
    failing_.erase(kind);
}

void MockLlm::fail_all(bool enabled) {
  std::lock_guard lock(mu_);
  fail_all_ = enabled;
}

std::vector<LlmRequest> MockLlm::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

std::size_t MockLlm::call_count(prompts::Kind kind) const {
  std::lock_guard lock(mu_);
  return static_cast<std::size_t>(std::count_if(calls_.begin(), calls_.end(), [kind](const auto& r) {
    return prompts::classify(r.user_prompt) == kind;
  }));
}

std::size_t MockLlm::call_count() const {
  std::lock_guard lock(mu_);
  return calls_.size();
}

std::string MockLlm::complete_raw(const LlmRequest& request) const {
  const auto kind = prompts::classify(request.user_prompt);
  {
    std::lock_guard lock(mu_);
    calls_.push_back(request);
    if (fail_all_ || failing_.count(kind))
      throw BackendError(fmt::format("mock backend failure ({})", prompts::to_string(kind)));
    if (auto it = scripted_.find(kind); it != scripted_.end()) return it->second;
  }
  return rule_reply(request);
}

std::string MockLlm::rule_reply(const LlmRequest& request) {
  const std::string_view p = request.user_prompt;
  switch (prompts::classify(p)) {
    case prompts::Kind::boundary: {
      auto a = prompts::boundary_page_a(p);
      auto b = prompts::boundary_page_b(p);
      if (text::starts_with(text::first_nonempty_line(b), "## ")) return "1";
      return word_jaccard(a, b) < 0.2 ? "1" : "0";
    }
    case prompts::Kind::title: {
      auto line = text::first_nonempty_line(prompts::title_sample(p));
      std::vector<std::string> tokens;
      std::size_t i = 0;
      while (i < line.size() && tokens.size() < 8) {
        while (i < line.size() && line[i] == ' ') ++i;
        std::size_t b = i;
        while (i < line.size() && line[i] != ' ') ++i;
        if (i > b) tokens.emplace_back(line.substr(b, i - b));
      }
      return text::join(tokens, " ");
    }
    case prompts::Kind::refine:
      return rarest_words_reply(prompts::refine_query_slot(p), prompts::refine_context_slot(p));
    case prompts::Kind::alternative_queries: {
      std::string q(prompts::alternative_query_slot(p));
      return fmt::format("{} overview\n{} details\n{} background", q, q, q);
    }
    case prompts::Kind::executive_summary:
      return fmt::format("Executive summary of sections: {}",
                         text::first_nonempty_line(p.substr(
                             std::string_view("Based on a document with these sections: ").size())));
    case prompts::Kind::section_summary_brief:
    case prompts::Kind::section_summary_detailed: {
      auto content = first_words(prompts::summary_content_slot(p), 12);
      if (content.empty()) return "";
      return fmt::format("Summary of {}: {}", prompts::summary_title_slot(p), content);
    }
    case prompts::Kind::single_image:
      return request.images.empty() ? "" : describe_payload(request.images.front());
    case prompts::Kind::multi_image: {
      std::vector<std::string> lines;
      for (std::size_t i = 0; i < request.images.size(); ++i)
        lines.push_back(fmt::format("Figure {}: {}", i + 1, describe_payload(request.images[i])));
      return text::join(lines, "\n");
    }
    case prompts::Kind::ocr:
      return request.images.empty() ? "" : std::string(text::trim(request.images.front().bytes));
    case prompts::Kind::answer: {
      // Skip the "[title, p.a-b]" header that precedes each hit.
      auto ctx = prompts::answer_context_slot(p);
      auto line = text::first_nonempty_line(ctx);
      if (text::starts_with(line, "[")) {
        const auto rest = ctx.substr(ctx.find(line) + line.size());
        if (!text::first_nonempty_line(rest).empty()) line = text::first_nonempty_line(rest);
      }
      return fmt::format("According to the document: {}", text::utf8_head(line, 400));
    }
    case prompts::Kind::unknown: break;
  }
  return "";
}

// ---------------------------------------------------------------------------

std::shared_ptr<LlmBackend> make_llm(const LlmBackendConfig& config) {
  if (config.kind == BackendKind::mock) {
    MockLlmOptions opts;
    opts.vision = config.vision;
    if (!config.endpoint.model.empty()) opts.id = config.endpoint.model;
    return std::make_shared<MockLlm>(opts);
  }
  if (config.endpoint.base_url.empty())
    throw PreconditionError("http LLM backend requires a non-empty base URL");
  return std::make_shared<HttpLlm>(config.endpoint, config.vision);
}

std::shared_ptr<const Embedder> make_embedder(const EmbedderConfig& config) {
  if (config.output_dim == 0) throw PreconditionError("embedder output_dim must be positive");
  if (config.kind == BackendKind::mock)
    return std::make_shared<MockEmbedder>(config.model_id, config.output_dim);
  if (config.endpoint.base_url.empty())
    throw PreconditionError("http embedder requires a non-empty base URL");
  auto ep = config.endpoint;
  if (ep.model.empty()) ep.model = config.model_id;
  return std::make_shared<HttpEmbedder>(ep, config.output_dim);
}

}  // namespace docsray
