#include "docsray/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "docsray/error.hpp"

namespace docsray {
namespace {

void check_keys(const YAML::Node& node, std::string_view where,
                std::initializer_list<std::string_view> allowed) {
  if (!node.IsMap()) throw ParseError(fmt::format("config: '{}' must be a mapping", where));
  const std::set<std::string_view> ok(allowed);
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!ok.count(key)) throw ParseError(fmt::format("config: unknown key '{}.{}'", where, key));
  }
}

template <class T>
void read(const YAML::Node& node, std::string_view where, const char* key, T& out) {
  const auto v = node[key];
  if (!v) return;
  try {
    out = v.as<T>();
  } catch (const YAML::Exception&) {
    throw ParseError(fmt::format("config: '{}.{}' has the wrong type", where, key));
  }
}

BackendKind parse_backend(const std::string& s, std::string_view where) {
  if (s == "mock") return BackendKind::mock;
  if (s == "http") return BackendKind::http;
  throw ParseError(fmt::format("config: '{}.backend' must be mock or http, got '{}'", where, s));
}

std::string_view backend_name(BackendKind k) { return k == BackendKind::http ? "http" : "mock"; }

void read_endpoint(const YAML::Node& n, std::string_view where, HttpEndpoint& ep) {
  read(n, where, "base_url", ep.base_url);
  read(n, where, "auth_token_env", ep.auth_token_env);
  long timeout_ms = ep.timeout.count();
  read(n, where, "timeout_ms", timeout_ms);
  ep.timeout = std::chrono::milliseconds(timeout_ms);
  read(n, where, "max_attempts", ep.max_attempts);
  long backoff_ms = ep.retry_backoff.count();
  read(n, where, "retry_backoff_ms", backoff_ms);
  ep.retry_backoff = std::chrono::milliseconds(backoff_ms);
}

void read_embedder(const YAML::Node& n, std::string_view where, EmbedderConfig& e) {
  check_keys(n, where,
             {"backend", "model", "dim", "base_url", "auth_token_env", "timeout_ms",
              "max_attempts", "retry_backoff_ms"});
  std::string backend(backend_name(e.kind));
  read(n, where, "backend", backend);
  e.kind = parse_backend(backend, where);
  read(n, where, "model", e.model_id);
  read(n, where, "dim", e.output_dim);
  read_endpoint(n, where, e.endpoint);
  e.endpoint.model = e.model_id;
}

}  // namespace

EngineConfig EngineConfig::defaults() {
  EngineConfig c;
  c.embedder_a.model_id = "mock-a";
  c.embedder_a.output_dim = 64;
  c.embedder_a.endpoint.model = "mock-a";
  c.embedder_b.model_id = "mock-b";
  c.embedder_b.output_dim = 64;
  c.embedder_b.endpoint.model = "mock-b";
  c.llm.endpoint.model = "mock-llm";
  c.llm.endpoint.auth_token_env = "DOCSRAY_LLM_TOKEN";
  return c;
}

void EngineConfig::validate() const {
  chunking.validate();
  segmentation.validate();
  retrieval.validate();
  answer_params().validate();
  make_tokenizer(tokenizer);
  for (const auto* e : {&embedder_a, &embedder_b}) {
    if (e->model_id.empty()) throw PreconditionError("config: embedder model must be set");
    if (e->output_dim == 0) throw PreconditionError("config: embedder dim must be positive");
    if (e->kind == BackendKind::http && e->endpoint.base_url.empty())
      throw PreconditionError(fmt::format("config: embedder '{}' needs a base_url", e->model_id));
  }
  if (fusion_mode == FusionMode::add && embedder_a.output_dim != embedder_b.output_dim)
    throw PreconditionError("config: add fusion needs embedders of equal dimension");
  if (llm.kind == BackendKind::http && llm.endpoint.base_url.empty())
    throw PreconditionError("config: llm needs a base_url");
}

AnswerParams EngineConfig::answer_params() const {
  AnswerParams p;
  p.retrieval = retrieval;
  p.refinement_iterations = refinement_iterations;
  p.context_budget = context_budget;
  p.sampling = sampling;
  return p;
}

EngineConfig parse_config(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ParseError(fmt::format("config: {}", e.what()));
  }
  EngineConfig c = EngineConfig::defaults();
  if (root.IsNull()) return c;
  check_keys(root, "root", {"chunking", "segmentation", "retrieval", "generation", "embedding", "llm"});

  if (auto n = root["chunking"]) {
    check_keys(n, "chunking", {"window_tokens", "overlap_tokens", "min_tail_tokens", "tokenizer"});
    read(n, "chunking", "window_tokens", c.chunking.window_tokens);
    read(n, "chunking", "overlap_tokens", c.chunking.overlap_tokens);
    read(n, "chunking", "min_tail_tokens", c.chunking.min_tail_tokens);
    read(n, "chunking", "tokenizer", c.tokenizer);
  }
  if (auto n = root["segmentation"]) {
    check_keys(n, "segmentation",
               {"initial_chunk_pages", "min_pages", "max_pages", "excerpt_chars",
                "title_sample_chars"});
    read(n, "segmentation", "initial_chunk_pages", c.segmentation.initial_chunk_pages);
    read(n, "segmentation", "min_pages", c.segmentation.min_pages);
    read(n, "segmentation", "max_pages", c.segmentation.max_pages);
    read(n, "segmentation", "excerpt_chars", c.segmentation.excerpt_chars);
    read(n, "segmentation", "title_sample_chars", c.segmentation.title_sample_chars);
  }
  if (auto n = root["retrieval"]) {
    check_keys(n, "retrieval", {"beta", "coarse_top_k", "fine_top_k", "mode", "min_score"});
    read(n, "retrieval", "beta", c.retrieval.beta);
    read(n, "retrieval", "coarse_top_k", c.retrieval.k1);
    read(n, "retrieval", "fine_top_k", c.retrieval.k2);
    read(n, "retrieval", "min_score", c.retrieval.min_score);
    std::string mode(to_string(c.retrieval.mode));
    read(n, "retrieval", "mode", mode);
    try {
      c.retrieval.mode = parse_retrieval_mode(mode);
    } catch (const PreconditionError& e) {
      throw ParseError(fmt::format("config: retrieval.mode: {}", e.what()));
    }
  }
  if (auto n = root["generation"]) {
    check_keys(n, "generation",
               {"temperature", "top_p", "repeat_penalty", "refinement_iterations",
                "context_budget"});
    read(n, "generation", "temperature", c.sampling.temperature);
    read(n, "generation", "top_p", c.sampling.top_p);
    read(n, "generation", "repeat_penalty", c.sampling.repeat_penalty);
    read(n, "generation", "refinement_iterations", c.refinement_iterations);
    read(n, "generation", "context_budget", c.context_budget);
  }
  if (auto n = root["embedding"]) {
    check_keys(n, "embedding", {"fusion", "prenormalize", "model_a", "model_b"});
    std::string mode(to_string(c.fusion_mode));
    read(n, "embedding", "fusion", mode);
    try {
      c.fusion_mode = parse_fusion_mode(mode);
    } catch (const Error& e) {
      throw ParseError(fmt::format("config: embedding.fusion: {}", e.what()));
    }
    read(n, "embedding", "prenormalize", c.prenormalize);
    if (auto a = n["model_a"]) read_embedder(a, "embedding.model_a", c.embedder_a);
    if (auto b = n["model_b"]) read_embedder(b, "embedding.model_b", c.embedder_b);
  }
  if (auto n = root["llm"]) {
    check_keys(n, "llm",
               {"backend", "model", "vision", "base_url", "auth_token_env", "timeout_ms",
                "max_attempts", "retry_backoff_ms"});
    std::string backend(backend_name(c.llm.kind));
    read(n, "llm", "backend", backend);
    c.llm.kind = parse_backend(backend, "llm");
    read(n, "llm", "model", c.llm.endpoint.model);
    read(n, "llm", "vision", c.llm.vision);
    read_endpoint(n, "llm", c.llm.endpoint);
  }
  return c;
}

EngineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot read config '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_env_overrides(EngineConfig& c, const EnvLookup& lookup) {
  auto apply = [&](const std::string& prefix, BackendKind& kind, HttpEndpoint& ep,
                   std::string* model_id) {
    if (auto v = lookup(prefix + "_BACKEND")) kind = parse_backend(*v, prefix);
    if (auto v = lookup(prefix + "_BASE_URL")) ep.base_url = *v;
    if (auto v = lookup(prefix + "_MODEL")) {
      ep.model = *v;
      if (model_id) *model_id = *v;
    }
    if (auto v = lookup(prefix + "_TOKEN_ENV")) ep.auth_token_env = *v;
  };
  apply("DOCSRAY_LLM", c.llm.kind, c.llm.endpoint, nullptr);
  apply("DOCSRAY_EMBED_A", c.embedder_a.kind, c.embedder_a.endpoint, &c.embedder_a.model_id);
  apply("DOCSRAY_EMBED_B", c.embedder_b.kind, c.embedder_b.endpoint, &c.embedder_b.model_id);
}

void apply_env_overrides(EngineConfig& c) {
  apply_env_overrides(c, [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str()); v && *v) return std::string(v);
    return std::nullopt;
  });
}

EngineConfig resolve_config(const std::optional<std::filesystem::path>& path) {
  EngineConfig c = EngineConfig::defaults();
  if (path) {
    c = load_config(*path);
  } else if (const char* env = std::getenv("DOCSRAY_CONFIG"); env && *env) {
    c = load_config(env);
  }
  apply_env_overrides(c);
  c.validate();
  return c;
}

std::string config_to_yaml(const EngineConfig& c) {
  YAML::Emitter out;
  auto embedder = [&](const char* key, const EmbedderConfig& e) {
    out << YAML::Key << key << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "backend" << YAML::Value << std::string(backend_name(e.kind));
    out << YAML::Key << "model" << YAML::Value << e.model_id;
    out << YAML::Key << "dim" << YAML::Value << e.output_dim;
    if (!e.endpoint.base_url.empty())
      out << YAML::Key << "base_url" << YAML::Value << e.endpoint.base_url;
    out << YAML::EndMap;
  };
  out << YAML::BeginMap;
  out << YAML::Key << "chunking" << YAML::Value << YAML::BeginMap
      << YAML::Key << "window_tokens" << YAML::Value << c.chunking.window_tokens
      << YAML::Key << "overlap_tokens" << YAML::Value << c.chunking.overlap_tokens
      << YAML::Key << "min_tail_tokens" << YAML::Value << c.chunking.min_tail_tokens
      << YAML::Key << "tokenizer" << YAML::Value << c.tokenizer << YAML::EndMap;
  out << YAML::Key << "segmentation" << YAML::Value << YAML::BeginMap
      << YAML::Key << "initial_chunk_pages" << YAML::Value << c.segmentation.initial_chunk_pages
      << YAML::Key << "min_pages" << YAML::Value << c.segmentation.min_pages
      << YAML::Key << "max_pages" << YAML::Value << c.segmentation.max_pages
      << YAML::Key << "excerpt_chars" << YAML::Value << c.segmentation.excerpt_chars
      << YAML::Key << "title_sample_chars" << YAML::Value << c.segmentation.title_sample_chars
      << YAML::EndMap;
  out << YAML::Key << "retrieval" << YAML::Value << YAML::BeginMap
      << YAML::Key << "beta" << YAML::Value << c.retrieval.beta
      << YAML::Key << "coarse_top_k" << YAML::Value << c.retrieval.k1
      << YAML::Key << "fine_top_k" << YAML::Value << c.retrieval.k2
      << YAML::Key << "mode" << YAML::Value << std::string(to_string(c.retrieval.mode))
      << YAML::Key << "min_score" << YAML::Value << c.retrieval.min_score << YAML::EndMap;
  out << YAML::Key << "generation" << YAML::Value << YAML::BeginMap
      << YAML::Key << "temperature" << YAML::Value << c.sampling.temperature
      << YAML::Key << "top_p" << YAML::Value << c.sampling.top_p
      << YAML::Key << "repeat_penalty" << YAML::Value << c.sampling.repeat_penalty
      << YAML::Key << "refinement_iterations" << YAML::Value << c.refinement_iterations
      << YAML::Key << "context_budget" << YAML::Value << c.context_budget << YAML::EndMap;
  out << YAML::Key << "embedding" << YAML::Value << YAML::BeginMap
      << YAML::Key << "fusion" << YAML::Value << std::string(to_string(c.fusion_mode))
      << YAML::Key << "prenormalize" << YAML::Value << c.prenormalize;
  embedder("model_a", c.embedder_a);
  embedder("model_b", c.embedder_b);
  out << YAML::EndMap;
  out << YAML::Key << "llm" << YAML::Value << YAML::BeginMap
      << YAML::Key << "backend" << YAML::Value << std::string(backend_name(c.llm.kind))
      << YAML::Key << "model" << YAML::Value << c.llm.endpoint.model
      << YAML::Key << "vision" << YAML::Value << c.llm.vision << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace docsray
