#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "docsray/answer.hpp"
#include "docsray/chunk_index.hpp"
#include "docsray/fusion.hpp"
#include "docsray/providers.hpp"
#include "docsray/pseudo_toc.hpp"
#include "docsray/retrieval.hpp"

namespace docsray {

struct EngineConfig {
  ChunkingParams chunking;
  std::string tokenizer = "wordpunct";
  SegmentationParams segmentation;
  RetrievalParams retrieval;
  Sampling sampling;
  int refinement_iterations = 1;
  std::size_t context_budget = 8000;

  FusionMode fusion_mode = FusionMode::concat;
  bool prenormalize = false;
  EmbedderConfig embedder_a;
  EmbedderConfig embedder_b;
  LlmBackendConfig llm;

  // Built-in defaults: mock backends, hyperparameters as shipped in config/default.yaml.
  static EngineConfig defaults();

  // Throws PreconditionError naming the offending field.
  void validate() const;

  AnswerParams answer_params() const;
};

// YAML text; omitted keys keep their defaults, unknown keys are a ParseError.
EngineConfig parse_config(std::string_view yaml_text);
EngineConfig load_config(const std::filesystem::path& path);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// Reads DOCSRAY_{LLM,EMBED_A,EMBED_B}_{BACKEND,BASE_URL,MODEL,TOKEN_ENV}.
void apply_env_overrides(EngineConfig& config, const EnvLookup& lookup);
void apply_env_overrides(EngineConfig& config);

// Config resolution used by the CLI: explicit path, else $DOCSRAY_CONFIG,
// else built-in defaults; env overrides applied last.
EngineConfig resolve_config(const std::optional<std::filesystem::path>& path);

std::string config_to_yaml(const EngineConfig& config);

}  // namespace docsray
