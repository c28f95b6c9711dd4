#include <gtest/gtest.h>

#include <map>

#include "docsray/config.hpp"
#include "docsray/error.hpp"

using namespace docsray;

namespace {

const std::string kDefaultYaml = std::string(DOCSRAY_SOURCE_DIR) + "/config/default.yaml";

EnvLookup env_of(std::map<std::string, std::string> vars) {
  return [vars](const std::string& k) -> std::optional<std::string> {
    auto it = vars.find(k);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

}  // namespace

TEST(Config, ShippedFileHasTheDocumentedValues) {
  const auto c = load_config(kDefaultYaml);
  EXPECT_EQ(c.chunking.window_tokens, 550u);
  EXPECT_EQ(c.chunking.overlap_tokens, 25u);
  EXPECT_EQ(c.chunking.min_tail_tokens, 50u);
  EXPECT_EQ(c.tokenizer, "wordpunct");
  EXPECT_EQ(c.segmentation.initial_chunk_pages, 5u);
  EXPECT_EQ(c.segmentation.min_pages, 3u);
  EXPECT_EQ(c.segmentation.max_pages, 15u);
  EXPECT_EQ(c.segmentation.excerpt_chars, 500u);
  EXPECT_EQ(c.segmentation.title_sample_chars, 1500u);
  EXPECT_DOUBLE_EQ(c.retrieval.beta, 0.3);
  EXPECT_EQ(c.retrieval.k1, 5u);
  EXPECT_EQ(c.retrieval.k2, 10u);
  EXPECT_EQ(c.retrieval.mode, RetrievalMode::hierarchical);
  EXPECT_DOUBLE_EQ(c.retrieval.min_score, 0.0);
  EXPECT_DOUBLE_EQ(c.sampling.temperature, 0.7);
  EXPECT_DOUBLE_EQ(c.sampling.top_p, 0.95);
  EXPECT_DOUBLE_EQ(c.sampling.repeat_penalty, 1.1);
  EXPECT_EQ(c.refinement_iterations, 1);
  EXPECT_EQ(c.context_budget, 8000u);
  EXPECT_EQ(c.fusion_mode, FusionMode::concat);
  EXPECT_FALSE(c.prenormalize);
  EXPECT_EQ(c.embedder_a.model_id, "mock-a");
  EXPECT_EQ(c.embedder_b.output_dim, 64u);
  EXPECT_EQ(c.llm.kind, BackendKind::mock);
  EXPECT_TRUE(c.llm.vision);
}

TEST(Config, BuiltInDefaultsMatchTheShippedFile) {
  EXPECT_EQ(config_to_yaml(load_config(kDefaultYaml)), config_to_yaml(EngineConfig::defaults()));
  EXPECT_EQ(config_to_yaml(parse_config("")), config_to_yaml(EngineConfig::defaults()));
}

TEST(Config, YamlRoundTrip) {
  auto c = parse_config("retrieval:\n  beta: 0.6\n  mode: flat\nchunking:\n  window_tokens: 300\n");
  EXPECT_DOUBLE_EQ(c.retrieval.beta, 0.6);
  EXPECT_EQ(c.retrieval.mode, RetrievalMode::flat);
  EXPECT_EQ(c.chunking.window_tokens, 300u);
  EXPECT_EQ(config_to_yaml(parse_config(config_to_yaml(c))), config_to_yaml(c));
}

TEST(Config, UnknownKeysAndBadValuesAreRejected) {
  EXPECT_THROW(parse_config("retrieval:\n  betta: 0.3\n"), ParseError);
  EXPECT_THROW(parse_config("colour: blue\n"), ParseError);
  EXPECT_THROW(parse_config("retrieval:\n  beta: lots\n"), ParseError);
  EXPECT_THROW(parse_config("embedding:\n  fusion: mean\n"), ParseError);
  EXPECT_THROW(parse_config("retrieval: [1, 2"), ParseError);
  EXPECT_THROW(load_config("/nonexistent/docsray.yaml"), ParseError);
}

TEST(Config, ValidationNamesTheField) {
  auto c = EngineConfig::defaults();
  c.retrieval.beta = 2.0;
  EXPECT_THROW(c.validate(), PreconditionError);
  c = EngineConfig::defaults();
  c.refinement_iterations = 3;
  EXPECT_THROW(c.validate(), PreconditionError);
  c = EngineConfig::defaults();
  c.fusion_mode = FusionMode::add;
  c.embedder_b.output_dim = 32;
  EXPECT_THROW(c.validate(), PreconditionError);
}

TEST(Config, EnvironmentOverridesBackends) {
  auto c = EngineConfig::defaults();
  apply_env_overrides(c, env_of({{"DOCSRAY_LLM_BACKEND", "http"},
                                 {"DOCSRAY_LLM_BASE_URL", "http://llm:8080/v1"},
                                 {"DOCSRAY_LLM_MODEL", "gemma-3"},
                                 {"DOCSRAY_LLM_TOKEN_ENV", "MY_TOKEN"},
                                 {"DOCSRAY_EMBED_A_MODEL", "bge-m3"}}));
  EXPECT_EQ(c.llm.kind, BackendKind::http);
  EXPECT_EQ(c.llm.endpoint.base_url, "http://llm:8080/v1");
  EXPECT_EQ(c.llm.endpoint.model, "gemma-3");
  EXPECT_EQ(c.llm.endpoint.auth_token_env, "MY_TOKEN");
  EXPECT_EQ(c.embedder_a.model_id, "bge-m3");
  EXPECT_EQ(c.embedder_b.model_id, "mock-b");
  EXPECT_THROW(apply_env_overrides(c, env_of({{"DOCSRAY_EMBED_B_BACKEND", "grpc"}})), ParseError);
}

TEST(Config, AnswerParamsCarryGenerationSettings) {
  auto c = parse_config("generation:\n  refinement_iterations: 2\n  context_budget: 100\n");
  const auto a = c.answer_params();
  EXPECT_EQ(a.refinement_iterations, 2);
  EXPECT_EQ(a.context_budget, 100u);
  EXPECT_DOUBLE_EQ(a.retrieval.beta, 0.3);
}
