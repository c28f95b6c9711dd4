#include <cstdlib>
#include <thread>

#include <boost/beast/core/detail/base64.hpp>
#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "docsray/error.hpp"
#include "docsray/providers.hpp"

namespace docsray {
namespace {

using nlohmann::json;

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing slash
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw PreconditionError(fmt::format("base URL '{}' has no scheme", url));
  auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = url.substr(0, path_start);
  if (path_start != std::string::npos) out.prefix = url.substr(path_start);
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

std::string base64(const std::string& bytes) {
  namespace b64 = boost::beast::detail::base64;
  std::string out(b64::encoded_size(bytes.size()), '\0');
  out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
  return out;
}

}  // namespace

std::string http_post_json(const HttpEndpoint& endpoint, std::string_view path,
                           const std::string& body) {
  if (endpoint.base_url.empty()) throw PreconditionError("HTTP backend has no base URL");
  const auto url = split_url(endpoint.base_url);

  httplib::Headers headers;
  if (!endpoint.auth_token_env.empty()) {
    if (const char* token = std::getenv(endpoint.auth_token_env.c_str()); token && *token)
      headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(endpoint.timeout - secs);
  const int attempts = std::max(1, endpoint.max_attempts);
  const std::string full_path = url.prefix + std::string(path);

  std::string last_error;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    httplib::Client client(url.origin);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    auto res = client.Post(full_path, headers, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
    } else if (res->status >= 500) {
      last_error = fmt::format("HTTP {}: {}", res->status, res->body);
    } else if (res->status >= 400) {
      throw BackendError(fmt::format("{}{} rejected the request: HTTP {}: {}", endpoint.base_url,
                                     path, res->status, res->body));
    } else {
      return res->body;
    }
    if (attempt < attempts) std::this_thread::sleep_for(endpoint.retry_backoff * attempt);
  }
  throw TransportError(fmt::format("{}{} failed after {} attempts: {}", endpoint.base_url, path,
                                   attempts, last_error),
                       attempts);
}

HttpLlm::HttpLlm(HttpEndpoint endpoint, bool vision)
    : endpoint_(std::move(endpoint)), vision_(vision) {
  if (endpoint_.base_url.empty()) throw PreconditionError("http LLM backend requires a base URL");
}

std::string HttpLlm::id() const { return fmt::format("http:{}:{}", endpoint_.base_url, endpoint_.model); }

std::string HttpLlm::request_body(const LlmRequest& request) const {
  json messages = json::array();
  if (request.system_prompt)
    messages.push_back({{"role", "system"}, {"content", *request.system_prompt}});
  if (request.images.empty()) {
    messages.push_back({{"role", "user"}, {"content", request.user_prompt}});
  } else {
    json parts = json::array();
    parts.push_back({{"type", "text"}, {"text", request.user_prompt}});
    for (const auto& img : request.images) {
      parts.push_back(
          {{"type", "image_url"},
           {"image_url", {{"url", fmt::format("data:{};base64,{}", img.media_type, base64(img.bytes))}}}});
    }
    messages.push_back({{"role", "user"}, {"content", parts}});
  }
  json body = {
      {"model", endpoint_.model},
      {"messages", messages},
      {"temperature", request.sampling.temperature},
      {"top_p", request.sampling.top_p},
      {"repeat_penalty", request.sampling.repeat_penalty},
      {"stream", false},
  };
  return body.dump();
}

std::string HttpLlm::complete_raw(const LlmRequest& request) const {
  const auto reply = http_post_json(endpoint_, "/chat/completions", request_body(request));
  json parsed;
  try {
    parsed = json::parse(reply);
  } catch (const json::exception& e) {
    throw BackendError(fmt::format("chat completion reply is not JSON: {}", e.what()));
  }
  const auto* content = [&]() -> const json* {
    if (!parsed.contains("choices") || !parsed["choices"].is_array() || parsed["choices"].empty())
      return nullptr;
    const auto& choice = parsed["choices"][0];
    if (!choice.contains("message") || !choice["message"].contains("content")) return nullptr;
    return &choice["message"]["content"];
  }();
  if (!content || !(content->is_string() || content->is_null()))
    throw BackendError("chat completion reply has no choices[0].message.content");
  return content->is_null() ? std::string() : content->get<std::string>();
}

HttpEmbedder::HttpEmbedder(HttpEndpoint endpoint, std::size_t dim)
    : endpoint_(std::move(endpoint)), dim_(dim) {
  if (endpoint_.base_url.empty()) throw PreconditionError("http embedder requires a base URL");
  if (dim_ == 0) throw PreconditionError("embedder output_dim must be positive");
}

std::string HttpEmbedder::id() const {
  return fmt::format("http:{}:{}:{}", endpoint_.base_url, endpoint_.model, dim_);
}

std::vector<double> HttpEmbedder::embed_raw(std::string_view text) const {
  json body = {{"model", endpoint_.model}, {"input", std::string(text)}};
  const auto reply = http_post_json(endpoint_, "/embeddings", body.dump());
  std::vector<double> out;
  try {
    const auto parsed = json::parse(reply);
    out = parsed.at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw BackendError(fmt::format("embedding reply malformed: {}", e.what()));
  }
  if (out.size() != dim_)
    throw DimensionMismatch(
        fmt::format("embedder '{}' returned {} components, expected {}", id(), out.size(), dim_));
  return out;
}

}  // namespace docsray
