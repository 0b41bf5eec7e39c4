#include "textstate/embedding.hpp"

#include <cmath>
#include <cstdint>

#include <nlohmann/json.hpp>

#include "http_client.hpp"
#include "text_norm.hpp"
#include "textstate/errors.hpp"

namespace textstate {

double cosine_sim(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim())
    throw ValidationError("cosine_sim: dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                          std::to_string(b.dim()) + ")");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a.components[i] * b.components[i];
    na += a.components[i] * a.components[i];
    nb += b.components[i] * b.components[i];
  }
  if (na == 0.0 || nb == 0.0) throw ValidationError("cosine_sim: zero-norm vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void l2_normalize(EmbeddingVector& v) {
  double norm2 = 0.0;
  for (double x : v.components) norm2 += x * x;
  if (norm2 <= 0.0) return;
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v.components) x *= inv;
}

}  // namespace

HashedBagEmbedder::HashedBagEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw ValidationError("embedding dimension must be positive");
}

EmbeddingVector HashedBagEmbedder::embed(std::string_view text) const {
  if (detail::trim_ws(text).empty()) throw EmptyInputError("cannot embed empty text");
  const std::string norm = detail::normalize_copy(text);
  EmbeddingVector v;
  v.components.assign(dim_, 0.0);
  std::size_t i = 0;
  while (i < norm.size()) {
    // Whitespace split, so scriptio continua text still yields one token.
    while (i < norm.size() && std::isspace(static_cast<unsigned char>(norm[i]))) ++i;
    std::size_t j = i;
    while (j < norm.size() && !std::isspace(static_cast<unsigned char>(norm[j]))) ++j;
    if (j > i) v.components[fnv1a64({norm.data() + i, j - i}) % dim_] += 1.0;
    i = j;
  }
  l2_normalize(v);
  return v;
}

RemoteEmbedder::RemoteEmbedder(EmbedProviderConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw ValidationError("embedding provider endpoint is empty");
}

EmbeddingVector RemoteEmbedder::embed(std::string_view text) const {
  if (detail::trim_ws(text).empty()) throw EmptyInputError("cannot embed empty text");
  nlohmann::json body = {{"input", std::string(text)}};
  if (!config_.model_id.empty()) body["model"] = config_.model_id;

  detail::HttpRequestOptions opts;
  opts.url = config_.endpoint;
  opts.auth_env = config_.auth_env;
  opts.timeout = config_.timeout;
  const std::string response = detail::post_json(opts, body.dump());

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(response);
  } catch (const nlohmann::json::parse_error&) {
    throw TransportError("embedding provider returned non-JSON payload", 1);
  }
  const nlohmann::json* arr = nullptr;
  if (doc.contains("embedding") && doc["embedding"].is_array()) {
    arr = &doc["embedding"];
  } else if (doc.contains("data") && doc["data"].is_array() && !doc["data"].empty() &&
             doc["data"][0].contains("embedding")) {
    arr = &doc["data"][0]["embedding"];
  }
  if (arr == nullptr || arr->empty())
    throw TransportError("embedding provider response carries no embedding array", 1);

  EmbeddingVector v;
  v.components.reserve(arr->size());
  for (const auto& x : *arr) v.components.push_back(x.get<double>());
  l2_normalize(v);
  return v;
}

}  // namespace textstate
