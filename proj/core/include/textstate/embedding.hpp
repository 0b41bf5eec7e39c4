#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace textstate {

inline constexpr std::size_t kDefaultEmbeddingDim = 256;

struct EmbeddingVector {
  std::vector<double> components;

  std::size_t dim() const { return components.size(); }
};

/// sim(a, b) = a.b / (|a||b|), in [-1, 1].
/// Throws ValidationError on dimension mismatch or a zero-norm operand.
double cosine_sim(const EmbeddingVector& a, const EmbeddingVector& b);

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual EmbeddingVector embed(std::string_view text) const = 0;
};

/// Deterministic fallback embedder: tokens (whitespace-split, case/width
/// normalized) are hashed with FNV-1a 64 into `dim` count buckets, then the
/// vector is L2-normalized. Stable across runs and platforms; no model
/// download involved.
class HashedBagEmbedder final : public Embedder {
 public:
  explicit HashedBagEmbedder(std::size_t dim = kDefaultEmbeddingDim);
  EmbeddingVector embed(std::string_view text) const override;

 private:
  std::size_t dim_;
};

struct EmbedProviderConfig {
  std::string endpoint;  // full URL of an embeddings endpoint
  std::string model_id;
  std::string auth_env;  // env var holding the bearer secret; never logged
  std::chrono::milliseconds timeout{30000};
};

/// External embedding provider. Accepts either {"embedding": [...]} or the
/// {"data": [{"embedding": [...]}]} response shape; vectors are L2-normalized
/// on receipt.
class RemoteEmbedder final : public Embedder {
 public:
  explicit RemoteEmbedder(EmbedProviderConfig config);
  EmbeddingVector embed(std::string_view text) const override;

 private:
  EmbedProviderConfig config_;
};

}  // namespace textstate
