/*
 * Copyright 2026 The DragForge Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Exact cosine retrieval of few-shot examples over an embedded extra corpus.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dragforge/corpus.hpp"
#include "dragforge/error.hpp"

namespace dragforge {

template <typename Scalar>
using Embedding = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using EmbeddingVector = Embedding<float>;

// Cosine of the angle between s and v, accumulated in double and clamped to
// [-1, 1]. Throws ValidationError on a dimension mismatch or a zero vector.
template <typename DerivedS, typename DerivedV>
double cosine_similarity(const Eigen::MatrixBase<DerivedS>& s,
                         const Eigen::MatrixBase<DerivedV>& v) {
  if (s.size() != v.size()) {
    throw ValidationError("cosine_similarity: dimension mismatch (" + std::to_string(s.size()) +
                          " vs " + std::to_string(v.size()) + ")");
  }
  const auto sd = s.template cast<double>();
  const auto vd = v.template cast<double>();
  const double ns = sd.norm();
  const double nv = vd.norm();
  if (!(ns > 0.0) || !(nv > 0.0)) throw ValidationError("cosine_similarity: zero-norm vector");
  const double c = sd.dot(vd) / (ns * nv);
  return std::clamp(c, -1.0, 1.0);
}

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string provider_id() const = 0;
  virtual std::size_t dim() const = 0;
  // One vector per text, in request order. Throws ProviderError.
  virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) = 0;
};

// Deterministic model-free embedder: signed feature hashing of character
// 1..max_ngram-grams into `dim` buckets, then L2 normalization.
class HashingEmbedder final : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(std::size_t dim = 64, std::uint64_t seed = 0, std::size_t max_ngram = 3);

  std::string provider_id() const override;
  std::size_t dim() const override { return dim_; }
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

  EmbeddingVector embed(std::string_view text) const;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
  std::size_t max_ngram_;
};

struct HttpProviderOptions {
  std::size_t batch_size = 32;
  int max_retries = 4;  // retries after the first attempt
  std::chrono::milliseconds initial_backoff{200};
  double backoff_multiplier = 2.0;
  std::chrono::seconds timeout{30};
  std::size_t expected_dim = 0;  // 0: learn from the first response
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to this_thread::sleep_for
};

// POSTs {"texts": [...]} and expects {"vectors": [[...], ...]}. Connection
// failures, 429 and 5xx are retried with exponential backoff.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(std::string url, HttpProviderOptions options = {});

  std::string provider_id() const override { return "http:" + url_; }
  std::size_t dim() const override { return dim_; }
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

 private:
  std::vector<EmbeddingVector> post_batch(std::span<const std::string> texts);

  std::string url_;
  std::string base_;
  std::string path_;
  HttpProviderOptions options_;
  std::size_t dim_;
};

inline constexpr const char* kEmbedUrlEnv = "DRAGFORGE_EMBED_URL";

class VectorIndex {
 public:
  VectorIndex() = default;
  // vectors holds one column per pair. Validates ids, dims and norms.
  VectorIndex(std::vector<ParallelPair> pairs, Eigen::MatrixXf vectors, std::string provider_id);

  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(vectors_.rows()); }
  const std::string& provider_id() const noexcept { return provider_id_; }
  const std::vector<ParallelPair>& pairs() const noexcept { return pairs_; }
  const Eigen::MatrixXf& vectors() const noexcept { return vectors_; }
  auto vector(std::size_t i) const { return vectors_.col(static_cast<Eigen::Index>(i)); }

 private:
  std::vector<ParallelPair> pairs_;
  Eigen::MatrixXf vectors_;
  std::string provider_id_;
};

enum class IndexSide { kSource, kTarget };

IndexSide parse_index_side(const std::string& name);

VectorIndex build_index(std::span<const ParallelPair> pairs, EmbeddingProvider& provider,
                        IndexSide side = IndexSide::kSource, std::size_t batch_size = 64);

// Binary vectors at `path`, pairs in the sidecar `path + ".pairs.jsonl"`.
void save_index(const VectorIndex& index, const std::filesystem::path& path);
VectorIndex load_index(const std::filesystem::path& path);
std::string serialize_index_vectors(const VectorIndex& index);
std::filesystem::path index_sidecar_path(const std::filesystem::path& path);

struct ScoredExample {
  ParallelPair pair;
  double score;
  std::size_t entry;  // position in the index
};

struct ExampleSet {
  std::vector<ScoredExample> items;
  double threshold_used = 0.0;
  std::size_t cap_used = 0;
};

struct SelectOptions {
  double k = 0.7;
  std::size_t n = 2;
  std::optional<std::string> exclude_id;
};

// Exhaustive scoring; keeps scores strictly above k, best first, ties by
// index order, at most n.
ExampleSet select_examples(const VectorIndex& index, const EmbeddingVector& query,
                           const SelectOptions& options);
ExampleSet select_examples(const VectorIndex& index, std::string_view query,
                           EmbeddingProvider& provider, const SelectOptions& options);

std::string example_set_to_json(const ExampleSet& set, const std::string& provider_id);

}  // namespace dragforge
