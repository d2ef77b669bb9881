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

#include "dragforge/retrieval.hpp"

#include <bit>
#include <cstring>
#include <unordered_set>

#include <json.hpp>

#include "dragforge/io.hpp"
#include "dragforge/text.hpp"

namespace dragforge {
namespace {

constexpr char kMagic[4] = {'D', 'F', 'V', 'X'};
constexpr std::uint32_t kFormatVersion = 1;

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
  }
}

class Reader {
 public:
  Reader(std::string_view data, std::string origin) : data_(data), origin_(std::move(origin)) {}

  template <typename T>
  T get_le() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  std::string_view bytes(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool at_end() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw ValidationError(origin_ + ": truncated index file");
  }

  std::string_view data_;
  std::string origin_;
  std::size_t pos_ = 0;
};

}  // namespace

// ------------------------------------------------------------ HashingEmbedder

HashingEmbedder::HashingEmbedder(std::size_t dim, std::uint64_t seed, std::size_t max_ngram)
    : dim_(dim), seed_(seed), max_ngram_(max_ngram) {
  if (dim_ == 0) throw ValidationError("embedding dimension must be positive");
  if (max_ngram_ == 0) throw ValidationError("max n-gram order must be positive");
}

std::string HashingEmbedder::provider_id() const {
  return "hash-ngram:dim=" + std::to_string(dim_) + ":n=" + std::to_string(max_ngram_) +
         ":seed=" + std::to_string(seed_);
}

EmbeddingVector HashingEmbedder::embed(std::string_view text) const {
  const auto cps = text::decode_utf8(text);
  Embedding<double> acc = Embedding<double>::Zero(static_cast<Eigen::Index>(dim_));
  for (std::size_t order = 1; order <= max_ngram_; ++order) {
    if (cps.size() < order) break;
    for (std::size_t i = 0; i + order <= cps.size(); ++i) {
      std::uint64_t h = fnv1a(14695981039346656037ULL, &seed_, sizeof(seed_));
      const auto o = static_cast<std::uint64_t>(order);
      h = fnv1a(h, &o, sizeof(o));
      h = fnv1a(h, cps.data() + i, order * sizeof(char32_t));
      h = mix64(h);
      const auto bucket = static_cast<Eigen::Index>(h % dim_);
      acc[bucket] += (h >> 63) ? -1.0 : 1.0;
    }
  }
  const double norm = acc.norm();
  if (norm > 0.0) acc /= norm;
  return acc.cast<float>();
}

std::vector<EmbeddingVector> HashingEmbedder::embed_batch(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed(t));
  return out;
}

// ---------------------------------------------------------------- VectorIndex

VectorIndex::VectorIndex(std::vector<ParallelPair> pairs, Eigen::MatrixXf vectors,
                         std::string provider_id)
    : pairs_(std::move(pairs)), vectors_(std::move(vectors)), provider_id_(std::move(provider_id)) {
  if (static_cast<std::size_t>(vectors_.cols()) != pairs_.size()) {
    throw ValidationError("index has " + std::to_string(pairs_.size()) + " pairs but " +
                          std::to_string(vectors_.cols()) + " vectors");
  }
  if (!pairs_.empty() && vectors_.rows() == 0) throw ValidationError("index dimension is zero");
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (!seen.insert(pairs_[i].id).second) {
      throw ValidationError("duplicate pair id '" + pairs_[i].id + "' in index");
    }
    const auto col = vectors_.col(static_cast<Eigen::Index>(i));
    if (!col.allFinite() || !(col.cast<double>().norm() > 0.0)) {
      throw ValidationError("zero or non-finite embedding for pair '" + pairs_[i].id + "'");
    }
  }
}

IndexSide parse_index_side(const std::string& name) {
  if (name == "source") return IndexSide::kSource;
  if (name == "target") return IndexSide::kTarget;
  throw ValidationError("unknown index side '" + name + "' (expected source or target)");
}

VectorIndex build_index(std::span<const ParallelPair> pairs, EmbeddingProvider& provider,
                        IndexSide side, std::size_t batch_size) {
  if (pairs.empty()) throw ValidationError("cannot build an index from zero pairs");
  if (batch_size == 0) batch_size = 1;
  {
    std::unordered_set<std::string> seen;
    for (const auto& p : pairs) {
      if (!seen.insert(p.id).second) throw ValidationError("duplicate pair id '" + p.id + "'");
    }
  }
  const auto dim = static_cast<Eigen::Index>(provider.dim());
  Eigen::MatrixXf vectors;
  for (std::size_t begin = 0; begin < pairs.size(); begin += batch_size) {
    const auto end = std::min(pairs.size(), begin + batch_size);
    std::vector<std::string> texts;
    for (std::size_t i = begin; i < end; ++i) {
      texts.push_back(side == IndexSide::kSource ? pairs[i].source : pairs[i].target);
    }
    std::vector<EmbeddingVector> batch;
    try {
      batch = provider.embed_batch(texts);
    } catch (const Error& e) {
      throw ProviderError("embedding failed for ids " + pairs[begin].id + ".." +
                          pairs[end - 1].id + ": " + e.what());
    }
    if (batch.size() != texts.size()) {
      throw ProviderError("provider returned " + std::to_string(batch.size()) + " vectors for " +
                          std::to_string(texts.size()) + " texts (ids " + pairs[begin].id +
                          ".." + pairs[end - 1].id + ")");
    }
    if (vectors.size() == 0) {
      const auto d = batch.front().size();
      if (dim != 0 && d != dim) {
        throw ProviderError("provider dimension " + std::to_string(d) + " != declared " +
                            std::to_string(dim));
      }
      vectors.resize(d, static_cast<Eigen::Index>(pairs.size()));
    }
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (batch[i].size() != vectors.rows()) {
        throw ProviderError("inconsistent embedding dimension for id " + pairs[begin + i].id);
      }
      vectors.col(static_cast<Eigen::Index>(begin + i)) = batch[i];
    }
  }
  return VectorIndex({pairs.begin(), pairs.end()}, std::move(vectors), provider.provider_id());
}

std::filesystem::path index_sidecar_path(const std::filesystem::path& path) {
  auto p = path;
  p += ".pairs.jsonl";
  return p;
}

std::string serialize_index_vectors(const VectorIndex& index) {
  std::string out(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, kFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(index.dim()));
  put_le<std::uint64_t>(out, index.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(index.provider_id().size()));
  out += index.provider_id();
  const auto& m = index.vectors();
  out.reserve(out.size() + static_cast<std::size_t>(m.size()) * 4);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) put_le(out, std::bit_cast<std::uint32_t>(m(r, c)));
  }
  return out;
}

void save_index(const VectorIndex& index, const std::filesystem::path& path) {
  io::OutputBatch batch;
  batch.add(path, serialize_index_vectors(index));
  batch.add(index_sidecar_path(path),
            serialize_corpus(ParallelCorpus(index.pairs()), CorpusFormat::kJsonl));
  batch.commit();
}

VectorIndex load_index(const std::filesystem::path& path) {
  const auto data = io::read_file(path);
  Reader in(data, path.string());
  if (in.bytes(4) != std::string_view(kMagic, 4)) {
    throw ValidationError(path.string() + ": not a vector index file");
  }
  const auto version = in.get_le<std::uint32_t>();
  if (version != kFormatVersion) {
    throw ValidationError(path.string() + ": unsupported index version " + std::to_string(version));
  }
  const auto dim = in.get_le<std::uint32_t>();
  const auto count = in.get_le<std::uint64_t>();
  const auto id_len = in.get_le<std::uint32_t>();
  std::string provider_id(in.bytes(id_len));
  if (count > 0 && data.size() / 4 / std::max<std::uint64_t>(dim, 1) < count) {
    throw ValidationError(path.string() + ": truncated index file");
  }
  Eigen::MatrixXf vectors(dim, static_cast<Eigen::Index>(count));
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      vectors(r, c) = std::bit_cast<float>(in.get_le<std::uint32_t>());
    }
  }
  if (!in.at_end()) throw ValidationError(path.string() + ": trailing bytes in index file");

  std::vector<ParallelPair> pairs;
  if (count > 0) {
    const auto sidecar = index_sidecar_path(path);
    auto corpus = load_parallel_corpus(sidecar, CorpusFormat::kJsonl);
    pairs = corpus.pairs();
    if (pairs.size() != count) {
      throw ValidationError(sidecar.string() + ": " + std::to_string(pairs.size()) +
                            " pairs for " + std::to_string(count) + " vectors");
    }
  }
  return VectorIndex(std::move(pairs), std::move(vectors), std::move(provider_id));
}

// ------------------------------------------------------------------ selection

ExampleSet select_examples(const VectorIndex& index, const EmbeddingVector& query,
                           const SelectOptions& options) {
  ExampleSet set;
  set.threshold_used = options.k;
  set.cap_used = options.n;
  if (options.n == 0 || index.empty()) return set;
  if (static_cast<std::size_t>(query.size()) != index.dim()) {
    throw ValidationError("query dimension " + std::to_string(query.size()) +
                          " does not match index dimension " + std::to_string(index.dim()));
  }
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (options.exclude_id && index.pairs()[i].id == *options.exclude_id) continue;
    const double score = cosine_similarity(query, index.vector(i));
    if (score > options.k) scored.emplace_back(score, i);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  if (scored.size() > options.n) scored.resize(options.n);
  for (const auto& [score, i] : scored) set.items.push_back({index.pairs()[i], score, i});
  return set;
}

ExampleSet select_examples(const VectorIndex& index, std::string_view query,
                           EmbeddingProvider& provider, const SelectOptions& options) {
  ExampleSet empty;
  empty.threshold_used = options.k;
  empty.cap_used = options.n;
  if (index.empty()) return empty;
  if (provider.provider_id() != index.provider_id()) {
    throw ValidationError("provider '" + provider.provider_id() + "' does not match index provider '" +
                          index.provider_id() + "'");
  }
  if (options.n == 0) return empty;
  const std::string text(query);
  auto vecs = provider.embed_batch(std::span<const std::string>(&text, 1));
  if (vecs.size() != 1) throw ProviderError("provider returned no vector for the query");
  return select_examples(index, vecs.front(), options);
}

std::string example_set_to_json(const ExampleSet& set, const std::string& provider_id) {
  nlohmann::ordered_json items = nlohmann::ordered_json::array();
  for (const auto& it : set.items) {
    items.push_back({{"id", it.pair.id},
                     {"source", it.pair.source},
                     {"target", it.pair.target},
                     {"score", it.score}});
  }
  nlohmann::ordered_json j{{"provider_id", provider_id},
                           {"k", set.threshold_used},
                           {"n", set.cap_used},
                           {"examples", std::move(items)}};
  return j.dump(2) + "\n";
}

}  // namespace dragforge
