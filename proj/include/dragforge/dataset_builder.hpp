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

// End-to-end assembly of training / test instruction datasets, their
// manifests, and the fine-tuning run configuration.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dragforge/corpus.hpp"
#include "dragforge/dictionary.hpp"
#include "dragforge/prompting.hpp"
#include "dragforge/retrieval.hpp"

namespace dragforge {

inline constexpr const char* kToolVersion = "0.1.0";

struct ProviderSettings {
  std::string kind = "hash";  // hash | http
  std::size_t dim = 64;
  std::uint64_t seed = 0;
  std::size_t max_ngram = 3;
  std::string url;  // http only; falls back to DRAGFORGE_EMBED_URL
  std::size_t batch_size = 32;
  int max_retries = 4;
};

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderSettings& settings);

struct SplitConfig {
  std::size_t train_n = 0;
  std::size_t test_n = 0;
  std::uint64_t seed = 0;
};

struct PipelineConfig {
  DictMode mode = DictMode::kNone;
  double k = 0.7;
  std::size_t n = 2;
  double qe_threshold = 80.0;
  SplitConfig splits;
  ProviderSettings provider;
  std::string domain_tag;
  std::optional<std::string> target_language;  // default: from the pair's tgt_lang
  bool exclude_self = false;
  bool test_fewshot = false;

  void validate() const;
};

// Requires `index` and `provider` whenever config.n > 0.
std::vector<InstructionRecord> build_training_set(const ParallelCorpus& corpus,
                                                  const SortedDictionary& dict,
                                                  const VectorIndex* index,
                                                  EmbeddingProvider* provider,
                                                  const PipelineConfig& config);

struct DatasetManifest {
  std::string kind;  // train | test
  DictMode mode = DictMode::kNone;
  double k = 0.0;
  std::size_t n = 0;
  std::string domain_tag;
  std::string provider_id;
  std::string corpus_sha256;
  std::string dictionary_sha256;
  std::string index_sha256;
  std::size_t record_count = 0;
  std::string tool_version = kToolVersion;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

std::string dictionary_hash(const SortedDictionary& dict);
std::string corpus_hash(const ParallelCorpus& corpus);
std::string index_hash(const VectorIndex& index);

DatasetManifest make_manifest(std::string kind, const PipelineConfig& config,
                              const ParallelCorpus& corpus, const SortedDictionary& dict,
                              const VectorIndex* index, std::size_t record_count);
std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(std::string_view json);
DatasetManifest read_manifest(const std::filesystem::path& path);

// Test records use the training transformation and carry references as
// outputs. Throws ValidationError when `train_manifest` disagrees on mode or
// dictionary.
std::vector<InstructionRecord> build_test_set(const ParallelCorpus& corpus,
                                              const SortedDictionary& dict,
                                              const PipelineConfig& config,
                                              const DatasetManifest* train_manifest = nullptr,
                                              const VectorIndex* index = nullptr,
                                              EmbeddingProvider* provider = nullptr);

std::string serialize_records(std::span<const InstructionRecord> records);
std::vector<InstructionRecord> parse_records(std::string_view content,
                                             const std::string& origin = "<memory>");
void emit_jsonl(std::span<const InstructionRecord> records, const std::filesystem::path& path);
std::vector<InstructionRecord> read_jsonl(const std::filesystem::path& path);

struct TrainRunConfig {
  double learning_rate = 3e-4;
  int batch_size = 2;
  int max_seq_len = 512;
  double weight_decay = 1e-5;
  double warmup_ratio = 0.01;
  int lora_rank = 16;
  int beam_width = 4;
  double temperature = 0.0;
  double length_penalty = 1.0;

  void validate() const;
};

std::string train_config_to_json(const TrainRunConfig& config);
void emit_train_config(const std::filesystem::path& path, const TrainRunConfig& config = {});

}  // namespace dragforge
