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

#include "dragforge/dataset_builder.hpp"

#include <cstdlib>

#include <json.hpp>

#include "dragforge/error.hpp"
#include "dragforge/io.hpp"

namespace dragforge {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::size_t kQueryChunk = 64;

PromptConfig prompt_config_for(const PipelineConfig& config, const ParallelPair& pair) {
  PromptConfig pc;
  pc.mode = config.mode;
  pc.k = config.k;
  pc.n = config.n;
  pc.target_language = config.target_language.value_or(language_display_name(pair.tgt_lang));
  return pc;
}

// Retrieves examples for every pair, querying with the untransformed source.
std::vector<std::vector<ParallelPair>> retrieve_all(const ParallelCorpus& corpus,
                                                    const VectorIndex* index,
                                                    EmbeddingProvider* provider,
                                                    const PipelineConfig& config) {
  std::vector<std::vector<ParallelPair>> out(corpus.size());
  if (config.n == 0 || corpus.empty()) return out;
  if (!index || !provider) throw ValidationError("few-shot retrieval needs an index and a provider");
  if (provider->provider_id() != index->provider_id()) {
    throw ValidationError("provider '" + provider->provider_id() +
                          "' does not match index provider '" + index->provider_id() + "'");
  }
  if (index->empty()) return out;

  const auto& pairs = corpus.pairs();
  for (std::size_t begin = 0; begin < pairs.size(); begin += kQueryChunk) {
    const auto end = std::min(pairs.size(), begin + kQueryChunk);
    std::vector<std::string> queries;
    for (std::size_t i = begin; i < end; ++i) queries.push_back(pairs[i].source);
    std::vector<EmbeddingVector> vecs;
    try {
      vecs = provider->embed_batch(queries);
    } catch (const ProviderError& e) {
      throw ProviderError("embedding queries for pairs " + pairs[begin].id + ".." +
                          pairs[end - 1].id + ": " + e.what());
    }
    if (vecs.size() != queries.size()) {
      throw ProviderError("provider returned a short batch for pairs " + pairs[begin].id + ".." +
                          pairs[end - 1].id);
    }
    for (std::size_t i = begin; i < end; ++i) {
      SelectOptions opts{config.k, config.n, std::nullopt};
      if (config.exclude_self) opts.exclude_id = pairs[i].id;
      try {
        for (auto& item : select_examples(*index, vecs[i - begin], opts).items) {
          out[i].push_back(std::move(item.pair));
        }
      } catch (const Error& e) {
        throw Error(e.kind(), "pair '" + pairs[i].id + "': " + e.what());
      }
    }
  }
  return out;
}

InstructionRecord transform_pair(const ParallelPair& pair, std::span<const ParallelPair> examples,
                                 const SortedDictionary& dict, const PipelineConfig& config,
                                 bool chain_in_output) {
  const auto pc = prompt_config_for(config, pair);
  switch (config.mode) {
    case DictMode::kRephrasing:
      return build_record(dict_rephrase(pair.source, dict).rephrased, pair.target, examples, pc,
                          pair.id, config.domain_tag);
    case DictMode::kChain: {
      auto r = build_record(pair.source, pair.target, examples, pc, pair.id, config.domain_tag);
      if (chain_in_output) r.output += chain_suffix(matched_entries(pair.source, dict));
      return r;
    }
    case DictMode::kNone:
    case DictMode::kInstruction:
      break;
  }
  return build_record(pair.source, pair.target, examples, pc, pair.id, config.domain_tag);
}

std::string kind_checked(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw ValidationError(std::string("manifest: missing string field '") + key + "'");
  }
  return j[key].get<std::string>();
}

}  // namespace

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderSettings& settings) {
  if (settings.kind == "hash") {
    return std::make_unique<HashingEmbedder>(settings.dim, settings.seed, settings.max_ngram);
  }
  if (settings.kind == "http") {
    auto url = settings.url;
    if (url.empty()) {
      if (const char* env = std::getenv(kEmbedUrlEnv)) url = env;
    }
    if (url.empty()) {
      throw ValidationError(std::string("http provider needs an endpoint; set ") + kEmbedUrlEnv);
    }
    HttpProviderOptions opts;
    opts.batch_size = settings.batch_size;
    opts.max_retries = settings.max_retries;
    return std::make_unique<HttpEmbeddingProvider>(url, opts);
  }
  throw ValidationError("unknown provider kind '" + settings.kind + "' (expected hash or http)");
}

void PipelineConfig::validate() const {
  if (!(k >= 0.0 && k <= 1.0)) throw ValidationError("k must lie in [0,1]");
  if (!(qe_threshold >= 0.0 && qe_threshold <= 100.0)) {
    throw ValidationError("qe_threshold must lie in [0,100]");
  }
  if (target_language && target_language->empty()) throw ValidationError("empty target language");
}

std::vector<InstructionRecord> build_training_set(const ParallelCorpus& corpus,
                                                  const SortedDictionary& dict,
                                                  const VectorIndex* index,
                                                  EmbeddingProvider* provider,
                                                  const PipelineConfig& config) {
  config.validate();
  const auto examples = retrieve_all(corpus, index, provider, config);
  std::vector<InstructionRecord> records;
  records.reserve(corpus.size() + (config.mode == DictMode::kInstruction ? dict.size() : 0));
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    records.push_back(transform_pair(corpus.pairs()[i], examples[i], dict, config, true));
  }
  if (config.mode == DictMode::kInstruction) {
    const auto language =
        config.target_language.value_or(corpus.empty() ? std::string("English")
                                                        : language_display_name(
                                                              corpus.pairs().front().tgt_lang));
    for (std::size_t i = 0; i < dict.size(); ++i) {
      records.push_back(dict_entry_record(dict[i], i, language, config.domain_tag));
    }
  }
  return records;
}

std::string dictionary_hash(const SortedDictionary& dict) {
  std::string canon = serialize_dictionary(dict);
  canon += dict.options().whole_token ? "#whole_token=1\n" : "#whole_token=0\n";
  canon += dict.options().case_insensitive ? "#case_insensitive=1\n" : "#case_insensitive=0\n";
  return io::sha256_hex(canon);
}

std::string corpus_hash(const ParallelCorpus& corpus) {
  return io::sha256_hex(serialize_corpus(corpus, CorpusFormat::kJsonl));
}

std::string index_hash(const VectorIndex& index) {
  return io::sha256_hex(serialize_index_vectors(index) +
                        serialize_corpus(ParallelCorpus(index.pairs()), CorpusFormat::kJsonl));
}

DatasetManifest make_manifest(std::string kind, const PipelineConfig& config,
                              const ParallelCorpus& corpus, const SortedDictionary& dict,
                              const VectorIndex* index, std::size_t record_count) {
  DatasetManifest m;
  m.kind = std::move(kind);
  m.mode = config.mode;
  m.k = config.k;
  m.n = config.n;
  m.domain_tag = config.domain_tag;
  m.corpus_sha256 = corpus_hash(corpus);
  m.dictionary_sha256 = dictionary_hash(dict);
  if (index) {
    m.index_sha256 = index_hash(*index);
    m.provider_id = index->provider_id();
  }
  m.record_count = record_count;
  return m;
}

std::string manifest_to_json(const DatasetManifest& m) {
  ordered_json j{{"kind", m.kind},
                 {"mode", to_string(m.mode)},
                 {"k", m.k},
                 {"n", m.n},
                 {"domain_tag", m.domain_tag},
                 {"provider_id", m.provider_id},
                 {"inputs",
                  {{"corpus_sha256", m.corpus_sha256},
                   {"dictionary_sha256", m.dictionary_sha256},
                   {"index_sha256", m.index_sha256}}},
                 {"record_count", m.record_count},
                 {"tool_version", m.tool_version}};
  return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    throw ValidationError("manifest is not valid JSON");
  }
  try {
    DatasetManifest m;
    m.kind = kind_checked(j, "kind");
    m.mode = parse_dict_mode(kind_checked(j, "mode"));
    m.k = j.at("k").get<double>();
    m.n = j.at("n").get<std::size_t>();
    m.domain_tag = j.value("domain_tag", "");
    m.provider_id = j.value("provider_id", "");
    const auto& in = j.at("inputs");
    m.corpus_sha256 = in.value("corpus_sha256", "");
    m.dictionary_sha256 = in.value("dictionary_sha256", "");
    m.index_sha256 = in.value("index_sha256", "");
    m.record_count = j.at("record_count").get<std::size_t>();
    m.tool_version = j.value("tool_version", "");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("manifest: ") + e.what());
  }
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  try {
    return manifest_from_json(io::read_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::vector<InstructionRecord> build_test_set(const ParallelCorpus& corpus,
                                              const SortedDictionary& dict,
                                              const PipelineConfig& config,
                                              const DatasetManifest* train_manifest,
                                              const VectorIndex* index,
                                              EmbeddingProvider* provider) {
  config.validate();
  if (train_manifest) {
    if (train_manifest->mode != config.mode) {
      throw ValidationError("test mode " + to_string(config.mode) +
                            " differs from training mode " + to_string(train_manifest->mode));
    }
    if (train_manifest->dictionary_sha256 != dictionary_hash(dict)) {
      throw ValidationError("test dictionary differs from the training dictionary");
    }
  }
  std::vector<std::vector<ParallelPair>> examples(corpus.size());
  if (config.test_fewshot) examples = retrieve_all(corpus, index, provider, config);

  std::vector<InstructionRecord> records;
  records.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& pair = corpus.pairs()[i];
    auto r = transform_pair(pair, examples[i], dict, config, false);
    r.meta.source = pair.source;
    records.push_back(std::move(r));
  }
  return records;
}

std::string serialize_records(std::span<const InstructionRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r);
    out += '\n';
  }
  return out;
}

std::vector<InstructionRecord> parse_records(std::string_view content, const std::string& origin) {
  std::vector<InstructionRecord> records;
  const auto lines = io::split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      records.push_back(record_from_json(lines[i]));
    } catch (const ValidationError& e) {
      throw ValidationError(origin + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return records;
}

void emit_jsonl(std::span<const InstructionRecord> records, const std::filesystem::path& path) {
  io::write_file_atomic(path, serialize_records(records));
}

std::vector<InstructionRecord> read_jsonl(const std::filesystem::path& path) {
  return parse_records(io::read_file(path), path.string());
}

void TrainRunConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be positive");
  if (batch_size <= 0) throw ValidationError("batch_size must be positive");
  if (max_seq_len <= 0) throw ValidationError("max_seq_len must be positive");
  if (weight_decay < 0.0) throw ValidationError("weight_decay must be non-negative");
  if (warmup_ratio < 0.0 || warmup_ratio > 1.0) throw ValidationError("warmup_ratio must lie in [0,1]");
  if (lora_rank <= 0) throw ValidationError("lora_rank must be positive");
  if (beam_width <= 0) throw ValidationError("beam_width must be positive");
  if (temperature < 0.0) throw ValidationError("temperature must be non-negative");
  if (!(length_penalty > 0.0)) throw ValidationError("length_penalty must be positive");
}

std::string train_config_to_json(const TrainRunConfig& c) {
  ordered_json j{{"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
                 {"max_seq_len", c.max_seq_len},     {"weight_decay", c.weight_decay},
                 {"warmup_ratio", c.warmup_ratio},   {"lora_rank", c.lora_rank},
                 {"beam_width", c.beam_width},       {"temperature", c.temperature},
                 {"length_penalty", c.length_penalty}};
  return j.dump(2) + "\n";
}

void emit_train_config(const std::filesystem::path& path, const TrainRunConfig& config) {
  config.validate();
  io::write_file_atomic(path, train_config_to_json(config));
}

}  // namespace dragforge
