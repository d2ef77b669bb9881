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

// Bilingual parallel corpora: ingestion, QE gating, seeded splitting and
// summary statistics.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dragforge {

// Display name for a language tag ("en" -> "English"); unknown tags are
// returned unchanged.
std::string language_display_name(std::string_view tag);

struct ParallelPair {
  std::string id;
  std::string source;
  std::string target;
  std::string src_lang;
  std::string tgt_lang;
  std::optional<double> qe_score;

  friend bool operator==(const ParallelPair&, const ParallelPair&) = default;
};

// Throws ValidationError naming the pair id when an invariant is broken.
void validate_pair(const ParallelPair& pair);

ParallelPair make_pair(std::string id, std::string source, std::string target,
                       std::string src_lang, std::string tgt_lang,
                       std::optional<double> qe_score = std::nullopt);

class ParallelCorpus {
 public:
  ParallelCorpus() = default;
  // Validates every pair and id uniqueness.
  explicit ParallelCorpus(std::vector<ParallelPair> pairs, std::string domain_tag = {});

  const std::vector<ParallelPair>& pairs() const noexcept { return pairs_; }
  const std::string& domain_tag() const noexcept { return domain_tag_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }

  auto begin() const noexcept { return pairs_.begin(); }
  auto end() const noexcept { return pairs_.end(); }

  friend bool operator==(const ParallelCorpus&, const ParallelCorpus&) = default;

 private:
  std::vector<ParallelPair> pairs_;
  std::string domain_tag_;
};

enum class CorpusFormat { kTsv, kJsonl };

CorpusFormat corpus_format_from_path(const std::filesystem::path& path);
CorpusFormat parse_corpus_format(const std::string& name);

struct LoadOptions {
  std::string src_lang = "zh";
  std::string tgt_lang = "en";
  std::string domain_tag;
};

// TSV lines are source<TAB>target; JSONL objects carry src, tgt and optional
// id, qe_score, src_lang, tgt_lang. Missing ids become 1-based line numbers.
ParallelCorpus load_parallel_corpus(const std::filesystem::path& path, CorpusFormat format,
                                    const LoadOptions& options = {});
ParallelCorpus parse_parallel_corpus(const std::string& content, CorpusFormat format,
                                     const LoadOptions& options = {},
                                     const std::string& origin = "<memory>");

std::string serialize_corpus(const ParallelCorpus& corpus, CorpusFormat format);

struct Rejection {
  std::string id;
  double score;
  double threshold;
};

struct RejectionReport {
  std::vector<Rejection> rejected;
};

struct FilterResult {
  ParallelCorpus kept;
  RejectionReport report;
};

// Keeps pairs whose score is >= threshold, in input order.
FilterResult quality_filter(const ParallelCorpus& corpus,
                            const std::map<std::string, double>& scores, double threshold);

std::string serialize_rejections(const RejectionReport& report);

struct SplitResult {
  ParallelCorpus train;
  ParallelCorpus test;
  ParallelCorpus extra;
};

// Seeded Fisher-Yates over pair indices; each split keeps ingestion order.
SplitResult split_corpus(const ParallelCorpus& corpus, std::size_t train_n, std::size_t test_n,
                         std::uint64_t seed);

struct LengthSummary {
  double mean = 0.0;
  double median = 0.0;
};

struct SideStats {
  LengthSummary chars;
  LengthSummary tokens;
  LengthSummary cjk_chars;
};

struct CorpusStats {
  std::size_t pair_count = 0;
  SideStats source;
  SideStats target;
  std::map<std::string, std::size_t> split_counts;
};

CorpusStats corpus_stats(const ParallelCorpus& corpus);
CorpusStats corpus_stats(const SplitResult& splits);

std::string stats_to_json(const CorpusStats& stats);

}  // namespace dragforge
