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

// Translation metrics: corpus BLEU, terminology success rate, unaligned
// translation words (UTW), length distributions, and ingestion of externally
// computed neural scores.

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dragforge/dictionary.hpp"

namespace dragforge {

struct EvalTriple {
  std::string id;
  std::string source;
  std::string hypothesis;
  std::string reference;
};

enum class Tokenizer { kWhitespace, kChar };

std::string to_string(Tokenizer tokenizer);
Tokenizer parse_tokenizer(std::string_view name);
// kChar for Chinese, Japanese and Korean targets, kWhitespace otherwise.
Tokenizer default_tokenizer_for(std::string_view lang_tag);
std::vector<std::string> tokenize(std::string_view text, Tokenizer tokenizer);

struct BleuReport {
  double score = 0.0;                  // [0, 100]
  std::array<double, 4> precisions{};  // modified n-gram precisions in [0, 1]
  std::array<std::size_t, 4> matches{};
  std::array<std::size_t, 4> totals{};
  double brevity_penalty = 1.0;
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
  Tokenizer tokenizer = Tokenizer::kWhitespace;
  bool smoothed = false;
};

// Corpus BLEU-4 with pooled clipped counts, one reference per hypothesis.
// With `smooth`, add-one is applied to the 2..4-gram precisions.
BleuReport corpus_bleu(std::span<const EvalTriple> triples, Tokenizer tokenizer,
                       bool smooth = false);

enum class TermMatching { kSubstring, kWholeToken };

TermMatching parse_term_matching(std::string_view name);
TermMatching default_term_matching_for(std::string_view tgt_lang_tag);

struct TermReport {
  std::size_t attempted = 0;
  std::size_t succeeded = 0;
  std::optional<double> rate;  // empty when nothing was attempted
};

// Per-occurrence counting: each accepted source-term span is one attempt,
// succeeding while the hypothesis still has unused target-term occurrences.
// kWholeToken matches target terms on token boundaries, case-insensitively.
TermReport term_success_rate(std::span<const EvalTriple> triples, const SortedDictionary& dict,
                             TermMatching matching);

// Pharaoh links: (hypothesis token index, reference token index).
using Alignment = std::vector<std::pair<std::size_t, std::size_t>>;

Alignment parse_pharaoh_line(std::string_view line);
std::vector<Alignment> parse_pharaoh(std::string_view content);

struct UtwReport {
  std::size_t total_hyp_tokens = 0;
  std::size_t unaligned_tokens = 0;
  double rate = 0.0;
};

// Triples without an alignment entry count as having no links.
UtwReport utw_rate(std::span<const EvalTriple> triples,
                   const std::map<std::string, Alignment>& alignments);

struct LengthDistribution {
  std::size_t bin_width = 10;
  std::map<std::size_t, std::size_t> histogram;  // bin lower bound -> count
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double p95 = 0.0;  // nearest rank
};

LengthDistribution length_distribution(std::span<const std::string> texts, Tokenizer tokenizer,
                                       std::size_t bin_width = 10);

std::map<std::string, double> ingest_external_scores(const std::filesystem::path& path);

// Hypotheses file: JSONL {id, hypothesis}.
std::map<std::string, std::string> read_hypotheses(const std::filesystem::path& path);

struct EvalReport {
  BleuReport bleu;
  std::optional<TermReport> terms;
  std::optional<UtwReport> utw;
  LengthDistribution hyp_lengths;
  LengthDistribution ref_lengths;
  std::map<std::string, std::map<std::string, double>> external;  // name -> id -> score
};

std::string report_to_json(const EvalReport& report);

}  // namespace dragforge
