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

// Terminology dictionaries and dictionary-driven source rephrasing.
//
// Matching semantics: entries are visited longest-first (ties by source term
// bytes); each entry claims every non-overlapping left-to-right occurrence
// that does not touch a span already claimed by an earlier entry. Claimed
// spans are frozen, so shorter terms never match inside a longer term or
// inside inserted target text. All occurrences are found with a single
// Aho-Corasick scan and then resolved in entry order.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dragforge/corpus.hpp"

namespace dragforge {

struct DictEntry {
  std::string source_term;
  std::string target_term;

  friend bool operator==(const DictEntry&, const DictEntry&) = default;
};

struct MatchOptions {
  // Require token boundaries (start/end of text, whitespace or punctuation)
  // on both sides of a match. Meant for space-delimited source languages.
  bool whole_token = false;
  bool case_insensitive = false;

  friend bool operator==(const MatchOptions&, const MatchOptions&) = default;
};

// Multi-pattern automaton over codepoint strings.
class TermMatcher {
 public:
  struct Hit {
    std::size_t pattern;
    std::size_t start;  // codepoint offset
  };

  TermMatcher() = default;
  explicit TermMatcher(const std::vector<std::u32string>& patterns);

  // Every (possibly overlapping) occurrence of every pattern.
  std::vector<Hit> find_all(std::u32string_view text) const;

 private:
  struct Node {
    std::int32_t fail = 0;
    std::int32_t output_link = -1;  // nearest fail-chain node with outputs
    std::vector<std::size_t> outputs;
    std::vector<std::pair<char32_t, std::int32_t>> children;
  };

  std::int32_t step(std::int32_t node, char32_t c) const;
  static std::uint64_t edge_key(std::int32_t node, char32_t c) noexcept {
    return (static_cast<std::uint64_t>(node) << 21) | static_cast<std::uint64_t>(c);
  }

  std::vector<Node> nodes_;
  std::unordered_map<std::uint64_t, std::int32_t> edges_;
  std::vector<std::size_t> lengths_;
};

class SortedDictionary {
 public:
  SortedDictionary();
  // Drops invalid entries and duplicate source terms (first wins), then sorts.
  // Reasons for every dropped entry are appended to `warnings` when given.
  explicit SortedDictionary(std::vector<DictEntry> entries, MatchOptions options = {},
                            std::vector<std::string>* warnings = nullptr);

  const std::vector<DictEntry>& entries() const noexcept { return entries_; }
  const DictEntry& operator[](std::size_t i) const { return entries_[i]; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const MatchOptions& options() const noexcept { return options_; }

  // Source-term length in codepoints of entry i.
  std::size_t term_length(std::size_t i) const { return lengths_[i]; }
  const TermMatcher& matcher() const noexcept { return matcher_; }

 private:
  std::vector<DictEntry> entries_;
  std::vector<std::size_t> lengths_;
  MatchOptions options_;
  TermMatcher matcher_;
};

struct LoadedDictionary {
  SortedDictionary dictionary;
  std::vector<std::string> warnings;
};

// TSV source<TAB>target, '#' comment lines and blank lines ignored.
LoadedDictionary load_dictionary(const std::filesystem::path& path, MatchOptions options = {});
LoadedDictionary parse_dictionary(std::string_view content, MatchOptions options = {},
                                  const std::string& origin = "<memory>");

// Canonical TSV in sorted order; stable input for content hashing.
std::string serialize_dictionary(const SortedDictionary& dict);

struct TermSpan {
  std::size_t start;  // codepoint offsets into the original sentence
  std::size_t end;
  std::size_t entry;  // index into SortedDictionary::entries()
};

// Accepted spans, sorted by start.
std::vector<TermSpan> match_terms(std::u32string_view sentence, const SortedDictionary& dict);
std::vector<TermSpan> match_terms(std::string_view sentence, const SortedDictionary& dict);

// Distinct matched entries in order of first accepted occurrence.
std::vector<DictEntry> matched_entries(std::string_view sentence, const SortedDictionary& dict);

struct Replacement {
  std::size_t start;
  std::size_t end;
  std::string source_term;
  std::string target_term;

  friend bool operator==(const Replacement&, const Replacement&) = default;
};

struct RephraseResult {
  std::string rephrased;
  std::vector<Replacement> replacements;
};

RephraseResult dict_rephrase(std::string_view sentence, const SortedDictionary& dict);

// Applies recorded replacements to the original sentence.
std::string apply_replacements(std::string_view original, std::span<const Replacement> replacements);
// Inverse: recovers the original from the rephrased text.
std::string restore_source(std::string_view rephrased, std::span<const Replacement> replacements);

struct RephraseStats {
  std::size_t total_replacements = 0;
  std::vector<std::size_t> hits;  // aligned with dictionary entries
};

struct RephrasedCorpus {
  ParallelCorpus corpus;
  RephraseStats stats;
};

RephrasedCorpus rephrase_corpus(const ParallelCorpus& corpus, const SortedDictionary& dict);

// JSONL {w_src, w_tgt, hits} in dictionary order.
std::string serialize_rephrase_stats(const RephraseStats& stats, const SortedDictionary& dict);

// Non-overlapping left-to-right occurrence count of needle in haystack.
std::size_t count_occurrences(std::u32string_view haystack, std::u32string_view needle,
                              const MatchOptions& options);

// Terminology-extraction prompt for an external LLM, followed by the numbered
// pairs. Throws ValidationError on an empty pair list.
std::string extraction_prompt(std::span<const ParallelPair> pairs, const std::string& domain_tag);

}  // namespace dragforge
