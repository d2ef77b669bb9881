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

// Few-shot instruction records and the four dictionary-enhancement shapes.
//
// Canonical layout of a record input:
//
//   zh: <example 1 source>
//   en: <example 1 target>
//
//   zh: <example 2 source>
//   en: <example 2 target>
//
//   <source to translate>
//
// Dict-chain outputs append "\nTerms:" followed by one "\n<src> = <tgt>" line
// per matched entry.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dragforge/corpus.hpp"
#include "dragforge/dictionary.hpp"

namespace dragforge {

enum class DictMode { kNone, kRephrasing, kInstruction, kChain };

std::string to_string(DictMode mode);
// Accepts dict_none / dict_rephrasing / dict_instruction / dict_chain, with or
// without the "dict_" prefix.
DictMode parse_dict_mode(std::string_view name);

struct PromptConfig {
  DictMode mode = DictMode::kNone;
  std::string target_language = "English";
  double k = 0.7;
  std::size_t n = 2;

  void validate() const;
};

struct RecordMeta {
  std::string id;
  DictMode mode = DictMode::kNone;
  std::string domain_tag;
  std::vector<std::string> example_ids;
  std::optional<std::string> source;  // original source, test records only

  friend bool operator==(const RecordMeta&, const RecordMeta&) = default;
};

struct InstructionRecord {
  std::string instruction;
  std::string input;
  std::string output;
  RecordMeta meta;

  friend bool operator==(const InstructionRecord&, const InstructionRecord&) = default;
};

inline constexpr std::string_view kChainDelimiter = "\nTerms:";

std::string translation_instruction(std::string_view target_language);

std::string render_fewshot_input(std::string_view source, std::span<const ParallelPair> examples);
std::string render_fewshot_prompt(std::string_view source, std::span<const ParallelPair> examples,
                                  std::string_view target_language);

InstructionRecord build_record(std::string_view source, std::string_view target,
                               std::span<const ParallelPair> examples, const PromptConfig& config,
                               std::string id = {}, std::string domain_tag = {});

std::string chain_suffix(std::span<const DictEntry> matched);
// Removes a trailing chain suffix; returns the text unchanged if there is none.
std::string strip_chain_suffix(std::string_view output);

InstructionRecord render_dict_chain(const ParallelPair& pair, std::span<const DictEntry> matched,
                                    std::span<const ParallelPair> examples = {},
                                    const std::string& domain_tag = {});

// One record per pair followed by one record per dictionary entry.
std::vector<InstructionRecord> expand_dict_instruction(const ParallelCorpus& corpus,
                                                       const SortedDictionary& dict);
InstructionRecord dict_entry_record(const DictEntry& entry, std::size_t index,
                                    std::string_view target_language,
                                    const std::string& domain_tag = {});

// Codepoints across instruction, input and output.
std::size_t record_length(const InstructionRecord& record);

std::string record_to_json(const InstructionRecord& record);
InstructionRecord record_from_json(std::string_view line);

}  // namespace dragforge
