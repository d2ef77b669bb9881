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

#include "dragforge/prompting.hpp"

#include <json.hpp>

#include "dragforge/error.hpp"
#include "dragforge/text.hpp"

namespace dragforge {

std::string to_string(DictMode mode) {
  switch (mode) {
    case DictMode::kNone:
      return "dict_none";
    case DictMode::kRephrasing:
      return "dict_rephrasing";
    case DictMode::kInstruction:
      return "dict_instruction";
    case DictMode::kChain:
      return "dict_chain";
  }
  return "dict_none";
}

DictMode parse_dict_mode(std::string_view name) {
  if (name.starts_with("dict_") || name.starts_with("dict-")) name.remove_prefix(5);
  if (name == "none") return DictMode::kNone;
  if (name == "rephrasing") return DictMode::kRephrasing;
  if (name == "instruction") return DictMode::kInstruction;
  if (name == "chain") return DictMode::kChain;
  throw ValidationError("unknown dictionary mode '" + std::string(name) + "'");
}

void PromptConfig::validate() const {
  if (!(k >= 0.0 && k <= 1.0)) throw ValidationError("similarity threshold k must lie in [0,1]");
  if (target_language.empty()) throw ValidationError("target language is empty");
}

std::string translation_instruction(std::string_view target_language) {
  return "Translating the following content into " + std::string(target_language);
}

std::string render_fewshot_input(std::string_view source, std::span<const ParallelPair> examples) {
  std::string out;
  for (const auto& ex : examples) {
    out += ex.src_lang + ": " + ex.source + "\n";
    out += ex.tgt_lang + ": " + ex.target + "\n\n";
  }
  out += source;
  return out;
}

std::string render_fewshot_prompt(std::string_view source, std::span<const ParallelPair> examples,
                                  std::string_view target_language) {
  return translation_instruction(target_language) + "\n" + render_fewshot_input(source, examples);
}

InstructionRecord build_record(std::string_view source, std::string_view target,
                               std::span<const ParallelPair> examples, const PromptConfig& config,
                               std::string id, std::string domain_tag) {
  InstructionRecord r;
  r.instruction = translation_instruction(config.target_language);
  r.input = render_fewshot_input(source, examples);
  r.output = std::string(target);
  r.meta.id = std::move(id);
  r.meta.mode = config.mode;
  r.meta.domain_tag = std::move(domain_tag);
  for (const auto& ex : examples) r.meta.example_ids.push_back(ex.id);
  return r;
}

std::string chain_suffix(std::span<const DictEntry> matched) {
  if (matched.empty()) return {};
  std::string out(kChainDelimiter);
  for (const auto& e : matched) out += "\n" + e.source_term + " = " + e.target_term;
  return out;
}

std::string strip_chain_suffix(std::string_view output) {
  const auto pos = output.rfind(kChainDelimiter);
  if (pos == std::string_view::npos) return std::string(output);
  const auto tail = output.substr(pos + kChainDelimiter.size());
  // Every remaining line must look like "<src> = <tgt>".
  std::size_t i = 0;
  if (tail.empty()) return std::string(output);
  while (i < tail.size()) {
    if (tail[i] != '\n') return std::string(output);
    auto next = tail.find('\n', i + 1);
    if (next == std::string_view::npos) next = tail.size();
    if (tail.substr(i + 1, next - i - 1).find(" = ") == std::string_view::npos) {
      return std::string(output);
    }
    i = next;
  }
  return std::string(output.substr(0, pos));
}

InstructionRecord render_dict_chain(const ParallelPair& pair, std::span<const DictEntry> matched,
                                    std::span<const ParallelPair> examples,
                                    const std::string& domain_tag) {
  PromptConfig config;
  config.mode = DictMode::kChain;
  config.target_language = language_display_name(pair.tgt_lang);
  auto r = build_record(pair.source, pair.target, examples, config, pair.id, domain_tag);
  r.output += chain_suffix(matched);
  return r;
}

InstructionRecord dict_entry_record(const DictEntry& entry, std::size_t index,
                                    std::string_view target_language,
                                    const std::string& domain_tag) {
  PromptConfig config;
  config.mode = DictMode::kInstruction;
  config.target_language = std::string(target_language);
  return build_record(entry.source_term, entry.target_term, {}, config,
                      "dict:" + std::to_string(index + 1), domain_tag);
}

std::vector<InstructionRecord> expand_dict_instruction(const ParallelCorpus& corpus,
                                                       const SortedDictionary& dict) {
  std::vector<InstructionRecord> records;
  records.reserve(corpus.size() + dict.size());
  std::string language = "English";
  if (!corpus.empty()) language = language_display_name(corpus.pairs().front().tgt_lang);
  for (const auto& p : corpus) {
    PromptConfig config;
    config.mode = DictMode::kInstruction;
    config.target_language = language_display_name(p.tgt_lang);
    records.push_back(build_record(p.source, p.target, {}, config, p.id, corpus.domain_tag()));
  }
  for (std::size_t i = 0; i < dict.size(); ++i) {
    records.push_back(dict_entry_record(dict[i], i, language, corpus.domain_tag()));
  }
  return records;
}

std::size_t record_length(const InstructionRecord& record) {
  return text::codepoint_length(record.instruction) + text::codepoint_length(record.input) +
         text::codepoint_length(record.output);
}

std::string record_to_json(const InstructionRecord& record) {
  nlohmann::ordered_json meta{{"id", record.meta.id},
                              {"mode", to_string(record.meta.mode)},
                              {"domain_tag", record.meta.domain_tag},
                              {"example_ids", record.meta.example_ids}};
  if (record.meta.source) meta["source"] = *record.meta.source;
  nlohmann::ordered_json j{{"instruction", record.instruction},
                           {"input", record.input},
                           {"output", record.output},
                           {"meta", std::move(meta)}};
  return j.dump();
}

InstructionRecord record_from_json(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    throw ValidationError("malformed instruction record JSON");
  }
  try {
    InstructionRecord r;
    r.instruction = j.at("instruction").get<std::string>();
    r.input = j.at("input").get<std::string>();
    r.output = j.at("output").get<std::string>();
    const auto& meta = j.at("meta");
    r.meta.id = meta.at("id").get<std::string>();
    r.meta.mode = parse_dict_mode(meta.at("mode").get<std::string>());
    r.meta.domain_tag = meta.value("domain_tag", "");
    r.meta.example_ids = meta.value("example_ids", std::vector<std::string>{});
    if (meta.contains("source")) r.meta.source = meta.at("source").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("instruction record: ") + e.what());
  }
}

}  // namespace dragforge
