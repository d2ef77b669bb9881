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

#include "dragforge/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <json.hpp>

#include "dragforge/error.hpp"
#include "dragforge/io.hpp"
#include "dragforge/text.hpp"

namespace dragforge {
namespace {

using ordered_json = nlohmann::ordered_json;

// n-grams are keyed by their tokens joined with U+0001, which no tokenizer emits.
using NgramCounts = std::unordered_map<std::string, std::size_t>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens, std::size_t order) {
  NgramCounts counts;
  if (tokens.size() < order) return counts;
  for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t k = 1; k < order; ++k) {
      key += '\x01';
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

bool is_cjk_language(std::string_view tag) {
  const auto base = tag.substr(0, tag.find('-'));
  return base == "zh" || base == "ja" || base == "ko";
}

ordered_json length_json(const LengthDistribution& d) {
  ordered_json hist = ordered_json::object();
  for (const auto& [bin, count] : d.histogram) hist[std::to_string(bin)] = count;
  return ordered_json{{"bin_width", d.bin_width}, {"count", d.count}, {"mean", d.mean},
                      {"median", d.median},       {"p95", d.p95},     {"histogram", hist}};
}

}  // namespace

std::string to_string(Tokenizer tokenizer) {
  return tokenizer == Tokenizer::kChar ? "char" : "whitespace";
}

Tokenizer parse_tokenizer(std::string_view name) {
  if (name == "whitespace") return Tokenizer::kWhitespace;
  if (name == "char") return Tokenizer::kChar;
  throw ValidationError("unknown tokenizer '" + std::string(name) + "'");
}

Tokenizer default_tokenizer_for(std::string_view lang_tag) {
  return is_cjk_language(lang_tag) ? Tokenizer::kChar : Tokenizer::kWhitespace;
}

std::vector<std::string> tokenize(std::string_view text, Tokenizer tokenizer) {
  return tokenizer == Tokenizer::kChar ? text::char_tokens(text) : text::whitespace_tokens(text);
}

BleuReport corpus_bleu(std::span<const EvalTriple> triples, Tokenizer tokenizer, bool smooth) {
  if (triples.empty()) throw ValidationError("BLEU needs at least one hypothesis");
  BleuReport report;
  report.tokenizer = tokenizer;
  report.smoothed = smooth;
  for (const auto& t : triples) {
    const auto hyp = tokenize(t.hypothesis, tokenizer);
    const auto ref = tokenize(t.reference, tokenizer);
    if (ref.empty()) throw ValidationError("empty reference for id '" + t.id + "'");
    report.hyp_len += hyp.size();
    report.ref_len += ref.size();
    for (std::size_t order = 1; order <= 4; ++order) {
      const auto h = count_ngrams(hyp, order);
      const auto r = count_ngrams(ref, order);
      for (const auto& [gram, count] : h) {
        const auto it = r.find(gram);
        if (it != r.end()) report.matches[order - 1] += std::min(count, it->second);
      }
      report.totals[order - 1] += hyp.size() >= order ? hyp.size() - order + 1 : 0;
    }
  }

  bool any_zero = false;
  double log_sum = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    double m = static_cast<double>(report.matches[i]);
    double t = static_cast<double>(report.totals[i]);
    if (smooth && i > 0) {
      m += 1.0;
      t += 1.0;
    }
    report.precisions[i] = t > 0.0 ? m / t : 0.0;
    if (report.precisions[i] <= 0.0) {
      any_zero = true;
    } else {
      log_sum += std::log(report.precisions[i]);
    }
  }
  if (report.hyp_len == 0) {
    report.brevity_penalty = 0.0;
  } else if (report.hyp_len < report.ref_len) {
    report.brevity_penalty = std::exp(1.0 - static_cast<double>(report.ref_len) /
                                                static_cast<double>(report.hyp_len));
  } else {
    report.brevity_penalty = 1.0;
  }
  report.score = any_zero ? 0.0 : 100.0 * report.brevity_penalty * std::exp(log_sum / 4.0);
  return report;
}

TermMatching parse_term_matching(std::string_view name) {
  if (name == "substring") return TermMatching::kSubstring;
  if (name == "whole_token" || name == "whole-token") return TermMatching::kWholeToken;
  throw ValidationError("unknown term matching '" + std::string(name) + "'");
}

TermMatching default_term_matching_for(std::string_view tgt_lang_tag) {
  return is_cjk_language(tgt_lang_tag) ? TermMatching::kSubstring : TermMatching::kWholeToken;
}

TermReport term_success_rate(std::span<const EvalTriple> triples, const SortedDictionary& dict,
                             TermMatching matching) {
  TermReport report;
  MatchOptions hyp_options;
  if (matching == TermMatching::kWholeToken) {
    hyp_options.whole_token = true;
    hyp_options.case_insensitive = true;
  }
  std::vector<std::u32string> targets;
  targets.reserve(dict.size());
  for (const auto& e : dict.entries()) targets.push_back(text::decode_utf8(e.target_term));

  for (const auto& t : triples) {
    const auto spans = match_terms(std::string_view(t.source), dict);
    if (spans.empty()) continue;
    std::map<std::size_t, std::size_t> per_entry;
    for (const auto& s : spans) ++per_entry[s.entry];
    const auto hyp = text::decode_utf8(t.hypothesis);
    for (const auto& [entry, occurrences] : per_entry) {
      const auto found = count_occurrences(hyp, targets[entry], hyp_options);
      report.attempted += occurrences;
      report.succeeded += std::min(occurrences, found);
    }
  }
  if (report.attempted > 0) {
    report.rate = static_cast<double>(report.succeeded) / static_cast<double>(report.attempted);
  }
  return report;
}

Alignment parse_pharaoh_line(std::string_view line) {
  Alignment links;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    if (pos >= line.size()) break;
    auto end = line.find_first_of(" \t\r", pos);
    if (end == std::string_view::npos) end = line.size();
    const auto tok = line.substr(pos, end - pos);
    const auto dash = tok.find('-');
    std::size_t i = 0, j = 0;
    if (dash == std::string_view::npos ||
        std::from_chars(tok.data(), tok.data() + dash, i).ptr != tok.data() + dash ||
        std::from_chars(tok.data() + dash + 1, tok.data() + tok.size(), j).ptr !=
            tok.data() + tok.size() ||
        dash == 0 || dash + 1 == tok.size()) {
      throw ValidationError("malformed alignment link '" + std::string(tok) + "'");
    }
    links.emplace_back(i, j);
    pos = end;
  }
  return links;
}

std::vector<Alignment> parse_pharaoh(std::string_view content) {
  std::vector<Alignment> out;
  const auto lines = io::split_lines(content);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    try {
      out.push_back(parse_pharaoh_line(lines[n]));
    } catch (const ValidationError& e) {
      throw ValidationError("alignment line " + std::to_string(n + 1) + ": " + e.what());
    }
  }
  return out;
}

UtwReport utw_rate(std::span<const EvalTriple> triples,
                   const std::map<std::string, Alignment>& alignments) {
  UtwReport report;
  for (const auto& t : triples) {
    const auto hyp_len = text::whitespace_tokens(t.hypothesis).size();
    const auto ref_len = text::whitespace_tokens(t.reference).size();
    std::vector<bool> aligned(hyp_len, false);
    if (const auto it = alignments.find(t.id); it != alignments.end()) {
      for (const auto& [i, j] : it->second) {
        if (i >= hyp_len) {
          throw ValidationError("id '" + t.id + "': hypothesis index " + std::to_string(i) +
                                " out of range (" + std::to_string(hyp_len) + " tokens)");
        }
        if (j >= ref_len) {
          throw ValidationError("id '" + t.id + "': reference index " + std::to_string(j) +
                                " out of range (" + std::to_string(ref_len) + " tokens)");
        }
        aligned[i] = true;
      }
    }
    report.total_hyp_tokens += hyp_len;
    report.unaligned_tokens += static_cast<std::size_t>(std::count(aligned.begin(), aligned.end(), false));
  }
  if (report.total_hyp_tokens > 0) {
    report.rate = static_cast<double>(report.unaligned_tokens) /
                  static_cast<double>(report.total_hyp_tokens);
  }
  return report;
}

LengthDistribution length_distribution(std::span<const std::string> texts, Tokenizer tokenizer,
                                       std::size_t bin_width) {
  if (bin_width == 0) throw ValidationError("bin width must be positive");
  LengthDistribution d;
  d.bin_width = bin_width;
  d.count = texts.size();
  if (texts.empty()) return d;
  std::vector<std::size_t> lengths;
  lengths.reserve(texts.size());
  for (const auto& t : texts) {
    const auto len = tokenize(t, tokenizer).size();
    lengths.push_back(len);
    ++d.histogram[(len / bin_width) * bin_width];
  }
  d.mean = static_cast<double>(std::accumulate(lengths.begin(), lengths.end(), std::size_t{0})) /
           static_cast<double>(lengths.size());
  std::sort(lengths.begin(), lengths.end());
  const auto n = lengths.size();
  d.median = n % 2 ? static_cast<double>(lengths[n / 2])
                   : (static_cast<double>(lengths[n / 2 - 1]) + static_cast<double>(lengths[n / 2])) / 2.0;
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  d.p95 = static_cast<double>(lengths[std::max<std::size_t>(rank, 1) - 1]);
  return d;
}

std::map<std::string, double> ingest_external_scores(const std::filesystem::path& path) {
  return io::read_score_jsonl(path);
}

std::map<std::string, std::string> read_hypotheses(const std::filesystem::path& path) {
  std::map<std::string, std::string> out;
  const auto lines = io::split_lines(io::read_file(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto where = path.string() + ":" + std::to_string(i + 1);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error&) {
      throw ValidationError(where + ": malformed JSON");
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("hypothesis") ||
        !j["hypothesis"].is_string()) {
      throw ValidationError(where + ": expected {id, hypothesis}");
    }
    const auto id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
    if (!out.emplace(id, j["hypothesis"].get<std::string>()).second) {
      throw ValidationError(where + ": duplicate id " + id);
    }
  }
  return out;
}

std::string report_to_json(const EvalReport& r) {
  ordered_json j;
  j["tokenizer"] = to_string(r.bleu.tokenizer);
  j["bleu"] = ordered_json{{"score", r.bleu.score},
                           {"precisions", r.bleu.precisions},
                           {"matches", r.bleu.matches},
                           {"totals", r.bleu.totals},
                           {"brevity_penalty", r.bleu.brevity_penalty},
                           {"hyp_len", r.bleu.hyp_len},
                           {"ref_len", r.bleu.ref_len},
                           {"smoothed", r.bleu.smoothed}};
  if (r.terms) {
    j["terminology"] = ordered_json{{"attempted", r.terms->attempted},
                                    {"succeeded", r.terms->succeeded},
                                    {"rate", r.terms->rate ? ordered_json(*r.terms->rate)
                                                           : ordered_json(nullptr)}};
  }
  if (r.utw) {
    j["utw"] = ordered_json{{"total_hyp_tokens", r.utw->total_hyp_tokens},
                            {"unaligned_tokens", r.utw->unaligned_tokens},
                            {"rate", r.utw->rate}};
  }
  j["length"] = ordered_json{{"hypothesis", length_json(r.hyp_lengths)},
                             {"reference", length_json(r.ref_lengths)}};
  if (!r.external.empty()) {
    ordered_json ext = ordered_json::object();
    for (const auto& [name, scores] : r.external) {
      double sum = 0.0;
      for (const auto& [id, s] : scores) sum += s;
      ext[name] = ordered_json{{"count", scores.size()},
                               {"mean", scores.empty() ? 0.0 : sum / static_cast<double>(scores.size())}};
    }
    j["external"] = ext;
  }
  return j.dump(2) + "\n";
}

}  // namespace dragforge
