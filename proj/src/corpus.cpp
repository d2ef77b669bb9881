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

#include "dragforge/corpus.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <unordered_set>

#include <json.hpp>

#include "dragforge/error.hpp"
#include "dragforge/io.hpp"
#include "dragforge/text.hpp"

namespace dragforge {
namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Uniform draw in [0, bound) by rejection; independent of the standard
// library's distribution implementation so splits are portable.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

LengthSummary summarize(std::vector<double> values) {
  LengthSummary s;
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  std::sort(values.begin(), values.end());
  const auto mid = values.size() / 2;
  s.median = values.size() % 2 ? values[mid] : (values[mid - 1] + values[mid]) / 2.0;
  return s;
}

SideStats side_stats(const std::vector<const std::string*>& texts) {
  std::vector<double> chars, tokens, cjk;
  chars.reserve(texts.size());
  tokens.reserve(texts.size());
  cjk.reserve(texts.size());
  for (const auto* t : texts) {
    chars.push_back(static_cast<double>(text::codepoint_length(*t)));
    tokens.push_back(static_cast<double>(text::whitespace_tokens(*t).size()));
    cjk.push_back(static_cast<double>(text::cjk_count(*t)));
  }
  return {summarize(std::move(chars)), summarize(std::move(tokens)), summarize(std::move(cjk))};
}

ParallelCorpus subset(const ParallelCorpus& corpus, std::vector<std::size_t> idx) {
  std::sort(idx.begin(), idx.end());
  std::vector<ParallelPair> pairs;
  pairs.reserve(idx.size());
  for (auto i : idx) pairs.push_back(corpus.pairs()[i]);
  return ParallelCorpus(std::move(pairs), corpus.domain_tag());
}

ordered_json summary_json(const LengthSummary& s) {
  return ordered_json{{"mean", s.mean}, {"median", s.median}};
}

ordered_json side_json(const SideStats& s) {
  return ordered_json{{"chars", summary_json(s.chars)},
                      {"tokens", summary_json(s.tokens)},
                      {"cjk_chars", summary_json(s.cjk_chars)}};
}

}  // namespace

std::string language_display_name(std::string_view tag) {
  static const std::map<std::string, std::string, std::less<>> kNames = {
      {"ar", "Arabic"},  {"cs", "Czech"},    {"de", "German"},   {"en", "English"},
      {"es", "Spanish"}, {"fr", "French"},   {"it", "Italian"},  {"ja", "Japanese"},
      {"ko", "Korean"},  {"nl", "Dutch"},    {"pt", "Portuguese"}, {"ru", "Russian"},
      {"zh", "Chinese"}, {"zh-CN", "Chinese"}, {"zh-Hans", "Chinese"},
  };
  auto base = tag;
  if (auto it = kNames.find(tag); it != kNames.end()) return it->second;
  if (auto dash = tag.find('-'); dash != std::string_view::npos) base = tag.substr(0, dash);
  if (auto it = kNames.find(base); it != kNames.end()) return it->second;
  return std::string(tag);
}

void validate_pair(const ParallelPair& pair) {
  const auto who = "pair '" + pair.id + "'";
  if (pair.id.empty()) throw ValidationError("pair with empty id");
  if (!text::is_valid_utf8(pair.source) || !text::is_valid_utf8(pair.target)) {
    throw ValidationError(who + ": invalid UTF-8");
  }
  if (text::is_blank(pair.source)) throw ValidationError(who + ": empty source");
  if (text::is_blank(pair.target)) throw ValidationError(who + ": empty target");
  if (pair.src_lang == pair.tgt_lang) {
    throw ValidationError(who + ": source and target language are both '" + pair.src_lang + "'");
  }
  if (pair.qe_score && (*pair.qe_score < 0.0 || *pair.qe_score > 100.0)) {
    throw ValidationError(who + ": qe_score outside [0,100]");
  }
}

ParallelPair make_pair(std::string id, std::string source, std::string target,
                       std::string src_lang, std::string tgt_lang,
                       std::optional<double> qe_score) {
  ParallelPair p{std::move(id),       std::move(source),   std::move(target),
                 std::move(src_lang), std::move(tgt_lang), qe_score};
  validate_pair(p);
  return p;
}

ParallelCorpus::ParallelCorpus(std::vector<ParallelPair> pairs, std::string domain_tag)
    : pairs_(std::move(pairs)), domain_tag_(std::move(domain_tag)) {
  std::unordered_set<std::string> seen;
  seen.reserve(pairs_.size());
  for (const auto& p : pairs_) {
    validate_pair(p);
    if (!seen.insert(p.id).second) throw ValidationError("duplicate pair id '" + p.id + "'");
  }
}

CorpusFormat corpus_format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".json") return CorpusFormat::kJsonl;
  return CorpusFormat::kTsv;
}

CorpusFormat parse_corpus_format(const std::string& name) {
  if (name == "tsv") return CorpusFormat::kTsv;
  if (name == "jsonl") return CorpusFormat::kJsonl;
  throw ValidationError("unknown corpus format '" + name + "'");
}

ParallelCorpus parse_parallel_corpus(const std::string& content, CorpusFormat format,
                                     const LoadOptions& options, const std::string& origin) {
  const auto lines = io::split_lines(content);
  std::vector<ParallelPair> pairs;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (line.empty()) continue;
    const auto line_no = std::to_string(i + 1);
    const auto where = origin + ":" + line_no;
    ParallelPair p;
    p.id = line_no;
    p.src_lang = options.src_lang;
    p.tgt_lang = options.tgt_lang;
    if (format == CorpusFormat::kTsv) {
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw ValidationError(where + ": missing target column");
      if (line.find('\t', tab + 1) != std::string::npos) {
        throw ValidationError(where + ": expected exactly two tab-separated columns");
      }
      p.source = line.substr(0, tab);
      p.target = line.substr(tab + 1);
    } else {
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error&) {
        throw ValidationError(where + ": malformed JSON");
      }
      if (!j.is_object()) throw ValidationError(where + ": expected a JSON object");
      if (!j.contains("src") || !j["src"].is_string()) {
        throw ValidationError(where + ": missing string field 'src'");
      }
      if (!j.contains("tgt") || !j["tgt"].is_string()) {
        throw ValidationError(where + ": missing string field 'tgt'");
      }
      p.source = j["src"].get<std::string>();
      p.target = j["tgt"].get<std::string>();
      if (j.contains("id")) {
        p.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
      }
      if (j.contains("qe_score") && !j["qe_score"].is_null()) {
        if (!j["qe_score"].is_number()) throw ValidationError(where + ": non-numeric qe_score");
        p.qe_score = j["qe_score"].get<double>();
      }
      if (j.contains("src_lang")) p.src_lang = j["src_lang"].get<std::string>();
      if (j.contains("tgt_lang")) p.tgt_lang = j["tgt_lang"].get<std::string>();
    }
    try {
      validate_pair(p);
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    pairs.push_back(std::move(p));
  }
  if (pairs.empty()) throw ValidationError(origin + ": empty corpus");
  return ParallelCorpus(std::move(pairs), options.domain_tag);
}

ParallelCorpus load_parallel_corpus(const std::filesystem::path& path, CorpusFormat format,
                                    const LoadOptions& options) {
  return parse_parallel_corpus(io::read_file(path), format, options, path.string());
}

std::string serialize_corpus(const ParallelCorpus& corpus, CorpusFormat format) {
  std::string out;
  for (const auto& p : corpus) {
    if (format == CorpusFormat::kTsv) {
      out += p.source;
      out += '\t';
      out += p.target;
    } else {
      ordered_json j{{"id", p.id}, {"src", p.source}, {"tgt", p.target},
                     {"src_lang", p.src_lang}, {"tgt_lang", p.tgt_lang}};
      if (p.qe_score) j["qe_score"] = *p.qe_score;
      out += j.dump();
    }
    out += '\n';
  }
  return out;
}

FilterResult quality_filter(const ParallelCorpus& corpus,
                            const std::map<std::string, double>& scores, double threshold) {
  std::vector<ParallelPair> kept;
  RejectionReport report;
  for (const auto& p : corpus) {
    const auto it = scores.find(p.id);
    if (it == scores.end()) throw ValidationError("no quality score for pair id '" + p.id + "'");
    if (it->second >= threshold) {
      kept.push_back(p);
    } else {
      report.rejected.push_back({p.id, it->second, threshold});
    }
  }
  return {ParallelCorpus(std::move(kept), corpus.domain_tag()), std::move(report)};
}

std::string serialize_rejections(const RejectionReport& report) {
  std::string out;
  for (const auto& r : report.rejected) {
    out += ordered_json{{"id", r.id}, {"score", r.score}, {"threshold", r.threshold}}.dump();
    out += '\n';
  }
  return out;
}

SplitResult split_corpus(const ParallelCorpus& corpus, std::size_t train_n, std::size_t test_n,
                         std::uint64_t seed) {
  const auto n = corpus.size();
  if (train_n > n || test_n > n - train_n) {
    throw ValidationError("split needs " + std::to_string(train_n) + " train + " +
                          std::to_string(test_n) + " test pairs but corpus has " +
                          std::to_string(n));
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(bounded(rng, i));
    std::swap(idx[i - 1], idx[j]);
  }
  const auto b1 = idx.begin() + static_cast<std::ptrdiff_t>(train_n);
  const auto b2 = b1 + static_cast<std::ptrdiff_t>(test_n);
  return {subset(corpus, {idx.begin(), b1}), subset(corpus, {b1, b2}),
          subset(corpus, {b2, idx.end()})};
}

CorpusStats corpus_stats(const ParallelCorpus& corpus) {
  CorpusStats stats;
  stats.pair_count = corpus.size();
  std::vector<const std::string*> src, tgt;
  for (const auto& p : corpus) {
    src.push_back(&p.source);
    tgt.push_back(&p.target);
  }
  stats.source = side_stats(src);
  stats.target = side_stats(tgt);
  stats.split_counts["corpus"] = corpus.size();
  return stats;
}

CorpusStats corpus_stats(const SplitResult& splits) {
  std::vector<ParallelPair> all;
  for (const auto* part : {&splits.train, &splits.test, &splits.extra}) {
    all.insert(all.end(), part->begin(), part->end());
  }
  auto stats = corpus_stats(ParallelCorpus(std::move(all), splits.train.domain_tag()));
  stats.split_counts = {{"train", splits.train.size()},
                        {"test", splits.test.size()},
                        {"extra", splits.extra.size()}};
  return stats;
}

std::string stats_to_json(const CorpusStats& stats) {
  ordered_json j{{"pair_count", stats.pair_count},
                 {"source", side_json(stats.source)},
                 {"target", side_json(stats.target)},
                 {"split_counts", stats.split_counts}};
  return j.dump(2) + "\n";
}

}  // namespace dragforge
