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

#include "dragforge/dictionary.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "dragforge/error.hpp"
#include "dragforge/io.hpp"
#include "dragforge/text.hpp"

namespace dragforge {
namespace {

std::u32string prepare(std::string_view utf8, const MatchOptions& options) {
  auto cps = text::decode_utf8(utf8);
  return options.case_insensitive ? text::fold_case(cps) : cps;
}

bool at_token_boundary(std::u32string_view s, std::size_t start, std::size_t end) {
  const bool left = start == 0 || !text::is_word_char(s[start - 1]);
  const bool right = end == s.size() || !text::is_word_char(s[end]);
  return left && right;
}

}  // namespace

// ---------------------------------------------------------------- TermMatcher

TermMatcher::TermMatcher(const std::vector<std::u32string>& patterns) {
  nodes_.emplace_back();
  lengths_.reserve(patterns.size());
  for (std::size_t p = 0; p < patterns.size(); ++p) {
    lengths_.push_back(patterns[p].size());
    std::int32_t node = 0;
    for (char32_t c : patterns[p]) {
      const auto key = edge_key(node, c);
      auto it = edges_.find(key);
      if (it == edges_.end()) {
        const auto child = static_cast<std::int32_t>(nodes_.size());
        nodes_.emplace_back();
        nodes_[node].children.emplace_back(c, child);
        edges_.emplace(key, child);
        node = child;
      } else {
        node = it->second;
      }
    }
    if (!patterns[p].empty()) nodes_[node].outputs.push_back(p);
  }

  std::deque<std::int32_t> queue;
  for (const auto& [c, child] : nodes_[0].children) {
    nodes_[child].fail = 0;
    queue.push_back(child);
  }
  while (!queue.empty()) {
    const auto node = queue.front();
    queue.pop_front();
    for (const auto& [c, child] : nodes_[node].children) {
      std::int32_t f = nodes_[node].fail;
      for (;;) {
        auto it = edges_.find(edge_key(f, c));
        if (it != edges_.end()) {
          f = it->second;
          break;
        }
        if (f == 0) break;
        f = nodes_[f].fail;
      }
      nodes_[child].fail = f;
      nodes_[child].output_link = nodes_[f].outputs.empty() ? nodes_[f].output_link : f;
      queue.push_back(child);
    }
  }
}

std::int32_t TermMatcher::step(std::int32_t node, char32_t c) const {
  for (;;) {
    auto it = edges_.find(edge_key(node, c));
    if (it != edges_.end()) return it->second;
    if (node == 0) return 0;
    node = nodes_[node].fail;
  }
}

std::vector<TermMatcher::Hit> TermMatcher::find_all(std::u32string_view text) const {
  std::vector<Hit> hits;
  if (nodes_.size() <= 1) return hits;
  std::int32_t node = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    node = step(node, text[i]);
    for (std::int32_t n = nodes_[node].outputs.empty() ? nodes_[node].output_link : node; n != -1;
         n = nodes_[n].output_link) {
      for (auto p : nodes_[n].outputs) hits.push_back({p, i + 1 - lengths_[p]});
    }
  }
  return hits;
}

// ----------------------------------------------------------- SortedDictionary

SortedDictionary::SortedDictionary() : matcher_(std::vector<std::u32string>{}) {}

SortedDictionary::SortedDictionary(std::vector<DictEntry> entries, MatchOptions options,
                                   std::vector<std::string>* warnings)
    : options_(options) {
  auto warn = [&](std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
  };
  std::unordered_map<std::string, std::string> seen;
  std::vector<DictEntry> kept;
  kept.reserve(entries.size());
  for (auto& e : entries) {
    if (e.source_term.empty() || e.target_term.empty()) {
      warn("skipped entry with empty term: '" + e.source_term + "' -> '" + e.target_term + "'");
      continue;
    }
    if (!text::is_valid_utf8(e.source_term) || !text::is_valid_utf8(e.target_term)) {
      warn("skipped entry with invalid UTF-8: '" + e.source_term + "'");
      continue;
    }
    if (e.source_term == e.target_term) {
      warn("skipped identity entry '" + e.source_term + "'");
      continue;
    }
    auto [it, inserted] = seen.emplace(e.source_term, e.target_term);
    if (!inserted) {
      if (it->second != e.target_term) {
        warn("conflicting translations for '" + e.source_term + "': kept '" + it->second +
             "', dropped '" + e.target_term + "'");
      }
      continue;
    }
    kept.push_back(std::move(e));
  }

  std::vector<std::pair<std::size_t, DictEntry>> keyed;
  keyed.reserve(kept.size());
  for (auto& e : kept) keyed.emplace_back(text::codepoint_length(e.source_term), std::move(e));
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second.source_term < b.second.source_term;
  });

  std::vector<std::u32string> patterns;
  patterns.reserve(keyed.size());
  for (auto& [len, e] : keyed) {
    patterns.push_back(prepare(e.source_term, options_));
    lengths_.push_back(len);
    entries_.push_back(std::move(e));
  }
  matcher_ = TermMatcher(patterns);
}

LoadedDictionary parse_dictionary(std::string_view content, MatchOptions options,
                                  const std::string& origin) {
  const auto lines = io::split_lines(content);
  std::vector<DictEntry> entries;
  std::vector<std::string> warnings;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (line.empty() || line.front() == '#') continue;
    const auto where = origin + ":" + std::to_string(i + 1);
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ValidationError(where + ": expected source<TAB>target");
    if (line.find('\t', tab + 1) != std::string::npos) {
      throw ValidationError(where + ": more than two columns");
    }
    entries.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  LoadedDictionary loaded{SortedDictionary(std::move(entries), options, &warnings), {}};
  loaded.warnings = std::move(warnings);
  return loaded;
}

LoadedDictionary load_dictionary(const std::filesystem::path& path, MatchOptions options) {
  return parse_dictionary(io::read_file(path), options, path.string());
}

std::string serialize_dictionary(const SortedDictionary& dict) {
  std::string out;
  for (const auto& e : dict.entries()) {
    out += e.source_term;
    out += '\t';
    out += e.target_term;
    out += '\n';
  }
  return out;
}

// ------------------------------------------------------------------- matching

std::vector<TermSpan> match_terms(std::u32string_view sentence, const SortedDictionary& dict) {
  std::vector<TermSpan> accepted;
  if (dict.empty() || sentence.empty()) return accepted;

  std::u32string folded;
  std::u32string_view haystack = sentence;
  if (dict.options().case_insensitive) {
    folded = text::fold_case(sentence);
    haystack = folded;
  }

  auto hits = dict.matcher().find_all(haystack);
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    return a.pattern != b.pattern ? a.pattern < b.pattern : a.start < b.start;
  });

  std::vector<bool> claimed(sentence.size(), false);
  std::size_t current = static_cast<std::size_t>(-1);
  std::size_t resume = 0;
  for (const auto& hit : hits) {
    if (hit.pattern != current) {
      current = hit.pattern;
      resume = 0;
    }
    const auto len = dict.term_length(hit.pattern);
    const auto end = hit.start + len;
    if (hit.start < resume) continue;
    if (dict.options().whole_token && !at_token_boundary(sentence, hit.start, end)) continue;
    if (std::any_of(claimed.begin() + static_cast<std::ptrdiff_t>(hit.start),
                    claimed.begin() + static_cast<std::ptrdiff_t>(end), [](bool b) { return b; })) {
      continue;
    }
    std::fill(claimed.begin() + static_cast<std::ptrdiff_t>(hit.start),
              claimed.begin() + static_cast<std::ptrdiff_t>(end), true);
    accepted.push_back({hit.start, end, hit.pattern});
    resume = end;
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const auto& a, const auto& b) { return a.start < b.start; });
  return accepted;
}

std::vector<TermSpan> match_terms(std::string_view sentence, const SortedDictionary& dict) {
  return match_terms(std::u32string_view(text::decode_utf8(sentence)), dict);
}

std::vector<DictEntry> matched_entries(std::string_view sentence, const SortedDictionary& dict) {
  std::vector<DictEntry> out;
  std::unordered_set<std::size_t> seen;
  for (const auto& span : match_terms(sentence, dict)) {
    if (seen.insert(span.entry).second) out.push_back(dict[span.entry]);
  }
  return out;
}

RephraseResult dict_rephrase(std::string_view sentence, const SortedDictionary& dict) {
  const auto cps = text::decode_utf8(sentence);
  const auto spans = match_terms(std::u32string_view(cps), dict);
  RephraseResult result;
  result.replacements.reserve(spans.size());
  std::size_t pos = 0;
  for (const auto& span : spans) {
    result.rephrased += text::encode_utf8(std::u32string_view(cps).substr(pos, span.start - pos));
    result.rephrased += dict[span.entry].target_term;
    result.replacements.push_back(
        {span.start, span.end, dict[span.entry].source_term, dict[span.entry].target_term});
    pos = span.end;
  }
  result.rephrased += text::encode_utf8(std::u32string_view(cps).substr(pos));
  return result;
}

std::string apply_replacements(std::string_view original,
                               std::span<const Replacement> replacements) {
  const auto cps = text::decode_utf8(original);
  const std::u32string_view view(cps);
  std::string out;
  std::size_t pos = 0;
  for (const auto& r : replacements) {
    if (r.start < pos || r.end < r.start || r.end > cps.size()) {
      throw ValidationError("replacement spans out of order or out of range");
    }
    out += text::encode_utf8(view.substr(pos, r.start - pos));
    out += r.target_term;
    pos = r.end;
  }
  out += text::encode_utf8(view.substr(pos));
  return out;
}

std::string restore_source(std::string_view rephrased, std::span<const Replacement> replacements) {
  const auto cps = text::decode_utf8(rephrased);
  const std::u32string_view view(cps);
  std::string out;
  std::size_t orig_pos = 0;  // position in the original text
  std::size_t pos = 0;       // position in the rephrased text
  for (const auto& r : replacements) {
    const auto gap = r.start - orig_pos;
    const auto tgt_len = text::codepoint_length(r.target_term);
    if (r.start < orig_pos || pos + gap + tgt_len > cps.size()) {
      throw ValidationError("replacements do not describe this rephrased text");
    }
    out += text::encode_utf8(view.substr(pos, gap));
    out += r.source_term;
    pos += gap + tgt_len;
    orig_pos = r.end;
  }
  out += text::encode_utf8(view.substr(pos));
  return out;
}

RephrasedCorpus rephrase_corpus(const ParallelCorpus& corpus, const SortedDictionary& dict) {
  RephraseStats stats;
  stats.hits.assign(dict.size(), 0);
  std::vector<ParallelPair> pairs;
  pairs.reserve(corpus.size());
  for (const auto& p : corpus) {
    const auto cps = text::decode_utf8(p.source);
    const auto spans = match_terms(std::u32string_view(cps), dict);
    for (const auto& s : spans) ++stats.hits[s.entry];
    stats.total_replacements += spans.size();
    auto copy = p;
    if (!spans.empty()) copy.source = dict_rephrase(p.source, dict).rephrased;
    pairs.push_back(std::move(copy));
  }
  return {ParallelCorpus(std::move(pairs), corpus.domain_tag()), std::move(stats)};
}

std::string serialize_rephrase_stats(const RephraseStats& stats, const SortedDictionary& dict) {
  std::string out;
  for (std::size_t i = 0; i < dict.size(); ++i) {
    nlohmann::ordered_json j{{"w_src", dict[i].source_term},
                             {"w_tgt", dict[i].target_term},
                             {"hits", i < stats.hits.size() ? stats.hits[i] : 0}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::size_t count_occurrences(std::u32string_view haystack, std::u32string_view needle,
                              const MatchOptions& options) {
  if (needle.empty() || needle.size() > haystack.size()) return 0;
  std::u32string h_folded, n_folded;
  std::u32string_view h = haystack, n = needle;
  if (options.case_insensitive) {
    h_folded = text::fold_case(haystack);
    n_folded = text::fold_case(needle);
    h = h_folded;
    n = n_folded;
  }
  std::size_t count = 0;
  std::size_t pos = 0;
  while ((pos = h.find(n, pos)) != std::u32string_view::npos) {
    if (options.whole_token && !at_token_boundary(h, pos, pos + n.size())) {
      ++pos;
      continue;
    }
    ++count;
    pos += n.size();
  }
  return count;
}

std::string extraction_prompt(std::span<const ParallelPair> pairs, const std::string& domain_tag) {
  if (pairs.empty()) throw ValidationError("extraction prompt needs at least one pair");
  const auto src = language_display_name(pairs.front().src_lang);
  const auto tgt = language_display_name(pairs.front().tgt_lang);
  std::string out = "You are a seasoned translator specializing in the " + domain_tag +
                    " domain. Please review the provided " + src + "-" + tgt +
                    " translation pairs and identify the most specialized " + domain_tag +
                    " terms from each pair. Skip any pairs that do not contain specialized " +
                    domain_tag + " terms.\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out += "\n" + std::to_string(i + 1) + ".\n";
    out += language_display_name(pairs[i].src_lang) + ": " + pairs[i].source + "\n";
    out += language_display_name(pairs[i].tgt_lang) + ": " + pairs[i].target + "\n";
  }
  return out;
}

}  // namespace dragforge
