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

#include <gtest/gtest.h>

#include <json.hpp>
#include <random>

#include "dragforge/error.hpp"
#include "dragforge/prompting.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace dragforge {
namespace {

std::vector<EvalTriple> triples_from(const std::vector<std::pair<std::string, std::string>>& hr) {
  std::vector<EvalTriple> out;
  for (std::size_t i = 0; i < hr.size(); ++i) out.push_back({std::to_string(i), "", hr[i].first, hr[i].second});
  return out;
}

std::string random_sentence(std::mt19937_64& rng, std::size_t min_words, std::size_t max_words) {
  static const std::vector<std::string> vocab = {"the", "disk", "server", "node", "log", "run", "check", "data", "a", "on"};
  std::uniform_int_distribution<std::size_t> len(min_words, max_words), pick(0, vocab.size() - 1);
  std::string s;
  const auto n = len(rng);
  for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + vocab[pick(rng)];
  return s;
}

std::vector<std::pair<std::string, std::string>> random_corpus(std::mt19937_64& rng, std::size_t pairs) {
  std::vector<std::pair<std::string, std::string>> hr;
  for (std::size_t i = 0; i < pairs; ++i) {
    auto ref = random_sentence(rng, 4, 12);
    // Half of the hypotheses are light edits of the reference.
    auto hyp = (i % 2) ? ref + " " + random_sentence(rng, 0, 2) : random_sentence(rng, 4, 12);
    hr.emplace_back(hyp, ref);
  }
  return hr;
}

TEST(Tokenize, Modes) {
  EXPECT_EQ(tokenize("a  b\tc", Tokenizer::kWhitespace), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(tokenize("数据 盘", Tokenizer::kChar), (std::vector<std::string>{"数", "据", "盘"}));
  EXPECT_EQ(default_tokenizer_for("zh"), Tokenizer::kChar);
  EXPECT_EQ(default_tokenizer_for("de"), Tokenizer::kWhitespace);
}

TEST(Bleu, IdentityIsHundred) {
  const auto t = triples_from({{"run the command on the server", "run the command on the server"},
                               {"check the data disk now", "check the data disk now"}});
  const auto r = corpus_bleu(t, Tokenizer::kWhitespace);
  EXPECT_EQ(r.score, 100.0);
  EXPECT_EQ(r.brevity_penalty, 1.0);
}

TEST(Bleu, NoSharedUnigramIsZero) {
  EXPECT_EQ(corpus_bleu(triples_from({{"x y z w", "a b c d"}}), Tokenizer::kWhitespace).score, 0.0);
}

TEST(Bleu, Errors) {
  EXPECT_THROW(corpus_bleu(std::vector<EvalTriple>{}, Tokenizer::kWhitespace), ValidationError);
  EXPECT_THROW(corpus_bleu(triples_from({{"a", ""}}), Tokenizer::kWhitespace), ValidationError);
}

TEST(Bleu, AgreesWithNaiveOracle) {
  std::mt19937_64 rng(20);
  for (int c = 0; c < 20; ++c) {
    std::uniform_int_distribution<std::size_t> size(5, 50);
    const auto hr = random_corpus(rng, size(rng));
    EXPECT_NEAR(corpus_bleu(triples_from(hr), Tokenizer::kWhitespace).score, oracle::bleu(hr), 0.1);
  }
}

TEST(Bleu, HandComputedBrevityAndAsymmetry) {
  const auto forward = corpus_bleu(triples_from({{"a b c d e", "a b c d e f g"}}), Tokenizer::kWhitespace);
  EXPECT_NEAR(forward.score, 100.0 * std::exp(1.0 - 7.0 / 5.0), 1e-9);
  const auto backward = corpus_bleu(triples_from({{"a b c d e f g", "a b c d e"}}), Tokenizer::kWhitespace);
  EXPECT_NEAR(backward.score, 100.0 * std::pow(5.0 / 7 * 4.0 / 6 * 3.0 / 5 * 2.0 / 4, 0.25), 1e-9);
  EXPECT_NE(forward.score, backward.score);
}

TEST(Bleu, AppendingIdentityPairNeverDecreases) {
  std::mt19937_64 rng(21);
  for (int c = 0; c < 30; ++c) {
    auto hr = random_corpus(rng, 8);
    const double before = oracle::bleu(hr);
    const auto lib_before = corpus_bleu(triples_from(hr), Tokenizer::kWhitespace);
    bool all_below_one = true;
    for (double p : lib_before.precisions) all_below_one = all_below_one && p < 1.0;
    if (!all_below_one) continue;
    const auto s = random_sentence(rng, 4, 10);
    hr.emplace_back(s, s);
    EXPECT_GE(corpus_bleu(triples_from(hr), Tokenizer::kWhitespace).score + 1e-12, lib_before.score);
    EXPECT_GE(oracle::bleu(hr) + 1e-12, before);
  }
}

TEST(Bleu, SmoothingAndCharTokenizer) {
  const auto t = triples_from({{"a b", "a b"}});
  EXPECT_EQ(corpus_bleu(t, Tokenizer::kWhitespace).score, 0.0);
  EXPECT_GT(corpus_bleu(t, Tokenizer::kWhitespace, true).score, 0.0);
  EXPECT_EQ(corpus_bleu(triples_from({{"数据盘使用量", "数据盘使用量"}}), Tokenizer::kChar).score, 100.0);
}

SortedDictionary it_dict() {
  return SortedDictionary(std::vector<DictEntry>{{"数据盘", "data disk"}, {"连接器", "connector"}, {"盘", "disk"}});
}

TEST(TermRate, PerfectAndVacuous) {
  const std::vector<EvalTriple> t = {
      {"1", "数据盘和连接器", "data disk and connector", "data disk and connector"}};
  const auto r = term_success_rate(t, it_dict(), TermMatching::kSubstring);
  EXPECT_EQ(r.attempted, 2u);
  EXPECT_EQ(r.succeeded, 2u);
  EXPECT_EQ(r.rate, 1.0);
  const std::vector<EvalTriple> none = {{"1", "无术语", "x", "x"}};
  const auto v = term_success_rate(none, it_dict(), TermMatching::kSubstring);
  EXPECT_EQ(v.attempted, 0u);
  EXPECT_FALSE(v.rate.has_value());
}

TEST(TermRate, PerOccurrenceCapping) {
  const std::vector<EvalTriple> t = {{"1", "盘盘盘", "disk disk", ""}};
  const auto r = term_success_rate(t, it_dict(), TermMatching::kSubstring);
  EXPECT_EQ(r.attempted, 3u);
  EXPECT_EQ(r.succeeded, 2u);
}

TEST(TermRate, WholeTokenIsCaseInsensitive) {
  const std::vector<EvalTriple> t = {{"1", "连接器", "Connector.", ""}, {"2", "连接器", "connectors", ""}};
  const auto r = term_success_rate(t, it_dict(), TermMatching::kWholeToken);
  EXPECT_EQ(r.attempted, 2u);
  EXPECT_EQ(r.succeeded, 1u);
  EXPECT_EQ(term_success_rate(t, it_dict(), TermMatching::kSubstring).succeeded, 1u);
}

struct TermCase {
  std::vector<oracle::Term> terms;
  std::vector<EvalTriple> triples;
};

TermCase term_case(std::mt19937_64& rng, std::size_t n) {
  const std::vector<std::string> src_alpha = {"数", "据", "盘"};
  const std::vector<std::string> tgt_alpha = {"d", "k", "s"};
  TermCase c;
  for (int i = 0; i < 5; ++i) c.terms.push_back({oracle::random_word(rng, src_alpha, 1, 3), oracle::random_word(rng, tgt_alpha, 1, 2)});
  for (std::size_t i = 0; i < n; ++i) {
    c.triples.push_back({std::to_string(i), oracle::random_word(rng, src_alpha, 1, 12),
                         oracle::random_word(rng, tgt_alpha, 0, 12), "ref"});
  }
  return c;
}

std::pair<std::size_t, std::size_t> term_oracle(const TermCase& c) {
  const auto sorted = oracle::sort_terms(c.terms);
  std::size_t attempted = 0, succeeded = 0;
  for (const auto& t : c.triples) {
    std::vector<std::size_t> per(sorted.size(), 0);
    for (const auto& s : oracle::accepted_spans(t.source, sorted)) ++per[s.term];
    for (std::size_t e = 0; e < sorted.size(); ++e) {
      attempted += per[e];
      succeeded += std::min(per[e], oracle::count_nonoverlapping(t.hypothesis, sorted[e].tgt));
    }
  }
  return {attempted, succeeded};
}

std::vector<DictEntry> entries_of(const std::vector<oracle::Term>& terms) {
  std::vector<DictEntry> out;
  for (const auto& t : terms) out.push_back({t.src, t.tgt});
  return out;
}

TEST(TermRate, EnumerationOracle) {
  std::mt19937_64 rng(30);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = term_case(rng, 30);
    const auto r = term_success_rate(c.triples, SortedDictionary(entries_of(c.terms)), TermMatching::kSubstring);
    const auto [a, s] = term_oracle(c);
    EXPECT_EQ(r.attempted, a);
    EXPECT_EQ(r.succeeded, s);
    if (r.rate) {
      EXPECT_GE(*r.rate, 0.0);
      EXPECT_LE(*r.rate, 1.0);
    }
  }
}

TEST(TermRate, MonotoneUnderCorruption) {
  std::mt19937_64 rng(31);
  const SortedDictionary d = it_dict();
  std::size_t checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<EvalTriple> t = {{"1", "数据盘和盘和连接器", "", ""}, {"2", "盘", "", ""}};
    const std::vector<std::string> pieces = {"data disk", "disk", "connector", "other"};
    std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
    for (auto& x : t) {
      for (int w = 0; w < 4; ++w) x.hypothesis += pieces[pick(rng)] + " ";
    }
    const auto before = term_success_rate(t, d, TermMatching::kWholeToken);
    auto& hyp = t[trial % 2].hypothesis;
    const auto pos = hyp.find("disk");
    if (pos == std::string::npos) continue;
    hyp.replace(pos, 4, "zzzz");
    const auto after = term_success_rate(t, d, TermMatching::kWholeToken);
    EXPECT_LE(after.rate.value_or(0), before.rate.value_or(0));
    ++checked;
  }
  EXPECT_GT(checked, 50u);
}

TEST(Pharaoh, Parsing) {
  EXPECT_EQ(parse_pharaoh_line("0-0 2-1  3-3"), (Alignment{{0, 0}, {2, 1}, {3, 3}}));
  EXPECT_TRUE(parse_pharaoh_line("").empty());
  EXPECT_THROW(parse_pharaoh_line("0-"), ValidationError);
  EXPECT_THROW(parse_pharaoh_line("a-1"), ValidationError);
  EXPECT_EQ(parse_pharaoh("0-0\n\n1-1\n").size(), 3u);
}

TEST(Utw, AllLinkedAndNoLinks) {
  const std::vector<EvalTriple> t = {{"1", "", "a b c", "a b c"}};
  EXPECT_EQ(utw_rate(t, {{"1", {{0, 0}, {1, 1}, {2, 2}}}}).rate, 0.0);
  EXPECT_EQ(utw_rate(t, {{"1", {}}}).rate, 1.0);
  EXPECT_EQ(utw_rate(t, {}).rate, 1.0);
}

TEST(Utw, MixedHandEnumerated) {
  const std::vector<EvalTriple> t = {
      {"s1", "", "a b c d", "a c"}, {"s2", "", "x y", "x y"}, {"s3", "", "p q r", "p q r"}};
  const std::map<std::string, Alignment> al = {{"s1", {{0, 0}, {2, 1}}}, {"s2", {{0, 0}, {1, 0}, {0, 1}}}};
  const auto r = utw_rate(t, al);
  EXPECT_EQ(r.total_hyp_tokens, 9u);
  EXPECT_EQ(r.unaligned_tokens, 5u);
  EXPECT_NEAR(r.rate, 5.0 / 9.0, 1e-12);
}

TEST(Utw, OutOfRangeNamesIdAndIndex) {
  const std::vector<EvalTriple> t = {{"s7", "", "a b", "a b"}};
  try {
    utw_rate(t, {{"s7", {{5, 0}}}});
    FAIL();
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("s7"), std::string::npos) << msg;
    EXPECT_NE(msg.find("5"), std::string::npos) << msg;
  }
  EXPECT_THROW(utw_rate(t, {{"s7", {{0, 9}}}}), ValidationError);
}

TEST(Utw, ComplementOnGeneratedAlignments) {
  std::mt19937_64 rng(40);
  for (int trial = 0; trial < 200; ++trial) {
    const auto hyp = random_sentence(rng, 1, 10);
    const auto ref = random_sentence(rng, 1, 10);
    const auto hn = oracle::split_ws(hyp).size(), rn = oracle::split_ws(ref).size();
    Alignment links;
    std::uniform_int_distribution<std::size_t> hi(0, hn - 1), ri(0, rn - 1), count(0, 12);
    for (std::size_t k = count(rng); k > 0; --k) links.emplace_back(hi(rng), ri(rng));
    std::vector<bool> aligned(hn, false);
    for (const auto& [i, j] : links) aligned[i] = true;
    const auto aligned_count = static_cast<std::size_t>(std::count(aligned.begin(), aligned.end(), true));
    const std::vector<EvalTriple> t = {{"x", "", hyp, ref}};
    const auto r = utw_rate(t, {{"x", links}});
    EXPECT_EQ(r.unaligned_tokens + aligned_count, r.total_hyp_tokens);
    EXPECT_GE(r.rate, 0.0);
    EXPECT_LE(r.rate, 1.0);
  }
}

TEST(ChainStripping, EquivalentToPlainOutputs) {
  std::mt19937_64 rng(50);
  std::vector<EvalTriple> plain, chained;
  for (int i = 0; i < 50; ++i) {
    const auto hyp = random_sentence(rng, 4, 10);
    const auto ref = random_sentence(rng, 4, 10);
    std::vector<DictEntry> matched;
    for (int k = i % 3; k > 0; --k) matched.push_back({"术语" + std::to_string(k), "term " + std::to_string(k)});
    plain.push_back({std::to_string(i), "", hyp, ref});
    chained.push_back({std::to_string(i), "", strip_chain_suffix(hyp + chain_suffix(matched)), ref});
  }
  const auto a = corpus_bleu(plain, Tokenizer::kWhitespace);
  const auto b = corpus_bleu(chained, Tokenizer::kWhitespace);
  EXPECT_EQ(a.score, b.score);
  EXPECT_EQ(a.totals, b.totals);
}

TEST(Lengths, SingleBinEmptyAndMean) {
  const std::vector<std::string> five(7, "a b c d e");
  const auto d = length_distribution(five, Tokenizer::kWhitespace);
  EXPECT_EQ(d.histogram, (std::map<std::size_t, std::size_t>{{0, 7}}));
  EXPECT_TRUE(length_distribution(std::vector<std::string>{}, Tokenizer::kWhitespace).histogram.empty());

  std::mt19937_64 rng(100);
  std::vector<std::string> texts;
  double sum = 0;
  for (int i = 0; i < 100; ++i) {
    texts.push_back(random_sentence(rng, 0, 40));
    sum += static_cast<double>(oracle::split_ws(texts.back()).size());
  }
  const auto r = length_distribution(texts, Tokenizer::kWhitespace);
  EXPECT_NEAR(r.mean, sum / 100.0, 1e-12);
  std::size_t total = 0;
  for (const auto& [bin, count] : r.histogram) {
    EXPECT_EQ(bin % 10, 0u);
    total += count;
  }
  EXPECT_EQ(total, 100u);
}

TEST(Lengths, MedianAndNearestRankP95) {
  std::vector<std::string> texts;
  for (int n = 1; n <= 20; ++n) {
    std::string s;
    for (int i = 0; i < n; ++i) s += "w ";
    texts.push_back(s);
  }
  const auto d = length_distribution(texts, Tokenizer::kWhitespace, 5);
  EXPECT_EQ(d.median, 10.5);
  EXPECT_EQ(d.p95, 19.0);
  EXPECT_EQ(d.histogram.at(0), 4u);
  EXPECT_EQ(d.histogram.at(20), 1u);
}

TEST(ExternalScores, LoadDuplicatesAndCoverage) {
  testutil::TempDir dir;
  testutil::write_text(dir / "s.jsonl", "{\"id\":\"1\",\"score\":0.8}\n{\"id\":\"2\",\"score\":0.5}\n{\"id\":\"3\",\"score\":0.9}\n");
  const auto m = ingest_external_scores(dir / "s.jsonl");
  EXPECT_EQ(m.size(), 3u);
  std::set<std::string> ids;
  for (const auto& [id, s] : m) ids.insert(id);
  EXPECT_EQ(ids, (std::set<std::string>{"1", "2", "3"}));

  testutil::write_text(dir / "dup.jsonl", "{\"id\":\"x9\",\"score\":1}\n{\"id\":\"x9\",\"score\":2}\n");
  try {
    ingest_external_scores(dir / "dup.jsonl");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("x9"), std::string::npos);
  }
  testutil::write_text(dir / "nan.jsonl", "{\"id\":\"1\",\"score\":\"high\"}\n");
  EXPECT_THROW(ingest_external_scores(dir / "nan.jsonl"), ValidationError);
}

TEST(Report, JsonFields) {
  EvalReport report;
  report.bleu = corpus_bleu(triples_from({{"a b c d", "a b c d"}}), Tokenizer::kWhitespace);
  report.terms = TermReport{4, 3, 0.75};
  const auto j = nlohmann::json::parse(report_to_json(report));
  EXPECT_EQ(j["bleu"]["score"], 100.0);
  EXPECT_EQ(j["terminology"]["rate"], 0.75);
  EXPECT_FALSE(j.contains("utw"));
}

}  // namespace
}  // namespace dragforge
