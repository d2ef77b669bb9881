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

#include <gtest/gtest.h>

#include <random>

#include "dragforge/error.hpp"
#include "dragforge/text.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace dragforge {
namespace {

const std::string kMountSentence = "左挂耳板到主板的左挂耳连接器(J6081)的低速信号线缆";

std::size_t count_substr(const std::string& hay, const std::string& needle) {
  return oracle::count_nonoverlapping(hay, needle);
}

TEST(FewshotPrompt, ZeroExamples) {
  const auto prompt = render_fewshot_prompt("你好", {}, "English");
  EXPECT_EQ(prompt, "Translating the following content into English\n你好");
  EXPECT_EQ(count_substr(prompt, "Translating the following content into English"), 1u);
}

TEST(FewshotPrompt, ExamplesInGivenOrderOnce) {
  const std::vector<ParallelPair> ex = {{"a", "一", "one", "zh", "en", {}}, {"b", "二", "two", "zh", "en", {}}};
  const auto prompt = render_fewshot_prompt("三", ex, "English");
  EXPECT_EQ(count_substr(prompt, "zh: 一\n"), 1u);
  EXPECT_EQ(count_substr(prompt, "zh: 二\n"), 1u);
  EXPECT_LT(prompt.find("one"), prompt.find("two"));
  const std::vector<ParallelPair> rev = {ex[1], ex[0]};
  EXPECT_GT(render_fewshot_prompt("三", rev, "English").find("one"), render_fewshot_prompt("三", rev, "English").find("two"));
}

TEST(FewshotPrompt, Golden) {
  const std::vector<ParallelPair> ex = {
      {"e1", "在每个元数据服务器上执行如下命令查询MDS数据盘容量。",
       "Run the following command on each metadata server to query the MDS data disk capacity.", "zh", "en", {}},
      {"e2", "在每个元数据服务器上执行命令查询数据盘使用量。",
       "Run the command on each metadata server to query the data disk usage.", "zh", "en", {}},
  };
  const auto prompt = render_fewshot_prompt("在每个元数据服务器上执行如下命令查询MDS数据盘使用量。", ex, "English");
  EXPECT_EQ(prompt, testutil::read_text(std::filesystem::path(DRAGFORGE_TEST_DATA) / "golden/fewshot_prompt.txt"));
}

TEST(BuildRecord, PlainAndRephrased) {
  PromptConfig cfg;
  const auto plain = build_record("你好", "hello", {}, cfg, "1", "IT");
  EXPECT_EQ(plain.instruction, "Translating the following content into English");
  EXPECT_EQ(plain.input, "你好");
  EXPECT_EQ(plain.output, "hello");
  EXPECT_TRUE(plain.meta.example_ids.empty());

  const SortedDictionary d(std::vector<DictEntry>{{"挂耳板", "mounting ear plate"}, {"连接器", "connector"}});
  cfg.mode = DictMode::kRephrasing;
  const auto r = build_record(dict_rephrase(kMountSentence, d).rephrased, "t", {}, cfg);
  EXPECT_NE(r.input.find("左mounting ear plate到主板"), std::string::npos);
  EXPECT_EQ(r.input.find("挂耳板"), std::string::npos);
  EXPECT_EQ(r.meta.mode, DictMode::kRephrasing);
}

TEST(DictMode, ParseAndPrint) {
  for (auto m : {DictMode::kNone, DictMode::kRephrasing, DictMode::kInstruction, DictMode::kChain}) {
    EXPECT_EQ(parse_dict_mode(to_string(m)), m);
  }
  EXPECT_EQ(parse_dict_mode("chain"), DictMode::kChain);
  EXPECT_THROW(parse_dict_mode("dict_magic"), ValidationError);
  PromptConfig bad;
  bad.k = 1.5;
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(DictInstruction, CountLaw) {
  std::vector<ParallelPair> pairs;
  for (int i = 0; i < 10; ++i) pairs.push_back({std::to_string(i), "源" + std::to_string(i), "t", "zh", "en", {}});
  const ParallelCorpus c(pairs, "IT");
  const SortedDictionary d(std::vector<DictEntry>{{"盘", "disk"}, {"数据盘", "data disk"}, {"挂耳", "ear"}});
  const auto records = expand_dict_instruction(c, d);
  ASSERT_EQ(records.size(), 13u);
  for (std::size_t i = 10; i < 13; ++i) {
    EXPECT_EQ(records[i].instruction, "Translating the following content into English");
    EXPECT_EQ(records[i].output, d[i - 10].target_term);
    EXPECT_EQ(records[i].input, d[i - 10].source_term);
    EXPECT_EQ(records[i].meta.mode, DictMode::kInstruction);
  }
  EXPECT_EQ(expand_dict_instruction(c, SortedDictionary()).size(), 10u);
}

TEST(DictInstruction, ItScaleCount) {
  std::vector<ParallelPair> pairs;
  pairs.reserve(60000);
  for (int i = 0; i < 60000; ++i) pairs.push_back({std::to_string(i), "s", "t", "zh", "en", {}});
  std::vector<DictEntry> entries;
  for (int i = 0; i < 4000; ++i) entries.push_back({"术语" + std::to_string(i), "term" + std::to_string(i)});
  EXPECT_EQ(expand_dict_instruction(ParallelCorpus(pairs), SortedDictionary(entries)).size(), 64000u);
}

TEST(DictChain, NoMatchesEqualsPlain) {
  const ParallelPair p{"1", "无匹配", "no match", "zh", "en", {}};
  const auto chain = render_dict_chain(p, {});
  const auto plain = build_record(p.source, p.target, {}, PromptConfig{}, p.id);
  EXPECT_EQ(chain.instruction, plain.instruction);
  EXPECT_EQ(chain.input, plain.input);
  EXPECT_EQ(chain.output, plain.output);
}

TEST(DictChain, OccurrenceOrder) {
  const SortedDictionary d(std::vector<DictEntry>{{"挂耳板", "mounting ear plate"}, {"连接器", "connector"}});
  const ParallelPair p{"1", "连接器和挂耳板和连接器", "connector and plate", "zh", "en", {}};
  const auto matched = matched_entries(p.source, d);
  const auto r = render_dict_chain(p, matched);
  EXPECT_EQ(r.input, p.source);
  EXPECT_EQ(r.output, "connector and plate\nTerms:\n连接器 = connector\n挂耳板 = mounting ear plate");
  EXPECT_EQ(strip_chain_suffix(r.output), p.target);
  EXPECT_EQ(strip_chain_suffix("no suffix here"), "no suffix here");
  EXPECT_EQ(strip_chain_suffix("x\nTerms:\nnot a term line"), "x\nTerms:\nnot a term line");
}

TEST(LengthLaws, ChainRephrasingAndNone) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> alpha = {"数", "据", "盘", "使", "用", "量"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<DictEntry> entries;
    for (int i = 0; i < 4; ++i) {
      entries.push_back({oracle::random_word(rng, alpha, 1, 3), oracle::random_word(rng, {"d", "i", "s", "k"}, 1, 8)});
    }
    const SortedDictionary d(entries);
    const ParallelPair p{"x", oracle::random_word(rng, alpha, 1, 20), "target text", "zh", "en", {}};

    const auto plain = build_record(p.source, p.target, {}, PromptConfig{}, p.id);
    const auto chain = render_dict_chain(p, matched_entries(p.source, d));
    EXPECT_GE(record_length(chain), record_length(plain));

    const auto rr = dict_rephrase(p.source, d);
    std::size_t expected = text::codepoint_length(p.source);
    for (const auto& rep : rr.replacements) {
      expected = expected - text::codepoint_length(rep.source_term) + text::codepoint_length(rep.target_term);
    }
    PromptConfig cfg;
    cfg.mode = DictMode::kRephrasing;
    const auto reph = build_record(rr.rephrased, p.target, {}, cfg, p.id);
    EXPECT_EQ(text::codepoint_length(reph.input), expected);
  }
}

TEST(RecordJson, KeyOrderAndRoundTrip) {
  InstructionRecord r;
  r.instruction = "Translating the following content into English";
  r.input = "zh: 一\nen: one\n\n二";
  r.output = "two";
  r.meta = {"7", DictMode::kChain, "IT", {"a", "b"}, std::string("二")};
  const auto line = record_to_json(r);
  EXPECT_EQ(line.find("{\"instruction\":"), 0u);
  EXPECT_LT(line.find("\"input\""), line.find("\"output\""));
  EXPECT_LT(line.find("\"output\""), line.find("\"meta\""));
  EXPECT_EQ(record_from_json(line), r);
  EXPECT_EQ(line.find('\n'), std::string::npos);
}

TEST(Rendering, Pure) {
  const std::vector<ParallelPair> ex = {{"a", "一", "one", "zh", "en", {}}};
  EXPECT_EQ(record_to_json(build_record("二", "two", ex, {}, "1", "IT")),
            record_to_json(build_record("二", "two", ex, {}, "1", "IT")));
}

}  // namespace
}  // namespace dragforge
