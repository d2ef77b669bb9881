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

#include <gtest/gtest.h>

#include <json.hpp>
#include <sstream>

#include "test_util.hpp"

namespace {

using testutil::quote;
using testutil::read_text;
using testutil::run;
using testutil::write_text;

const std::string kCli = DRAGFORGE_CLI;
const std::filesystem::path kData = DRAGFORGE_TEST_DATA;

std::string cli(const std::string& args) { return quote(kCli) + " " + args; }
std::string q(const std::filesystem::path& p) { return quote(p.string()); }

class Cli : public ::testing::Test {
 protected:
  testutil::TempDir dir;
};

TEST_F(Cli, RephraseMountingSentence) {
  write_text(dir / "d.tsv", "挂耳板\tmounting ear plate\n连接器\tconnector\n");
  write_text(dir / "c.tsv", "左挂耳板到主板的左挂耳连接器(J6081)的低速信号线缆\tcable\n");
  const auto r = run(cli("rephrase --dict " + q(dir / "d.tsv") + " --in " + q(dir / "c.tsv") + " --out " +
                         q(dir / "c2.jsonl") + " --stats " + q(dir / "s.jsonl")));
  ASSERT_EQ(r.exit_code, 0);
  const auto out = read_text(dir / "c2.jsonl");
  EXPECT_NE(out.find("左mounting ear plate到主板的左挂耳connector(J6081)的低速信号线缆"), std::string::npos) << out;
  EXPECT_NE(read_text(dir / "s.jsonl").find("\"hits\":1"), std::string::npos);
}

TEST_F(Cli, RetrieveAtMostTwo) {
  ASSERT_EQ(run(cli("build-index --in " + q(kData / "extra20.tsv") + " --out " + q(dir / "i.bin"))).exit_code, 0);
  const auto r = run(cli("retrieve --index " + q(dir / "i.bin") + " --query " +
                         quote("在每个元数据服务器上执行如下命令查询MDS数据盘使用量。") + " --k 0.7 --n 2"));
  ASSERT_EQ(r.exit_code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_LE(j["examples"].size(), 2u);
  EXPECT_EQ(j["examples"].size(), 2u);
  for (const auto& e : j["examples"]) EXPECT_GT(e["score"].get<double>(), 0.7);
}

TEST_F(Cli, MissingRequiredFlagWritesNothing) {
  const auto r = run(cli("rephrase --in " + q(kData / "corpus10.tsv") + " --out " + q(dir / "x.jsonl")));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_TRUE(std::filesystem::is_empty(dir.path()));
  EXPECT_EQ(run(cli("build-dataset --corpus " + q(kData / "corpus10.tsv"))).exit_code, 1);
  EXPECT_EQ(run(cli("rephrase --bogus-flag")).exit_code, 1);
  EXPECT_EQ(run(cli("no-such-command")).exit_code, 1);
}

TEST_F(Cli, ExitCodesByErrorKind) {
  EXPECT_EQ(run(cli("rephrase --dict " + q(dir / "none.tsv") + " --in " + q(kData / "corpus10.tsv") + " --out " +
                    q(dir / "x.jsonl")))
                .exit_code,
            2);
  write_text(dir / "bad.tsv", "only one column\n");
  EXPECT_EQ(run(cli("stats --in " + q(dir / "bad.tsv"))).exit_code, 1);
  EXPECT_EQ(run("DRAGFORGE_EMBED_URL=http://127.0.0.1:1/embed " +
                cli("build-index --provider http --max-retries 0 --in " + q(kData / "extra20.tsv") + " --out " +
                    q(dir / "i.bin")))
                .exit_code,
            3);
  EXPECT_FALSE(std::filesystem::exists(dir / "i.bin"));
  EXPECT_FALSE(std::filesystem::exists(dir / "x.jsonl"));
}

TEST_F(Cli, FailedBuildLeavesExistingOutputUntouched) {
  write_text(dir / "out.jsonl", "previous\n");
  const auto r = run(cli("build-dataset --mode dict_rephrasing --n 0 --corpus " + q(kData / "corpus10.tsv") +
                         " --dict " + q(dir / "missing.tsv") + " --out " + q(dir / "out.jsonl")));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(read_text(dir / "out.jsonl"), "previous\n");
}

TEST_F(Cli, HelpListsDefaults) {
  for (const std::string sub : {"filter", "split", "rephrase", "extract-prompt", "build-index", "retrieve",
                                "build-dataset", "build-testset", "emit-config", "evaluate", "stats"}) {
    const auto r = run(cli(sub + " --help"));
    EXPECT_EQ(r.exit_code, 0) << sub;
    EXPECT_NE(r.out.find("--"), std::string::npos) << sub;
  }
  const auto ds = run(cli("build-dataset --help")).out;
  EXPECT_NE(ds.find("0.7"), std::string::npos) << ds;
  EXPECT_NE(ds.find("--n"), std::string::npos);
  EXPECT_NE(run(cli("filter --help")).out.find("80"), std::string::npos);
  const auto cfg = run(cli("emit-config --help")).out;
  EXPECT_NE(cfg.find("0.0003"), std::string::npos) << cfg;
  EXPECT_NE(cfg.find("16"), std::string::npos);
}

TEST_F(Cli, SplitIsSeededAndComplete) {
  for (const char* d : {"a", "b"}) {
    ASSERT_EQ(run(cli("split --in " + q(kData / "extra20.tsv") + " --train 12 --test 4 --seed 9 --out-dir " +
                      q(dir / d)))
                  .exit_code,
              0);
  }
  for (const char* f : {"train.jsonl", "test.jsonl", "extra.jsonl"}) {
    EXPECT_EQ(read_text(dir / "a" / f), read_text(dir / "b" / f)) << f;
  }
  const auto train = read_text(dir / "a" / "train.jsonl");
  EXPECT_EQ(std::count(train.begin(), train.end(), '\n'), 12);
  EXPECT_EQ(run(cli("split --in " + q(kData / "extra20.tsv") + " --train 12 --test 4 --out-dir " + q(dir / "c")))
                .exit_code,
            1);
}

TEST_F(Cli, FilterAndStats) {
  write_text(dir / "c.jsonl",
             "{\"id\":\"a\",\"src\":\"一\",\"tgt\":\"one\"}\n{\"id\":\"b\",\"src\":\"二\",\"tgt\":\"two\"}\n");
  write_text(dir / "s.jsonl", "{\"id\":\"a\",\"score\":79.9}\n{\"id\":\"b\",\"score\":80.0}\n");
  ASSERT_EQ(run(cli("filter --in " + q(dir / "c.jsonl") + " --scores " + q(dir / "s.jsonl") + " --out " +
                    q(dir / "f.jsonl") + " --rejected " + q(dir / "r.jsonl")))
                .exit_code,
            0);
  EXPECT_EQ(read_text(dir / "f.jsonl").find("\"a\""), std::string::npos);
  EXPECT_NE(read_text(dir / "f.jsonl").find("\"b\""), std::string::npos);
  EXPECT_NE(read_text(dir / "r.jsonl").find("79.9"), std::string::npos);
  const auto stats = run(cli("stats --in " + q(dir / "f.jsonl")));
  ASSERT_EQ(stats.exit_code, 0);
  EXPECT_EQ(nlohmann::json::parse(stats.out)["pair_count"], 1);
}

TEST_F(Cli, EndToEndTrainTestEvaluate) {
  const auto corpus = q(kData / "corpus10.tsv");
  const auto dict = q(kData / "dict5.tsv");
  ASSERT_EQ(run(cli("build-index --in " + q(kData / "extra20.tsv") + " --out " + q(dir / "i.bin"))).exit_code, 0);
  ASSERT_EQ(run(cli("build-dataset --mode dict_chain --dict " + dict + " --corpus " + corpus + " --index " +
                    q(dir / "i.bin") + " --out " + q(dir / "train.jsonl")))
                .exit_code,
            0);
  ASSERT_TRUE(std::filesystem::exists(dir / "train.jsonl.manifest.json"));
  EXPECT_EQ(run(cli("build-testset --mode dict_rephrasing --dict " + dict + " --corpus " + corpus +
                    " --train-manifest " + q(dir / "train.jsonl.manifest.json") + " --out " + q(dir / "bad.jsonl")))
                .exit_code,
            1);
  EXPECT_FALSE(std::filesystem::exists(dir / "bad.jsonl"));
  ASSERT_EQ(run(cli("build-testset --mode dict_chain --dict " + dict + " --corpus " + corpus + " --train-manifest " +
                    q(dir / "train.jsonl.manifest.json") + " --out " + q(dir / "test.jsonl")))
                .exit_code,
            0);

  std::string hyps;
  std::istringstream lines(read_text(dir / "test.jsonl"));
  for (std::string s; std::getline(lines, s);) {
    const auto j = nlohmann::json::parse(s);
    hyps += nlohmann::json{{"id", j["meta"]["id"]}, {"hypothesis", j["output"]}}.dump() + "\n";
  }
  write_text(dir / "hyp.jsonl", hyps);
  const auto r = run(cli("evaluate --hyp " + q(dir / "hyp.jsonl") + " --ref " + q(dir / "test.jsonl") + " --dict " +
                         dict + " --out " + q(dir / "report.json")));
  ASSERT_EQ(r.exit_code, 0);
  const auto report = nlohmann::json::parse(read_text(dir / "report.json"));
  EXPECT_EQ(report["bleu"]["score"], 100.0);
  EXPECT_EQ(report["terminology"]["rate"], 1.0);
}

TEST_F(Cli, EmitConfigOverride) {
  ASSERT_EQ(run(cli("emit-config --out " + q(dir / "c.json") + " --learning-rate 0.0001")).exit_code, 0);
  const auto j = nlohmann::json::parse(read_text(dir / "c.json"));
  EXPECT_EQ(j["learning_rate"], 1e-4);
  EXPECT_EQ(j["lora_rank"], 16);
}

TEST_F(Cli, ExtractPrompt) {
  const auto r = run(cli("extract-prompt --in " + q(kData / "corpus10.tsv") + " --limit 2"));
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out.rfind("You are a seasoned translator specializing in the IT domain", 0), 0u);
  EXPECT_NE(r.out.find("\n2.\n"), std::string::npos);
  EXPECT_EQ(r.out.find("\n3.\n"), std::string::npos);
}

}  // namespace
