// Copyright 2026 The protoscore Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "protoscore/corpus.hpp"
#include "support/fuzz.hpp"

namespace protoscore {
namespace {

namespace fs = std::filesystem;

class RunEvalTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("protoscore_corpus_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
  }

  std::string read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  int eval(const std::string& pred, const std::string& gold, unsigned jobs = 1) {
    out_path_ = (dir_ / "rows.ndjson").string();
    table_.str("");
    err_.str("");
    return run_eval(pred, gold, out_path_, ScoreConfig{}, jobs, table_, err_);
  }

  fs::path dir_;
  std::string out_path_;
  std::ostringstream table_, err_;
};

TEST_F(RunEvalTest, PerfectAndGarbage) {
  std::mt19937_64 rng(139);
  const auto a = fuzz::random_steps(rng), b = fuzz::random_steps(rng);
  const std::string gold = write("gold.ndjson", dump_line(gold_to_json(fuzz::to_gold("a", a))) + "\n" +
                                                    dump_line(gold_to_json(fuzz::to_gold("b", b))) + "\n");
  const std::string pred = write("pred.ndjson", dump_line(json{{"id", "a"}, {"output", fuzz::render_output(a)}}) +
                                                    "\n" + dump_line(json{{"id", "b"}, {"output", "garbage"}}) + "\n");
  ASSERT_EQ(eval(pred, gold), kExitOk) << err_.str();
  const json summary = json::parse(read(summary_path(out_path_)));
  for (const char* m : {"Semantic-A", "Order-LCS", "Order-S", "Order-Tau", "Step-M"}) {
    EXPECT_EQ(summary["metrics"][m], 50.0) << m;
  }
  EXPECT_EQ(summary["parse_failures"], 1);
  std::istringstream rows(read(out_path_));
  std::string line;
  std::getline(rows, line);
  EXPECT_EQ(json::parse(line)["score"], 1.0);
  std::getline(rows, line);
  EXPECT_EQ(json::parse(line)["score"], 0.0);
  EXPECT_NE(table_.str().find("50.00"), std::string::npos);
}

TEST_F(RunEvalTest, MissingGoldId) {
  const std::string gold = write("gold.ndjson", R"({"id":"a","steps":[{"action":"mix","objects":[],"parameters":[]}]})"
                                                "\n");
  const std::string pred = write("pred.ndjson", R"({"id":"zzz","output":"x"})" "\n");
  EXPECT_EQ(eval(pred, gold), kExitIdMismatch);
  EXPECT_NE(err_.str().find("zzz"), std::string::npos);
}

TEST_F(RunEvalTest, EmptyPredictionFile) {
  const std::string gold = write("gold.ndjson", R"({"id":"a","steps":[{"action":"mix","objects":[],"parameters":[]}]})"
                                                "\n");
  const std::string pred = write("pred.ndjson", "\n");
  EXPECT_EQ(eval(pred, gold), kExitSchema);
  EXPECT_NE(err_.str().find("empty corpus"), std::string::npos);
}

TEST_F(RunEvalTest, UnreadableFileNamesPath) {
  const std::string gold = write("gold.ndjson", R"({"id":"a","steps":[{"action":"mix","objects":[],"parameters":[]}]})"
                                                "\n");
  const std::string missing = (dir_ / "nope.ndjson").string();
  EXPECT_EQ(eval(missing, gold), kExitIo);
  EXPECT_NE(err_.str().find(missing), std::string::npos);
}

TEST_F(RunEvalTest, DuplicateIdIsSchemaError) {
  const std::string gold = write("gold.ndjson", R"({"id":"a","steps":[{"action":"mix","objects":[],"parameters":[]}]})"
                                                "\n");
  const std::string pred = write("pred.ndjson", R"({"id":"a","output":"x"})" "\n" R"({"id":"a","output":"y"})" "\n");
  EXPECT_EQ(eval(pred, gold), kExitSchema);
  EXPECT_NE(err_.str().find("duplicate"), std::string::npos);
}

TEST_F(RunEvalTest, SchemaErrors) {
  const std::string gold = write("gold.ndjson", R"({"id":"a","steps":[{"action":"mix","objects":[]}]})" "\n");
  const std::string pred = write("pred.ndjson", R"({"id":"a","output":"x"})" "\n");
  EXPECT_EQ(eval(pred, gold), kExitSchema);
  EXPECT_NE(err_.str().find("steps[0].parameters"), std::string::npos);
  const std::string good_gold =
      write("gold2.ndjson", R"({"id":"a","steps":[{"action":"mix","objects":[],"parameters":[]}]})" "\n");
  EXPECT_EQ(eval(write("p2.ndjson", "{oops\n"), good_gold), kExitSchema);
  EXPECT_EQ(eval(write("p3.ndjson", R"({"id":"a"})" "\n"), good_gold), kExitSchema);
}

TEST_F(RunEvalTest, RepeatedRunsAreByteIdentical) {
  std::mt19937_64 rng(149);
  std::string gold, pred;
  for (int i = 0; i < 60; ++i) {
    const std::string id = "p" + std::to_string(i);
    gold += dump_line(gold_to_json(fuzz::to_gold(id, fuzz::random_steps(rng)))) + "\n";
    pred += dump_line(json{{"id", id}, {"output", fuzz::render_output(fuzz::random_steps(rng))}}) + "\n";
  }
  const std::string gp = write("gold.ndjson", gold), pp = write("pred.ndjson", pred);
  ASSERT_EQ(eval(pp, gp, 1), kExitOk);
  const std::string rows1 = read(out_path_), sum1 = read(summary_path(out_path_));
  ASSERT_EQ(eval(pp, gp, 4), kExitOk);
  EXPECT_EQ(read(out_path_), rows1);
  EXPECT_EQ(read(summary_path(out_path_)), sum1);
}

}  // namespace
}  // namespace protoscore
