// Copyright 2026 The VRL Authors. All Rights Reserved.
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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>

#include "test_util.hpp"
#include "vrl/vrl.hpp"

namespace vrl {
namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  CliResult vrl(const std::string& args) const {
    const std::string out = dir.file("stdout.txt"), err = dir.file("stderr.txt");
    const std::string cmd = std::string(VRL_CLI_PATH) + " " + args + " >" + out + " 2>" + err;
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(out);
    r.err = read_file(err);
    return r;
  }

  std::string f(const std::string& name) const { return dir.file(name); }

  // Small graph, scene sets and a one-epoch run config.
  void setup_pipeline() {
    ASSERT_EQ(vrl("gen-counts --out " + f("c.tsv") + " --categories 12 --attributes 6 --predicates 5 --seed 3").code, 0);
    ASSERT_EQ(vrl("build-graph --counts " + f("c.tsv") + " --min-count 30 --out " + f("g.json")).code, 0);
    ASSERT_EQ(vrl("gen-scenes --graph " + f("g.json") + " --out " + f("train.jsonl") + " --count 12 --seed 1").code, 0);
    ASSERT_EQ(vrl("gen-scenes --graph " + f("g.json") + " --out " + f("test.jsonl") + " --count 6 --seed 99").code, 0);
    const nlohmann::json cfg = {
        {"seed", 5},
        {"graph", "g.json"},
        {"train_scenes", "train.jsonl"},
        {"out", "run"},
        {"features", {{"d_image", 8}, {"d_instance", 8}, {"d_phrase", 4}}},
        {"train", {{"epochs", 2}, {"hidden", {16}}, {"batch", 8}, {"max_steps", 40}}}};
    write_file_atomic(f("run.cfg"), cfg.dump());
  }

  testing::TempDir dir;
};

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(vrl("").code, 2);
  EXPECT_EQ(vrl("frobnicate").code, 2);
  EXPECT_EQ(vrl("build-graph --counts x.tsv").code, 2);
  EXPECT_EQ(vrl("build-graph --counts x.tsv --out y --bogus").code, 2);
}

TEST_F(CliTest, HelpDocumentsEveryFlag) {
  const CliResult r = vrl("build-graph --help");
  EXPECT_EQ(r.code, 0);
  for (const char* flag : {"--counts", "--min-count", "--out"}) EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
  for (const char* cmd : {"gen-scenes", "train", "evaluate", "ablate", "inspect"}) {
    const CliResult h = vrl(std::string(cmd) + " --help");
    EXPECT_EQ(h.code, 0) << cmd;
    EXPECT_NE(h.out.find("--"), std::string::npos) << cmd;
  }
}

TEST_F(CliTest, MissingOrCorruptFilesExitOne) {
  CliResult r = vrl("build-graph --counts " + f("missing.tsv") + " --out " + f("g.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("missing.tsv"), std::string::npos);
  write_file_atomic(f("bad.tsv"), "A\tman\n");
  r = vrl("build-graph --counts " + f("bad.tsv") + " --out " + f("g.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bad.tsv"), std::string::npos);
}

TEST_F(CliTest, BuildGraphThresholdBoundary) {
  write_file_atomic(f("c.tsv"), "P\tman\triding\thorse\t30\nP\tman\ton\thorse\t29\nA\tgirl\tyoung\t30\n");
  const CliResult r = vrl("build-graph --counts " + f("c.tsv") + " --min-count 30 --out " + f("g.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto stats = nlohmann::json::parse(r.out);
  EXPECT_EQ(stats["predicates"], 1);
  EXPECT_EQ(stats["categories"], 3);
  const SemanticGraph g = load_graph(f("g.json"));
  EXPECT_TRUE(g.has_predicate_edge(g.category("man"), g.predicate("riding"), g.category("horse")));
  EXPECT_THROW(g.predicate("on"), LookupError);
}

TEST_F(CliTest, TrainEvaluateIsDeterministicAndVerifiesManifest) {
  setup_pipeline();
  CliResult r = vrl("train --config " + f("run.cfg"));
  ASSERT_EQ(r.code, 0) << r.err;
  r = vrl("evaluate --run " + f("run") + " --scenes " + f("test.jsonl") + " --csv " + f("m1.csv") + " --out " +
          f("r1.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string timeline1 = read_file(f("run/timeline.csv"));

  ASSERT_EQ(vrl("train --config " + f("run.cfg")).code, 0);
  ASSERT_EQ(vrl("evaluate --run " + f("run") + " --scenes " + f("test.jsonl") + " --csv " + f("m2.csv") + " --jobs 3")
                .code,
            0);
  EXPECT_EQ(read_file(f("m1.csv")), read_file(f("m2.csv")));
  EXPECT_EQ(read_file(f("run/timeline.csv")), timeline1);
  const auto report = nlohmann::json::parse(read_file(f("r1.json")));
  EXPECT_TRUE(report.contains("zero_shot"));
  EXPECT_EQ(report["scene_count"], 6);

  // Editing the training scenes invalidates the run.
  write_file_atomic(f("train.jsonl"), read_file(f("test.jsonl")));
  r = vrl("evaluate --run " + f("run") + " --scenes " + f("test.jsonl"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("hash"), std::string::npos);
}

TEST_F(CliTest, AblateWritesOneRowPerVariantAndSeed) {
  setup_pipeline();
  const CliResult r = vrl("ablate --graph " + f("g.json") + " --scenes " + f("test.jsonl") + " --train-scenes " +
                    f("train.jsonl") + " --config " + f("run.cfg") + " --seeds 2 --epochs 1 --out " + f("a.csv") +
                    " --summary " + f("a.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = read_file(f("a.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 4 * 2);
  EXPECT_EQ(csv.rfind("variant,seed,", 0), 0u);
  EXPECT_TRUE(nlohmann::json::parse(read_file(f("a.json")))["median_over_seeds"].contains("flat-rl"));
}

TEST_F(CliTest, InspectDumpsTraceWithActionSets) {
  setup_pipeline();
  ASSERT_EQ(vrl("train --config " + f("run.cfg") + " --epochs 1").code, 0);
  CliResult r = vrl("inspect --graph " + f("g.json") + " --scenes " + f("test.jsonl") + " --index 1 --model " +
              f("run/model.ckpt"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_FALSE(j["trace"]["steps"].empty());
  EXPECT_TRUE(j["trace"]["steps"][0].contains("sets"));
  r = vrl("inspect --graph " + f("g.json") + " --scenes " + f("test.jsonl") + " --index 100");
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, EnvironmentOverridesSeed) {
  setup_pipeline();
  ASSERT_EQ(vrl("gen-scenes --graph " + f("g.json") + " --out " + f("a.jsonl") + " --count 3 --seed 7").code, 0);
  setenv("VRL_SEED", "7", 1);
  const CliResult r = vrl("gen-scenes --graph " + f("g.json") + " --out " + f("b.jsonl") + " --count 3");
  unsetenv("VRL_SEED");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(read_file(f("a.jsonl")), read_file(f("b.jsonl")));
}

}  // namespace
}  // namespace vrl
