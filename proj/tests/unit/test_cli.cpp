// Copyright 2026 The dirtyml Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "dirtyml/tabular.hpp"
#include "test_util.hpp"

namespace dirtyml {
namespace {

struct RunResult {
  int code = -1;
  std::string output;  // stdout and stderr interleaved
};

RunResult run_cli(const std::string& args, const std::filesystem::path& stdout_file = {}) {
  std::string cmd = std::string(DIRTYML_CLI) + " " + args;
  cmd += stdout_file.empty() ? " 2>&1" : " 2>&1 >" + stdout_file.string();
  RunResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.output.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string small_csv() {
  std::string s = "city,price,label\n";
  const char* cities[] = {"paris", "Paris ", "london", "londres", "berlin", "berlyn"};
  for (int i = 0; i < 60; ++i) {
    s += std::string(cities[i % 6]) + "," + std::to_string(i * 1.5) + "," + (i % 6 < 2 ? "fr" : "other") + "\n";
  }
  return s;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = testing::scratch_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    input = dir / "in.csv";
    write_text(input, small_csv());
  }
  std::filesystem::path dir;
  std::filesystem::path input;
};

TEST_F(Cli, InferTypes) {
  const auto out = dir / "types.json";
  const auto r = run_cli("infer-types --input " + input.string() + " --target label", out);
  ASSERT_EQ(r.code, 0) << r.output;
  const auto j = nlohmann::json::parse(read_file(out.string()));
  ASSERT_EQ(j.at("columns").size(), 3u);
  EXPECT_EQ(j["columns"][0]["name"], "city");
  EXPECT_EQ(j["columns"][0]["type"], "categorical");
  EXPECT_EQ(j["columns"][1]["type"], "numeric");
  EXPECT_TRUE(j.contains("provenance"));
}

TEST_F(Cli, EncodeWritesMatrixAndEncoder) {
  const auto out = dir / "enc.csv";
  const auto r = run_cli("encode --input " + input.string() + " --column city --encoder similarity --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(std::filesystem::exists(dir / "enc.csv.encoder.json"));
  const auto text = read_file(out.string());
  EXPECT_NE(text.find("# "), std::string::npos);
}

TEST_F(Cli, EncodeNumericColumnIsDataError) {
  const auto r = run_cli("encode --input " + input.string() + " --column price --encoder gap --out " +
                         (dir / "x.csv").string());
  EXPECT_EQ(r.code, 2) << r.output;
  EXPECT_NE(r.output.find("price"), std::string::npos) << r.output;
}

TEST_F(Cli, SearchIsReproducible) {
  std::string first;
  for (int run = 0; run < 2; ++run) {
    const auto out = dir / ("run" + std::to_string(run));
    const auto r = run_cli("search --input " + input.string() + " --target label --budget-candidates 4 --seed 3 --out " +
                           out.string());
    ASSERT_EQ(r.code, 0) << r.output;
    for (const char* f : {"leaderboard.csv", "leaderboard.json", "family_summary.csv", "run_config.json"}) {
      EXPECT_TRUE(std::filesystem::exists(out / f)) << f;
    }
    const auto csv = read_file((out / "leaderboard.csv").string());
    if (run == 0) {
      first = csv;
    } else {
      EXPECT_EQ(csv, first);
    }
  }
}

TEST_F(Cli, GenSyntheticIsReproducible) {
  const auto a = dir / "a.csv", b = dir / "b.csv";
  for (const auto& p : {a, b}) {
    const auto r = run_cli("gen-synthetic --rows 200 --levels 40 --typo-rate 0.1 --seed 5 --out " + p.string());
    ASSERT_EQ(r.code, 0) << r.output;
  }
  EXPECT_EQ(read_file(a.string()), read_file(b.string()));
  EXPECT_EQ(load_csv(a.string()).n_rows(), 200u);
  EXPECT_TRUE(std::filesystem::exists(dir / "a.csv.provenance.json"));
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run_cli("").code, 1);
  EXPECT_EQ(run_cli("no-such-command").code, 1);
  EXPECT_EQ(run_cli("search --input " + input.string()).code, 1);
  EXPECT_EQ(run_cli("encode --input " + input.string() + " --column city --encoder bogus --out x.csv").code, 1);
  EXPECT_EQ(run_cli("search --input " + input.string() + " --target label --kfold 3 --holdout 0.2 --out o").code, 1);
  EXPECT_EQ(run_cli("infer-types --input " + (dir / "missing.csv").string()).code, 1);
  EXPECT_EQ(run_cli("infer-types --input " + input.string() + " --numeric-threshold 2").code, 1);
}

TEST_F(Cli, SingleClassTargetFails) {
  write_text(dir / "one.csv", "c,y\na,k\nb,k\nc,k\nd,k\n");
  const auto r = run_cli("search --input " + (dir / "one.csv").string() + " --target y --budget-candidates 2 --out " +
                         (dir / "o").string());
  EXPECT_TRUE(r.code == 2 || r.code == 3) << r.code << " " << r.output;
}

}  // namespace
}  // namespace dirtyml
