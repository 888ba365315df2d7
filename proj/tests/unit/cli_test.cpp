#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("camp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) {
    const std::string cmd = std::string(CAMP_CLI_PATH) + " " + args + " >" + (dir_ / "stdout.txt").string() +
                            " 2>" + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string read(const std::string& file) {
    std::ifstream in(file);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  fs::path dir_;
};

TEST_F(Cli, SynthIsDeterministic) {
  const std::string common = "synth --mode perfect --clusters 3 --users 60 --locations 10 --len 20 --seed 7";
  ASSERT_EQ(run(common + " --out " + path("a.csv")), 0);
  ASSERT_EQ(run(common + " --out " + path("b.csv")), 0);
  EXPECT_EQ(read(path("a.csv")), read(path("b.csv")));
  EXPECT_EQ(read(path("a.truth.json")).size(), read(path("b.truth.json")).size());
  const auto truth = nlohmann::json::parse(read(path("a.truth.json")));
  EXPECT_EQ(truth["users"].size(), 60u);
  EXPECT_EQ(truth["atoms"].size(), 3u);
}

TEST_F(Cli, SynthDpMode) {
  ASSERT_EQ(run("synth --mode dp --alpha 1 --truncation 40 --users 10 --seed 1 --out " + path("dp.csv")), 0);
  const auto truth = nlohmann::json::parse(read(path("dp.truth.json")));
  EXPECT_EQ(truth["atoms"].size(), 40u);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("synth --users 5 --out " + path("x.csv")), 1);
  EXPECT_EQ(run("synth --seed 1 --mode sideways --out " + path("x.csv")), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("synth --seed 1 --no-such-flag 3 --out " + path("x.csv")), 1);
  ASSERT_EQ(run("synth --seed 1 --users 3 --len 4 --out " + path("t.csv")), 0);
  EXPECT_EQ(run("eval --input " + path("t.csv") + " --predictors markov,nextplace --out " + path("m.csv")), 1);
}

TEST_F(Cli, DataErrors) {
  EXPECT_EQ(run("eval --input " + path("missing.csv") + " --out " + path("m.csv")), 2);
  write("bad.csv", "user_id,location,arrival_ts,stay_s\nu,A,ten,\n");
  EXPECT_EQ(run("fit --input " + path("bad.csv") + " --out " + path("m.json")), 2);
  EXPECT_NE(read(path("stderr.txt")).find("line 2"), std::string::npos);
}

TEST_F(Cli, EvalMarkovToy) {
  write("toy.csv",
        "user_id,location,arrival_ts,stay_s\n"
        "u,A,10,\nu,B,20,\nu,A,30,\nu,B,40,\nu,C,50,\nu,A,60,\n");
  ASSERT_EQ(run("eval --input " + path("toy.csv") + " --predictors markov --out " + path("m.csv")), 0);
  // Hits at t = 3, 4, 6 of five predictions.
  const auto csv = read(path("m.csv"));
  EXPECT_NE(csv.find("capr,markov,all,6,0.6,5\n"), std::string::npos) << csv;
  EXPECT_NE(csv.find("capr_time,markov,all,"), std::string::npos);
  const auto summary = nlohmann::json::parse(read(path("m.json")));
  EXPECT_EQ(summary["config"]["predictors"], "markov");
}

TEST_F(Cli, EvalPredictorColumns) {
  ASSERT_EQ(run("synth --seed 3 --users 6 --locations 4 --len 6 --out " + path("t.csv")), 0);
  ASSERT_EQ(run("eval --input " + path("t.csv") +
                " --predictors markov,agg,camp --camp-k 1 --camp-b 2 --camp-m 3 --out " + path("m.csv")),
            0);
  const auto csv = read(path("m.csv"));
  for (const char* p : {",markov,", ",agg,", ",camp,"}) EXPECT_NE(csv.find(std::string("capr") + p), std::string::npos);
}

TEST_F(Cli, ConfigFileAndOverrides) {
  write("run.conf", "# synthetic run\nusers = 4\nlen = 5\nseed = 11\n");
  ASSERT_EQ(run("synth --config " + path("run.conf") + " --out " + path("a.csv")), 0);
  ASSERT_EQ(run("synth --users 4 --len 5 --seed 11 --out " + path("b.csv")), 0);
  EXPECT_EQ(read(path("a.csv")), read(path("b.csv")));
  ASSERT_EQ(run("synth --config " + path("run.conf") + " --seed 12 --out " + path("c.csv")), 0);
  EXPECT_NE(read(path("a.csv")), read(path("c.csv")));
  const auto truth = nlohmann::json::parse(read(path("c.truth.json")));
  EXPECT_EQ(truth["config"]["seed"], "12");
  write("bad.conf", "users 4\n");
  EXPECT_EQ(run("synth --config " + path("bad.conf") + " --out " + path("d.csv")), 1);
}

TEST_F(Cli, OracleCheck) {
  EXPECT_EQ(run("oracle-check --suite lemma1 --instances 3"), 0);
  EXPECT_NE(read(path("stdout.txt")).find("lemma1"), std::string::npos);
  EXPECT_EQ(run("oracle-check --suite gibbs --instances 2 --chains 300 --batches 100 --co-tol 0 --theta-tol 0"), 3);
}

TEST_F(Cli, FitAndSimilarity) {
  ASSERT_EQ(run("synth --seed 5 --users 8 --locations 4 --len 10 --out " + path("t.csv")), 0);
  ASSERT_EQ(run("fit --input " + path("t.csv") + " --camp-k 2 --camp-b 2 --camp-m 4 --out " + path("m.json")), 0);
  const auto model = nlohmann::json::parse(read(path("m.json")));
  EXPECT_EQ(model["model"]["users"].size(), 8u);
  EXPECT_EQ(model["config"]["camp-k"], "2");
  ASSERT_EQ(run("similarity --input " + path("t.csv") + " --out " + path("s.csv")), 0);
  EXPECT_EQ(read(path("s.csv")).rfind("u,v,similarity\n", 0), 0u);
}

}  // namespace
