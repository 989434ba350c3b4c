#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "treeknap/error.hpp"

namespace treeknap::cli {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("treeknap_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name, const std::string& text) {
    auto path = (dir_ / name).string();
    std::ofstream(path) << text;
    return path;
  }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(Cli, SolveValue) {
  auto f1 = file("f1", "3 3\n0 0\n1 2 1\n2 4 3\n");
  EXPECT_EQ(run({"solve", "--instance", f1, "--constraint", "precedence", "--algo", "hlrecdp"}), 0);
  EXPECT_EQ(out_.str(), "value 6\n");
  EXPECT_EQ(run({"solve", "--instance", f1, "--constraint", "precedence", "--array"}), 0);
  EXPECT_EQ(out_.str(), "value 6\narray\n0 0\n1 2\n2 5\n3 6\n");
}

TEST_F(Cli, SolveWitness) {
  auto f2 = file("f2", "3 2\n0 1\n1 1 1\n2 3 4\n");
  EXPECT_EQ(run({"solve", "--instance", f2, "--constraint", "connectivity", "--algo", "baseline",
                 "--witness"}),
            0);
  EXPECT_EQ(out_.str(), "value 7\nwitness 1 2\n");
  EXPECT_EQ(run({"solve", "--instance", f2, "--constraint", "connectivity", "--algo", "hlrecdp",
                 "--witness"}),
            kInvalid);
  EXPECT_TRUE(out_.str().empty());
  EXPECT_FALSE(err_.str().empty());
}

TEST_F(Cli, SolveInfeasible) {
  auto one = file("one", "1 3\n5\n1\n");
  EXPECT_EQ(run({"solve", "--instance", one, "--constraint", "connectivity"}), kInfeasible);
  EXPECT_EQ(out_.str(), "INFEASIBLE\n");
}

TEST_F(Cli, SolveStatsAndAutomatonFile) {
  auto f2 = file("f2", "3 2\n0 1\n1 1 1\n2 3 4\n");
  auto aut = file("prec", "states s x\ninit s x\nrule s 0 uniform x\nrule s 1 uniform s\nrule x 0 uniform x\n");
  EXPECT_EQ(run({"solve", "--instance", f2, "--automaton", aut, "--stats"}), 0);
  EXPECT_NE(out_.str().find("invocations 3\n"), std::string::npos);
}

TEST_F(Cli, ErrorClasses) {
  auto f1 = file("f1", "3 3\n0 0\n1 2 1\n2 4 3\n");
  auto bad = file("bad", "3 2\n0\n1 1 1\n2 3 4\n");
  auto badaut = file("badaut", "states s\ninit s\nrule s 1 explicit a b\n");
  EXPECT_EQ(run({"solve", "--instance", bad, "--constraint", "precedence"}), kInvalid);
  EXPECT_NE(err_.str().find("line"), std::string::npos);
  EXPECT_EQ(run({"solve", "--instance", f1, "--constraint", "clique"}), kInvalid);
  EXPECT_EQ(run({"solve", "--instance", f1, "--automaton", badaut}), kInvalid);
  EXPECT_EQ(run({"solve", "--instance", (dir_ / "missing").string(), "--constraint", "precedence"}),
            kInvalid);
  EXPECT_EQ(run({"solve", "--instance", f1}), kInvalid);
  EXPECT_EQ(run({"frobnicate"}), kInvalid);
  EXPECT_EQ(run({"complements", "--instance", f1, "--constraint", "connectivity"}), kInvalid);
  EXPECT_EQ(exit_code_for(Error(ErrorCode::kContractViolation, "x")), kContract);
  EXPECT_EQ(exit_code_for(Error(ErrorCode::kParse, "x")), kInvalid);
}

TEST_F(Cli, Compare) {
  EXPECT_EQ(run({"compare", "--exhaustive-n", "4", "--trials", "30", "--seed", "1"}), 0);
  EXPECT_EQ(run({"compare", "--trials", "40", "--seed", "3", "--inject-fault", "--reproducer",
                 (dir_ / "repro").string()}),
            kInfeasible);
  EXPECT_NE(out_.str().find("MISMATCH"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "repro.instance"));
  EXPECT_TRUE(fs::exists(dir_ / "repro.automaton"));
}

TEST_F(Cli, Diversity) {
  EXPECT_EQ(run({"diversity", "--constraint", "independent-set", "--n", "10"}), 0);
  EXPECT_EQ(out_.str(), "2, prefix-closed: yes\n");
  EXPECT_EQ(run({"diversity", "--constraint", "connectivity", "--n", "3"}), 0);
  EXPECT_EQ(out_.str(), "5, prefix-closed: no\n");
}

TEST_F(Cli, PerVertexCommands) {
  auto f1 = file("f1", "3 3\n0 0\n1 2 1\n2 4 3\n");
  auto f2 = file("f2", "3 2\n0 1\n1 1 1\n2 3 4\n");
  EXPECT_EQ(run({"ksubtree", "--instance", f1, "--constraint", "connectivity", "--k", "2"}), 0);
  EXPECT_EQ(out_.str(), "0 6 7\n");
  EXPECT_EQ(run({"ksubtree", "--instance", f2, "--constraint", "connectivity", "--k", "2",
                 "--algo", "oracle"}),
            0);
  EXPECT_EQ(out_.str(), "0 7 INFEASIBLE\n");
  EXPECT_EQ(run({"all-subtrees", "--instance", f2, "--constraint", "precedence"}), 0);
  EXPECT_EQ(out_.str(), "0 5\n1 7\n2 4\n");
  EXPECT_EQ(run({"complements", "--instance", f2, "--constraint", "precedence"}), 0);
  EXPECT_EQ(out_.str(), "0 0\n1 2\n2 5\n");
}

TEST_F(Cli, GenIsDeterministic) {
  auto path = (dir_ / "g").string();
  EXPECT_EQ(run({"gen", "--shape", "path", "--n", "3", "--seed", "1", "--out", path}), 0);
  EXPECT_EQ(run({"solve", "--instance", path, "--constraint", "precedence"}), 0);
  const auto first = out_.str();
  EXPECT_EQ(run({"gen", "--shape", "path", "--n", "3", "--seed", "1"}), 0);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(out_.str(), ss.str());
  EXPECT_EQ(run({"solve", "--instance", path, "--constraint", "precedence"}), 0);
  EXPECT_EQ(out_.str(), first);
}

TEST_F(Cli, BenchCsv) {
  EXPECT_EQ(run({"bench", "--suite", "scaling-n", "--constraint", "precedence", "--reps", "1"}), 0);
  std::istringstream lines(out_.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "algo,constraint,shape,n,C,seed,rep,invocations,convolutions,shift_adds,ns");
  EXPECT_NE(out_.str().find("# slope hlrecdp"), std::string::npos);
  EXPECT_EQ(run({"bench", "--suite", "sideways"}), kInvalid);
}

}  // namespace
}  // namespace treeknap::cli
