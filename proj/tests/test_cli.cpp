#include "krpd/datasets.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <sstream>
#include <sys/wait.h>

using krpd::testing::read_file;
using krpd::testing::TempDir;
using krpd::testing::write_file;

namespace {

struct Run {
  int code;
  std::string err;
};

Run run(const std::string& args, const TempDir& dir) {
  const std::string err_path = (dir / "stderr.txt").string();
  const std::string cmd = std::string(KRPD_CLI_PATH) + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " + err_path;
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(err_path)};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Cli, GenerateWritesHeaderAndFourHundredRows) {
  TempDir dir("cli_gen");
  ASSERT_EQ(run("generate --kind moons --seed 3 --out " + (dir / "m.csv").string(), dir).code, 0);
  const auto l = lines(read_file(dir / "m.csv"));
  EXPECT_EQ(l.size(), 401u);
  EXPECT_EQ(l[0], "f0,f1,label");
  EXPECT_EQ(run("generate --kind spiral --out " + (dir / "s.csv").string(), dir).code, 1);
  EXPECT_EQ(run("generate --out " + (dir / "s.csv").string(), dir).code, 1);
  EXPECT_EQ(run("frobnicate", dir).code, 1);
  EXPECT_EQ(run("--help", dir).code, 0);
}

TEST(Cli, FitScoreWritesScoresAndLabels) {
  TempDir dir("cli_fit");
  ASSERT_EQ(run("generate --kind unimodal --seed 1 --out " + (dir / "u.csv").string(), dir).code, 0);
  const auto r = run("fit-score --detector krpd --gamma 0.25 -M 20 -L 200 --train " + (dir / "u.csv").string() +
                         " --query " + (dir / "u.csv").string() + " --out " + (dir / "s.csv").string() +
                         " --save-model " + (dir / "m.json").string(),
                     dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(read_file(dir / "s.csv"));
  ASSERT_EQ(l.size(), 401u);
  EXPECT_EQ(l[0], "score,label");

  ASSERT_EQ(run("fit-score --model " + (dir / "m.json").string() + " --query " + (dir / "u.csv").string() + " --out " +
                    (dir / "s2.csv").string(),
                dir)
                .code,
            0);
  EXPECT_EQ(read_file(dir / "s2.csv"), read_file(dir / "s.csv"));

  EXPECT_EQ(run("fit-score --query " + (dir / "u.csv").string() + " --out " + (dir / "x.csv").string(), dir).code, 1);
  EXPECT_EQ(run("fit-score --detector nope --train " + (dir / "u.csv").string() + " --query " + (dir / "u.csv").string() +
                    " --out " + (dir / "x.csv").string(),
                dir)
                .code,
            1);
}

TEST(Cli, ErrorExitCodes) {
  TempDir dir("cli_err");
  write_file(dir / "flat.csv", "f0,f1\n1,1\n1,1\n1,1\n1,1\n");
  write_file(dir / "three.csv", "f0,f1,f2\n1,2,3\n");
  write_file(dir / "two.csv", "f0,f1\n0,0\n1,0\n0,1\n2,2\n");
  const auto degenerate = run("fit-score --detector rpd --train " + (dir / "flat.csv").string() + " --query " +
                                  (dir / "flat.csv").string() + " --out " + (dir / "o.csv").string(),
                              dir);
  EXPECT_EQ(degenerate.code, 3);
  EXPECT_NE(degenerate.err.find("degenerate"), std::string::npos);

  const auto wrong_dim = run("fit-score --detector rpd --train " + (dir / "two.csv").string() + " --query " +
                                 (dir / "three.csv").string() + " --out " + (dir / "o.csv").string(),
                             dir);
  EXPECT_EQ(wrong_dim.code, 2);
  EXPECT_NE(wrong_dim.err.find("expected d=2"), std::string::npos);

  EXPECT_EQ(run("fit-score --detector rpd --train " + (dir / "missing.csv").string() + " --query " +
                    (dir / "two.csv").string() + " --out " + (dir / "o.csv").string(),
                dir)
                .code,
            2);
}

TEST(Cli, GridWritesEveryPointAndAThreshold) {
  TempDir dir("cli_grid");
  ASSERT_EQ(run("generate --kind cross --seed 2 --out " + (dir / "c.csv").string(), dir).code, 0);
  const auto r = run("grid --detector rpd -L 100 --train " + (dir / "c.csv").string() +
                         " --resolution 100 --bounds=-6,6,-6,6 --out " + (dir / "g.csv").string(),
                     dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(read_file(dir / "g.csv"));
  ASSERT_EQ(l.size(), 10002u);
  EXPECT_EQ(l.front(), "x,y,score");
  EXPECT_EQ(l.back().rfind("# threshold,", 0), 0u);
  EXPECT_EQ(l[1], "-6,-6," + l[1].substr(6));
  EXPECT_EQ(run("grid --train " + (dir / "c.csv").string() + " --bounds=6,-6,-6,6 --out " + (dir / "g2.csv").string(),
                dir)
                .code,
            1);
}

TEST(Cli, BenchmarkTableAndReport) {
  TempDir dir("cli_bench");
  std::filesystem::create_directories(dir / "data");
  std::filesystem::create_directories(dir / "empty");
  for (const char* kind : {"unimodal", "moons"}) {
    ASSERT_EQ(run(std::string("generate --kind ") + kind + " --seed 1 --out " + (dir / "data" / (std::string(kind) + ".csv")).string(),
                  dir)
                  .code,
              0);
  }
  const std::string common = " --trials 1 --budget 1 -L 50 --no-timing --detectors rpd,krpd,krpd-rff,kpca,knn";
  const auto r = run("benchmark --datasets " + (dir / "data").string() + " --out " + (dir / "t.csv").string() +
                         " --report " + (dir / "r.txt").string() + common,
                     dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(read_file(dir / "t.csv"));
  ASSERT_EQ(l.size(), 11u);
  EXPECT_EQ(l[0], "dataset,detector,auc_mean,auc_std,gamma,M,L,seconds");
  EXPECT_EQ(l[1].rfind("moons,rpd,", 0), 0u);
  const std::string report = read_file(dir / "r.txt");
  EXPECT_NE(report.find("w/o KPCA (RFF)"), std::string::npos);
  EXPECT_EQ(report, read_file(dir / "stdout.txt"));

  EXPECT_EQ(run("benchmark --datasets " + (dir / "empty").string() + " --out " + (dir / "t2.csv").string(), dir).code, 2);
  EXPECT_EQ(run("benchmark --datasets " + (dir / "data").string() + " --out " + (dir / "t2.csv").string() +
                    " --detectors svm",
                dir)
                .code,
            1);
}

TEST(Cli, ConfigFileSuppliesFlags) {
  TempDir dir("cli_config");
  write_file(dir / "cfg.toml", "[generate]\nkind = \"multimodal\"\nseed = 5\n");
  ASSERT_EQ(run("--config " + (dir / "cfg.toml").string() + " generate --out " + (dir / "a.csv").string(), dir).code, 0);
  ASSERT_EQ(run("generate --kind multimodal --seed 5 --out " + (dir / "b.csv").string(), dir).code, 0);
  EXPECT_EQ(read_file(dir / "a.csv"), read_file(dir / "b.csv"));
}
