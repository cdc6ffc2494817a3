#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef SPBOUNDS_CLI_PATH
#error "SPBOUNDS_CLI_PATH must name the spbounds executable"
#endif

namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("spbounds_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the CLI with stdout/stderr captured into files; returns the exit code.
  int run(const std::string& args) {
    const std::string cmd = std::string("\"") + SPBOUNDS_CLI_PATH + "\" " + args + " > \"" +
                            (dir_ / "stdout.txt").string() + "\" 2> \"" + (dir_ / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string out() const { return slurp(dir_ / "stdout.txt"); }
  std::string err() const { return slurp(dir_ / "stderr.txt"); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  std::string path(const std::string& name) const { return "\"" + (dir_ / name).string() + "\""; }

  fs::path dir_;
};

TEST_F(CliTest, GenerateThenBound) {
  ASSERT_EQ(run("generate --family toy --params '{\"b1\":0.6,\"b2\":0.8}' --out " + path("toy")), 0) << err();
  EXPECT_TRUE(fs::exists(dir_ / "toy" / "A.mtx"));
  EXPECT_TRUE(fs::exists(dir_ / "toy" / "spec.json"));
  ASSERT_EQ(run("bound --A " + path("toy/A.mtx") + " --B " + path("toy/B.mtx") + " --auto-gamma"), 0) << err();
  EXPECT_NE(out().find("\"lowest-rank\""), std::string::npos);
  EXPECT_NE(out().find("\"sound\""), std::string::npos);
  EXPECT_EQ(out().find("\"violated\""), std::string::npos);
}

TEST_F(CliTest, BoundCsv) {
  ASSERT_EQ(run("generate --family remark --params '{\"alpha\":0.5}' --out " + path("r")), 0) << err();
  ASSERT_EQ(run("bound --A " + path("r/A.mtx") + " --B " + path("r/B.mtx") + " --csv"), 0) << err();
  EXPECT_EQ(out().rfind("name,value,", 0), 0u);
  EXPECT_NE(out().find("zero-angle"), std::string::npos);
}

TEST_F(CliTest, KInput) {
  // The 5x5 remark matrix with alpha = 0.5, stored column by column.
  std::ofstream k(dir_ / "K.mtx");
  k << "%%MatrixMarket matrix array real general\n5 5\n";
  const double cols[5][5] = {{1, 0, 0, 0, 1}, {0, 0.5, 0, 0, 0}, {0, 0, 0, 1, 0}, {0, 0, 1, 0, 0}, {1, 0, 0, 0, 0}};
  for (const auto& c : cols) {
    for (double v : c) k << v << "\n";
  }
  k.close();
  ASSERT_EQ(run("bound --K " + path("K.mtx") + " --n 3"), 0) << err();
  EXPECT_NE(out().find("\"general-rank\""), std::string::npos);
  EXPECT_NE(out().find("zero-angle"), std::string::npos);
  EXPECT_EQ(run("bound --K " + path("K.mtx") + " --n 1"), 2);
  EXPECT_NE(err().find("zero-block"), std::string::npos) << err();
}

TEST_F(CliTest, SweepWritesFiles) {
  ASSERT_EQ(run("generate --family ipm --params '{\"n\":10,\"m\":4,\"delta\":0.01}' --seed 2 --out " + path("p")), 0);
  ASSERT_EQ(run("sweep --A " + path("p/A.mtx") + " --B " + path("p/B.mtx") +
                " --gamma-min 1e-4 --gamma-max 1e4 --points 25 --out " + path("s")),
            0)
      << err();
  const std::string csv = slurp(dir_ / "s" / "sweep.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 26);
}

TEST_F(CliTest, VerifyPassesOnGeneratedProblems) {
  ASSERT_EQ(run("generate --family angles --params '{\"n\":6,\"m\":2,\"aEigs\":[1,2,3,4],\"bSingVals\":[1,2],"
                "\"thetas\":[0.5,1.0]}' --seed 3 --out " + path("a")),
            0)
      << err();
  EXPECT_EQ(run("verify --A " + path("a/A.mtx") + " --B " + path("a/B.mtx")), 0) << out();
  EXPECT_NE(out().find("all invariants hold"), std::string::npos);
}

TEST_F(CliTest, InputErrorsExitWithTwo) {
  EXPECT_EQ(run("bound --A " + path("missing.mtx") + " --B " + path("missing.mtx")), 2);
  EXPECT_EQ(run("generate --family nope --out " + path("x")), 2);
  EXPECT_EQ(run("generate --family toy --params '{\"b1\":0.5,\"b2\":0.5}' --out " + path("x")), 2);
  EXPECT_EQ(run("bound --gamma 1 --auto-gamma --A a --B b"), 2);
  EXPECT_EQ(run(""), 2);
  std::ofstream(dir_ / "B0.mtx") << "%%MatrixMarket matrix coordinate real general\n1 2 0\n";
  std::ofstream(dir_ / "A0.mtx") << "%%MatrixMarket matrix array real general\n2 2\n1\n0\n0\n0\n";
  EXPECT_EQ(run("bound --A " + path("A0.mtx") + " --B " + path("B0.mtx")), 2);
  EXPECT_NE(err().find("rank"), std::string::npos) << err();
}

TEST_F(CliTest, SizeCapExitsWithThree) {
  ASSERT_EQ(run("generate --family random --params '{\"n\":8,\"m\":3}' --seed 1 --out " + path("c")), 0);
  EXPECT_EQ(run("sweep --A " + path("c/A.mtx") + " --B " + path("c/B.mtx") + " --cap 5"), 3);
  EXPECT_EQ(run("verify --A " + path("c/A.mtx") + " --B " + path("c/B.mtx") + " --cap 5"), 3);
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  ASSERT_EQ(run("generate --family random --params '{\"n\":12,\"m\":5}' --seed 9 --out " + path("d")), 0);
  const std::string common = " --A " + path("d/A.mtx") + " --B " + path("d/B.mtx");
  ASSERT_EQ(run("bound" + common + " --auto-gamma"), 0);
  const std::string first = out();
  ASSERT_EQ(run("bound" + common + " --auto-gamma"), 0);
  EXPECT_EQ(out(), first);
  ASSERT_EQ(run("sweep" + common + " --threads 4"), 0);
  const std::string sweepA = out();
  ASSERT_EQ(run("sweep" + common + " --threads 1"), 0);
  EXPECT_EQ(out(), sweepA);
}

}  // namespace
