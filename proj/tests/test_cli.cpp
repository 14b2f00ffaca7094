#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>

#include "helpers.hpp"

using testing_support::TempDir;

namespace {

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(MIXPRIV_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  EXPECT_NE(pipe, nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string nat(int i) { return (testing_support::natural_dir() / fmt::format("nat_{:03d}.png", i)).string(); }

}  // namespace

TEST(Cli, ScoreIdenticalImages) {
  const auto r = run("score --metric dssim " + nat(0) + " " + nat(0));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "0.000000000\n");
}

TEST(Cli, ScoreSampleTakesMinimum) {
  const auto one = run("score --metric phash " + nat(1) + " " + nat(2));
  const auto two = run("score --metric phash " + nat(1) + " " + nat(2) + " " + nat(1));
  EXPECT_EQ(two.status, 0);
  EXPECT_EQ(two.out, "0.000000000\n");
  EXPECT_NE(one.out, two.out);
}

TEST(Cli, ScoreFid) {
  TempDir dir("cli");
  std::ofstream(dir / "a.txt") << "dim=2\n0 0\n";
  std::ofstream(dir / "b.txt") << "dim=2\n3 4\n";
  const auto r = run("score --metric fid --features " + (dir / "a.txt").string() + " " + (dir / "b.txt").string());
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "25.000000000\n");
}

TEST(Cli, RocPerfectSeparation) {
  TempDir dir("cli");
  std::ofstream(dir / "r.csv") << "sample_id,metric,score,recognized\na,dssim,0.9,0\nb,dssim,0.8,0\nc,dssim,0.1,1\n";
  const auto r = run("roc --records " + (dir / "r.csv").string() + " --out " + dir.path().string());
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("auc=1.0"), std::string::npos) << r.out;
  EXPECT_TRUE(std::filesystem::exists(dir / "roc_dssim.csv"));
}

TEST(Cli, ObfuscateTwiceGivesIdenticalTrees) {
  TempDir dir("cli");
  const auto listing = testing_support::write_listing(dir.path(), 8, 2);
  const std::string common = "obfuscate --dataset " + listing.string() +
                             " --scheme noise-mix --lambda 0.75 --sigma 20 --epochs 3 --seed 7 --width 64 --height 64";
  ASSERT_EQ(run(common + " --out " + (dir / "a").string()).status, 0);
  ASSERT_EQ(run(common + " --out " + (dir / "b").string()).status, 0);
  const auto a = testing_support::snapshot(dir / "a");
  EXPECT_EQ(a, testing_support::snapshot(dir / "b"));
  EXPECT_EQ(a.size(), 3u * (4u + 3u));  // 4 images + public, private, rejected per epoch
}

TEST(Cli, ConfigFileWithFlagOverride) {
  TempDir dir("cli");
  const auto listing = testing_support::write_listing(dir.path(), 6, 2);
  std::ofstream(dir / "run.cfg") << "# toy run\ndataset = " << listing.string() << "\nscheme = pixelize-mix\n"
                                 << "square = 4\nwidth = 32\nheight = 32\nseed = 3\nepochs = 2\n";
  const auto r = run("obfuscate --config " + (dir / "run.cfg").string() + " --epochs 1 --out " + (dir / "o").string());
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("s=4"), std::string::npos) << r.out;
  EXPECT_TRUE(std::filesystem::exists(dir / "o/epoch_0"));
  EXPECT_FALSE(std::filesystem::exists(dir / "o/epoch_1"));
}

TEST(Cli, ExitCodes) {
  TempDir dir("cli");
  EXPECT_EQ(run("").status, 1);
  EXPECT_EQ(run("frobnicate").status, 1);
  EXPECT_EQ(run("score --metric nope " + nat(0) + " " + nat(0)).status, 1);
  EXPECT_EQ(run("score --metric dssim /nonexistent.png " + nat(0)).status, 2);
  std::ofstream(dir / "bad.csv") << "sample_id,metric,score,recognized\na,dssim,oops,0\n";
  EXPECT_EQ(run("roc --records " + (dir / "bad.csv").string()).status, 2);
  const auto listing = testing_support::write_listing(dir.path(), 6, 2);
  const std::string base = "obfuscate --dataset " + listing.string() + " --width 32 --height 32 --out " +
                           (dir / "o").string();
  EXPECT_EQ(run(base + " --lambda 1.5").status, 1);
  EXPECT_EQ(run(base + " --gate-metric dssim --gate-min 0.999 --gate-attempts 1").status, 3);
  EXPECT_EQ(run("--help").status, 0);
}

TEST(Cli, AttackAndSurveyGen) {
  TempDir dir("cli");
  const auto listing = testing_support::write_listing(dir.path(), 6, 3);
  ASSERT_EQ(run("obfuscate --dataset " + listing.string() + " --width 48 --height 48 --scheme blur-mix --lambda 0.5" +
                " --kernel 17 --out " + (dir / "o").string())
                .status,
            0);
  const auto r = run("attack --dataset " + listing.string() + " --width 48 --height 48 --epoch-dir " +
                     (dir / "o/epoch_0").string() + " --attack wiener");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_TRUE(std::filesystem::exists(dir / "o/epoch_0/attack_wiener.csv"));
  const auto s = run("survey-gen --dataset " + listing.string() + " --width 48 --height 48 --count 6 --out " +
                     (dir / "sv").string());
  EXPECT_EQ(s.status, 0) << s.out;
  EXPECT_TRUE(std::filesystem::exists(dir / "sv/params.csv"));
}

TEST(Cli, RocReferenceRows) {
  TempDir dir("cli");
  std::ofstream(dir / "r.csv") << "sample_id,metric,score,recognized\na,dssim,0.9,0\nb,dssim,0.1,1\n";
  const auto r = run("roc --reference --records " + (dir / "r.csv").string() + " --out " + dir.path().string());
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("reference dogs/human: auc=0.8 t_acc=0.63 (0.27, 0.77)"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("t_acc=2178"), std::string::npos);
}
