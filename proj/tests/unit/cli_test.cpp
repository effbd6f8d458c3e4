#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"
#include "exactbn/dataset.hpp"
#include "exactbn/network_io.hpp"
#include "exactbn/optimizer.hpp"
#include "oracle.hpp"

namespace exactbn {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("exactbn_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    oracle::Rng rng(77);
    data_ = oracle::synthetic_dataset(rng, 6, 200, {2, 3}, 2);
    std::ofstream(path("data.txt")) << [&] {
      std::ostringstream s;
      write_dataset(s, data_);
      return s.str();
    }();
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
  Dataset data_{{2}, {0}};
};

TEST_F(Cli, LearnPrintsTheLibraryDocument) {
  const Result r = run({"learn", path("data.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  const LearnResult want = learn(data_, {});
  NetworkDoc doc{want.network, want.ordering, {}, Precision::kSingle, want.total_score, default_names(6)};
  EXPECT_EQ(r.out, to_json(doc));
}

TEST_F(Cli, CachedAndShardedRunsGiveTheSameNetwork) {
  ASSERT_EQ(run({"scores", path("data.txt"), "--out", path("all.bnls")}).code, 0);
  for (int i = 0; i < 3; ++i) {
    const Result r = run({"scores", path("data.txt"), "--shard", std::to_string(i) + "/3", "--out",
                          path("part" + std::to_string(i) + ".bnlp")});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  const Result m = run({"merge", path("part0.bnlp"), path("part1.bnlp"), path("part2.bnlp"), "--out", path("m.bnls")});
  ASSERT_EQ(m.code, 0) << m.err;
  EXPECT_EQ(slurp(path("m.bnls")), slurp(path("all.bnls")));

  const Result direct = run({"learn", path("data.txt")});
  const Result cached = run({"learn", "--cache", path("m.bnls"), "--dot", path("g.dot")});
  ASSERT_EQ(cached.code, 0) << cached.err;
  EXPECT_EQ(cached.out, direct.out);
  EXPECT_EQ(slurp(path("g.dot")).rfind("digraph bn {", 0), 0U);

  const Result partial = run({"merge", path("part0.bnlp"), path("part1.bnlp"), "--out", path("x.bnls")});
  EXPECT_EQ(partial.code, cli::kCacheMismatch);
}

TEST_F(Cli, CacheDirectoryFromEnvironment) {
  ::setenv("EXACTBN_CACHE_DIR", dir_.c_str(), 1);
  const Result r = run({"scores", path("data.txt")});
  ::unsetenv("EXACTBN_CACHE_DIR");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "data.bnls"));
  EXPECT_EQ(run({"scores", path("data.txt")}).code, cli::kBadFlags);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, cli::kBadFlags);
  EXPECT_EQ(run({"learn", path("data.txt"), "--bogus"}).code, cli::kBadFlags);
  EXPECT_EQ(run({"learn", path("data.txt"), "--score", "bic", "--ess", "2"}).code, cli::kBadFlags);
  EXPECT_EQ(run({"learn", path("data.txt"), "--score", "nope"}).code, cli::kBadFlags);
  EXPECT_EQ(run({"learn", path("data.txt"), "--precision", "3"}).code, cli::kBadFlags);
  EXPECT_EQ(run({"scores", path("data.txt"), "--shard", "3/3", "--out", path("s")}).code, cli::kBadFlags);
  EXPECT_EQ(run({"learn", path("missing.txt")}).code, cli::kDataError);

  std::ofstream(path("ragged.txt")) << "0 1\n1\n";
  EXPECT_EQ(run({"learn", path("ragged.txt")}).code, cli::kDataError);

  std::ofstream wide(path("wide.txt"));
  for (int i = 0; i < 33; ++i) wide << "0 ";
  wide << "\n";
  wide.close();
  const Result limit = run({"learn", path("wide.txt")});
  EXPECT_EQ(limit.code, cli::kTooManyVariables);
  EXPECT_FALSE(limit.err.empty());

  ASSERT_EQ(run({"scores", path("data.txt"), "--out", path("c.bnls")}).code, 0);
  std::ofstream(path("other.txt")) << "0 1 4 0 1 1\n1 0 0 1 0 0\n";
  EXPECT_EQ(run({"learn", path("other.txt"), "--cache", path("c.bnls")}).code, cli::kCacheMismatch);
  std::ofstream(path("junk.bnls")) << "junk";
  EXPECT_EQ(run({"learn", "--cache", path("junk.bnls")}).code, cli::kCacheMismatch);

  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, OrderingCommands) {
  const Result best = run({"best-order", path("data.txt")});
  ASSERT_EQ(best.code, 0) << best.err;
  EXPECT_EQ(best.out.rfind("ordering: ", 0), 0U);

  const Result net = run({"net-for-order", path("data.txt"), "--order", "5,4,3,2,1,0"});
  ASSERT_EQ(net.code, 0) << net.err;
  const NetworkDoc doc = parse_network_doc(net.out);
  EXPECT_TRUE(doc.network.consistent_with(std::vector<int>{5, 4, 3, 2, 1, 0}));
  EXPECT_EQ(run({"net-for-order", path("data.txt"), "--order", "0,1,2"}).code, cli::kBadFlags);

  const Result rot = run({"rotations", path("data.txt"), "--order", "0,1,2,3,4,5"});
  ASSERT_EQ(rot.code, 0) << rot.err;
  EXPECT_EQ(rot.out.rfind("k,score\n-3,", 0), 0U);
  EXPECT_EQ(count_lines(rot.out), 8U);

  const Result sw = run({"swaps", path("data.txt")});
  ASSERT_EQ(sw.code, 0) << sw.err;
  EXPECT_EQ(sw.out.rfind("i,j,score\n0,1,", 0), 0U);
  EXPECT_EQ(count_lines(sw.out), 16U);
}

TEST_F(Cli, SweepSampleAndPredict) {
  const Result sweep = run({"sweep-ess", path("data.txt"), "--grid", "log:0.01:100:3"});
  ASSERT_EQ(sweep.code, 0) << sweep.err;
  EXPECT_EQ(sweep.out.rfind("ess,arcs,score\n0.01,", 0), 0U);
  EXPECT_EQ(count_lines(sweep.out), 4U);
  EXPECT_EQ(run({"sweep-ess", path("data.txt"), "--grid", "1,-2"}).code, cli::kBadFlags);

  ASSERT_EQ(run({"learn", path("data.txt"), "--out", path("net.json")}).code, 0);
  const Result s1 = run({"sample", "--network", path("net.json"), "--train", path("data.txt"), "--count", "50",
                         "--seed", "5", "--out", path("sample.txt")});
  ASSERT_EQ(s1.code, 0) << s1.err;
  const std::string text = slurp(path("sample.txt"));
  EXPECT_EQ(text.rfind("# rng: splitmix64 seed=5\n", 0), 0U);
  const Result s2 = run({"sample", "--network", path("net.json"), "--train", path("data.txt"), "--count", "50",
                         "--seed", "5"});
  EXPECT_EQ(s2.out, text);

  const Result p = run({"predict", "--network", path("net.json"), "--train", path("data.txt"), "--test",
                        path("sample.txt")});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(p.out.rfind("row,logp\n0,", 0), 0U);
  EXPECT_EQ(count_lines(p.out), 52U);
  EXPECT_NE(p.out.find("# mean_logp="), std::string::npos);
}

TEST_F(Cli, Report) {
  const Result r = run({"report", path("data.txt"), "--score", "bic"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("n: 6\n"), std::string::npos);
  EXPECT_NE(r.out.find("N: 200\n"), std::string::npos);
  EXPECT_NE(r.out.find("score_spec: bic\n"), std::string::npos);
  EXPECT_NE(r.out.find("max_in_degree: "), std::string::npos);
  EXPECT_NE(r.out.find("arcs: "), std::string::npos);

  ASSERT_EQ(run({"learn", path("data.txt"), "--out", path("net.json")}).code, 0);
  const Result given = run({"report", path("data.txt"), "--network", path("net.json")});
  ASSERT_EQ(given.code, 0) << given.err;
  const std::string learned = run({"report", path("data.txt")}).out;
  const auto field = [](const std::string& s, const std::string& key) {
    const auto at = s.find(key);
    return s.substr(at, s.find('\n', at) - at);
  };
  const double a = std::stod(field(given.out, "total_score").substr(13));
  const double b = std::stod(field(learned, "total_score").substr(13));
  EXPECT_NEAR(a, b, 1e-6 * std::abs(b));
  EXPECT_EQ(field(given.out, "arcs"), field(learned, "arcs"));
}

}  // namespace
}  // namespace exactbn
