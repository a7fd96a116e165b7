#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#ifndef CVXDIV_CLI_PATH
#error "CVXDIV_CLI_PATH must point at the built CLI"
#endif

namespace {

namespace fs = std::filesystem;

struct Result {
  int exit_code;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(CVXDIV_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = ::pclose(pipe);
  return {WEXITSTATUS(status), out};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / "cvxdiv_cli_test";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write("x.csv", "1\n3\n");
    write("y.csv", "# second sample\n2\n4\n");
    write("bad.csv", "1\n2\nfoo\n");
    write("z.csv", "0.5\n7\n");
  }
  void write(const std::string& name, const std::string& body) {
    std::ofstream(dir_ / name) << body;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string cache() const { return " --cache-dir " + (dir_ / "cache").string(); }

  fs::path dir_;
};

TEST_F(Cli, Test2WorkedExample) {
  const auto r = run("test2 --h power:2 --x " + path("x.csv") + " --y " + path("y.csv") +
                     " --B 999 --seed 42 --deterministic" + cache());
  ASSERT_EQ(r.exit_code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["statistic"]["value"].get<double>(), 1.0 / 12, 1e-15);
  // The observed value is the smallest point of the exact (2,2) null law.
  EXPECT_EQ(j["p_value"].get<double>(), 1.0);
  EXPECT_EQ(j["null_table"]["B"].get<int>(), 999);
  EXPECT_EQ(j["null_table"]["seed"].get<int>(), 42);
  EXPECT_EQ(j["generator"], "power:2");
  EXPECT_EQ(j["software_version"], CVXDIV_VERSION);
  EXPECT_FALSE(j.contains("timestamp"));
}

TEST_F(Cli, ByteIdenticalAcrossRunsWorkersAndCache) {
  const std::string base = "test2 --h bernstein:power:3:5 --x " + path("x.csv") +
                           " --y " + path("z.csv") + " --B 300 --seed 7 --deterministic";
  const auto a = run(base + " --no-cache --workers 1");
  const auto b = run(base + " --no-cache --workers 4");
  const auto c = run(base + cache());  // miss, then store
  const auto d = run(base + cache());  // hit
  ASSERT_EQ(a.exit_code, 0) << a.out;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
  EXPECT_EQ(a.out, d.out);
}

TEST_F(Cli, TestkAndTau) {
  const auto k = run("testk --h power:2 --input " + path("x.csv") + " --input " +
                     path("y.csv") + " --input " + path("z.csv") +
                     " --weights 0.25,0.25,0.5 --B 99 --deterministic --no-cache");
  ASSERT_EQ(k.exit_code, 0) << k.out;
  const auto jk = nlohmann::json::parse(k.out);
  EXPECT_EQ(jk["kind"], "k_sample");
  EXPECT_EQ(jk["null_table"]["weights"].size(), 3u);

  const auto t = run("tau --x " + path("x.csv") + " --y " + path("y.csv") +
                     " --B 99 --deterministic --no-cache");
  ASSERT_EQ(t.exit_code, 0) << t.out;
  const auto jt = nlohmann::json::parse(t.out);
  EXPECT_NEAR(jt["statistic"]["value"].get<double>(), 0.188632456297256757, 1e-9);
  EXPECT_EQ(jt["generator"], "expsq:1");
}

TEST_F(Cli, ConfigurationErrorsExitTwo) {
  auto r = run("testk --h power:2 --input " + path("x.csv"));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.out.find("testk requires at least two samples"), std::string::npos);
  r = run("test2 --h cubic:2 --x " + path("x.csv") + " --y " + path("y.csv"));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.out.find("cubic:2"), std::string::npos);
  r = run("test2 --h power:2 --x " + path("x.csv"));
  EXPECT_EQ(r.exit_code, 2);
  r = run("bogus");
  EXPECT_EQ(r.exit_code, 2);
  r = run("power --h power:2 --alternative warp:1 --sizes 5,5 --B 9");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.out.find("warp:1"), std::string::npos);
}

TEST_F(Cli, DataErrorsExitThree) {
  auto r = run("test2 --h power:2 --x " + path("bad.csv") + " --y " + path("y.csv") +
               " --no-cache");
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.out.find("bad.csv:3"), std::string::npos) << r.out;
  r = run("test2 --h power:2 --x " + path("missing.csv") + " --y " + path("y.csv"));
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.out.find("missing.csv"), std::string::npos);
}

TEST_F(Cli, NullTableAndPower) {
  const auto t = run("null-table --h power:2 --sizes 2,2 --B 50 --seed 3 --format csv" +
                     cache() + " --out " + path("t.cvxnull"));
  ASSERT_EQ(t.exit_code, 0) << t.out;
  EXPECT_NE(t.out.find("# sizes=2,2"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("t.cvxnull")));

  const auto p = run("power --h power:2 --alternative shift:0.5 --sizes 10,10 --B 99 "
                     "--B-power 50 --format csv --seed 1");
  ASSERT_EQ(p.exit_code, 0) << p.out;
  EXPECT_EQ(p.out.rfind("alternative,alpha,", 0), 0u);
}

}  // namespace
