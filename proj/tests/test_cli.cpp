#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("discnls_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result run(const std::string& args) {
    const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string("env -u DISCNLS_CACHE_DIR '") + DISCNLS_CLI_PATH + "' " + args + " >'" +
                            out.string() + "' 2>'" + err.string() + "'";
    const int raw = std::system(cmd.c_str());
    Result r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  fs::path dir_;
};

nlohmann::json without_runtime(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  j.erase("runtime");
  return j;
}

}  // namespace

TEST_F(CliTest, VersionAndHelp) {
  const Result v = run("--version");
  EXPECT_EQ(v.status, 0);
  EXPECT_NE(v.out.find(DISCNLS_VERSION), std::string::npos);
  EXPECT_EQ(run("--help").status, 0);
}

TEST_F(CliTest, BasisIsReproducible) {
  const Result a = run("--csv - --json '' basis --modes 6 --order 4");
  const Result b = run("--csv - --json '' basis --modes 6 --order 4");
  ASSERT_EQ(a.status, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("n,lambda,lambda_minus_asymptotic\n", 0), 0u);
  EXPECT_NE(a.out.find("\n1,2.40482555769577"), std::string::npos);
}

TEST_F(CliTest, UnknownSubcommand) {
  const Result r = run("frobnicate");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("unknown subcommand 'frobnicate'"), std::string::npos) << r.err;
}

TEST_F(CliTest, BadValueIsReported) {
  const Result r = run("evolve --N 8 --t 0.1 --dt -1");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("dt must be positive"), std::string::npos) << r.err;
}

TEST_F(CliTest, CorruptCacheNamedThenRebuilt) {
  const std::string cache = "--cache-dir '" + (dir_ / "cache").string() + "'";
  ASSERT_EQ(run(cache + " basis --modes 5 --order 4").status, 0);
  fs::path file;
  for (const auto& e : fs::directory_iterator(dir_ / "cache")) file = e.path();
  ASSERT_FALSE(file.empty());
  {
    std::ofstream os(file, std::ios::binary | std::ios::trunc);
    os << "garbage";
  }
  const Result bad = run(cache + " basis --modes 5 --order 4");
  EXPECT_EQ(bad.status, 3);
  EXPECT_NE(bad.err.find("cache error"), std::string::npos) << bad.err;
  EXPECT_NE(bad.err.find("--rebuild-cache"), std::string::npos) << bad.err;
  const Result fixed = run(cache + " --rebuild-cache basis --modes 5 --order 4");
  EXPECT_EQ(fixed.status, 0) << fixed.err;
  EXPECT_EQ(run(cache + " basis --modes 5 --order 4").status, 0);
}

TEST_F(CliTest, ConfigFileAndOverride) {
  const fs::path cfg = dir_ / "cfg.json";
  {
    std::ofstream os(cfg);
    os << R"({"seed": 77, "basis": {"modes": 3}})";
  }
  const Result fromfile = run("--config '" + cfg.string() + "' basis");
  ASSERT_EQ(fromfile.status, 0) << fromfile.err;
  const auto j = nlohmann::json::parse(fromfile.out);
  EXPECT_EQ(j["seed"], 77);
  EXPECT_EQ(j["config"]["modes"], 3);

  const Result flag = run("--config '" + cfg.string() + "' --seed 5 basis --modes 4");
  ASSERT_EQ(flag.status, 0) << flag.err;
  const auto k = nlohmann::json::parse(flag.out);
  EXPECT_EQ(k["seed"], 5);
  EXPECT_EQ(k["config"]["modes"], 4);
}

TEST_F(CliTest, ConfigErrors) {
  const fs::path broken = dir_ / "broken.json";
  {
    std::ofstream os(broken);
    os << "{\n  \"seed\": 1,\n  \"basis\": {\"modes\": }\n}\n";
  }
  const Result r = run("--config '" + broken.string() + "' basis");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;

  const fs::path unknown = dir_ / "unknown.json";
  {
    std::ofstream os(unknown);
    os << R"({"basis": {"nodes": 3}})";
  }
  const Result u = run("--config '" + unknown.string() + "' basis");
  EXPECT_NE(u.status, 0);
  EXPECT_NE(u.err.find("basis.nodes"), std::string::npos) << u.err;
}

TEST_F(CliTest, ReportIndependentOfWorkers) {
  const std::string args = " gibbs-invariance --N 8 --k 1 --t 0.05 --samples 200 --observables abs2:1,re:1";
  const Result one = run("--seed 4 --workers 1" + args);
  const Result three = run("--seed 4 --workers 3" + args);
  ASSERT_EQ(one.status, 0) << one.err;
  ASSERT_EQ(three.status, 0) << three.err;
  EXPECT_EQ(without_runtime(one.out), without_runtime(three.out));
  EXPECT_EQ(nlohmann::json::parse(three.out)["runtime"]["workers"], 3);
}

TEST_F(CliTest, GlobalFlagsAfterSubcommand) {
  const Result before = run("--seed 9 --json '' --csv - norms --N 8 --s 0 --p 2 --samples 20");
  const Result after = run("norms --N 8 --s 0 --p 2 --samples 20 --seed 9 --json '' --csv -");
  ASSERT_EQ(before.status, 0) << before.err;
  EXPECT_EQ(before.out, after.out);
}

TEST_F(CliTest, EvolveCsvAndSave) {
  const fs::path traj = dir_ / "traj.bin";
  const Result r = run("--json '' --csv - evolve --N 8 --k 1 --t 0.1 --interval 0.05 --save '" + traj.string() + "'");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(traj));
  std::istringstream is(r.out);
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 4);  // header + t = 0, 0.05, 0.1
}
