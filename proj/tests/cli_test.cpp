// Runs the installed executable as a subprocess to check the exit-code contract.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <string>

#ifndef VCAUSAL_CLI_PATH
#error "VCAUSAL_CLI_PATH must point at the vcausal executable"
#endif

namespace {

struct Result {
  int code;
  std::string out;
};

Result sh(const std::string& args) {
  const std::string cmd = std::string(VCAUSAL_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << content;
  return path;
}

TEST(Cli, RoundTripSubcommand) {
  const auto r = sh("roundtrip --x1 1 --v 0.9 --ubar 2 --regime sr");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"paradox\": true"), std::string::npos) << r.out;
}

TEST(Cli, ScanCsv) {
  const auto r = sh("scan --ubar 3 --format csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "v,t1_prime,delta_t_prime,total,paradox");
}

TEST(Cli, RunConfigAndOverrides) {
  const auto path = write_temp("rt.json",
                               R"({"seed":42,"experiment":{"round_trip":{"x1":1.0,"v":0.9,"ubar":2.0,"regime":"sr"}},"output":{"format":"json"}})");
  const auto a = sh("run " + path);
  const auto b = sh("run " + path);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto csv = sh("run " + path + " --format csv");
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.rfind("regime,", 0), 0u) << csv.out;

  const auto out_path = ::testing::TempDir() + "rt_out.json";
  ASSERT_EQ(sh("run " + path + " --out " + out_path).code, 0);
  std::ifstream in(out_path);
  const std::string written((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(written, a.out);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(sh("run " + write_temp("bad.json", "{ nope")).code, 2);
  EXPECT_EQ(sh("roundtrip --x1 1 --v 1.5 --ubar 2").code, 3);
  EXPECT_EQ(sh("ghz --l 1 --t-l 0.4 --ubar 3 --p 0.5 --model local_only").code, 3);
  EXPECT_EQ(sh("run /nonexistent/config.json").code, 5);
  EXPECT_EQ(sh("roundtrip --x1 1 --v 0.5 --ubar 2 --out /nonexistent-dir/x.json").code, 5);
  EXPECT_EQ(sh("frobnicate").code, 2);
  EXPECT_EQ(sh("--help").code, 0);
}

TEST(Cli, GhzSubcommand) {
  const auto r = sh("ghz --l 1 --t-l 0.4 --ubar 3 --seed 7 --blocks 20 --trials 1000");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"accuracy\": 1.0"), std::string::npos) << r.out;
}

TEST(Cli, MalusAndChshSubcommands) {
  EXPECT_EQ(sh("malus --alpha-deg 0 --beta-deg 0 45 --trials 5000 --format csv").code, 0);
  EXPECT_EQ(sh("chsh --trials 5000 --settings-deg 0 45 22.5 67.5").code, 0);
  EXPECT_EQ(sh("chsh --trials 10").code, 3);
}

}  // namespace

#ifdef VCAUSAL_CONFIG_DIR
#include <filesystem>

namespace {

TEST(Cli, ShippedConfigsRun) {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(VCAUSAL_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    EXPECT_EQ(sh("run " + entry.path().string()).code, 0) << entry.path();
  }
  EXPECT_GT(seen, 0);
}

}  // namespace
#endif
