#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(ISCC_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (const std::size_t n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "iscc_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string config_path(const std::string& name) { return std::string(ISCC_CONFIG_DIR) + "/" + name; }

}  // namespace

TEST(Cli, SolveIsReproducible) {
  // Same output prefix both times: the JSON embeds the resolved paths.
  const auto out = scratch("solve");
  ASSERT_EQ(run("solve --seed 7 --out " + out.string()).code, 0);
  const auto csv = slurp(out.string() + ".csv"), json = slurp(out.string() + ".json");
  ASSERT_FALSE(csv.empty());
  ASSERT_EQ(run("solve --seed 7 --out " + out.string()).code, 0);
  EXPECT_EQ(csv, slurp(out.string() + ".csv"));
  EXPECT_EQ(json, slurp(out.string() + ".json"));
}

TEST(Cli, SweepRowCount) {
  const auto out = scratch("sweep");
  ASSERT_EQ(run("sweep --axis t_max --values 0.6,0.7,0.8,0.9,1.0 --out " + out.string()).code, 0);
  const auto csv = slurp(out.string() + ".csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 21);
}

TEST(Cli, ValidatePasses) { EXPECT_EQ(run("validate --suite prop1 --trials 200").code, 0); }

TEST(Cli, InfeasibleExitCode) {
  const auto cfg = scratch("tight.json");
  std::ofstream(cfg) << R"({"scenario": {"t_max": 0.4}})";
  EXPECT_EQ(run("solve --config " + cfg.string()).code, 2);
}

TEST(Cli, ConfigErrorExitCode) {
  const auto cfg = scratch("bad.json");
  std::ofstream(cfg) << R"({"scenario": {"no_such_key": 1}})";
  EXPECT_EQ(run("solve --config " + cfg.string()).code, 3);
  EXPECT_EQ(run("solve --config /nonexistent/file.json").code, 3);
}

TEST(Cli, ShippedConfigsLoad) {
  for (const char* name : {"default.json", "latency_constrained.json", "accuracy_constrained.json",
                            "snr_constrained.json"}) {
    const int code = run("solve --config " + config_path(name)).code;
    EXPECT_TRUE(code == 0 || code == 2) << name << " exit " << code;
  }
}

TEST(Cli, BaselineOnDevice) {
  const auto r = run("baseline --kind on_device");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("on_device"), std::string::npos);
}
