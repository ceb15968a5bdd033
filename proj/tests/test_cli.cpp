#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "quatpinv/cli.hpp"

using namespace quatpinv;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "quatpinv");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

// Drops the named column so timing noise does not affect comparisons.
std::string without_column(const std::string& text, const std::string& name) {
  auto rows = parse_csv(text);
  std::size_t col = 0;
  while (col < rows.at(0).size() && rows[0][col] != name) ++col;
  std::string out;
  for (auto& r : rows) {
    if (col < r.size()) r.erase(r.begin() + static_cast<std::ptrdiff_t>(col));
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
    out += '\n';
  }
  return out;
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"no-such-command"}).code, kExitUsage);
  EXPECT_EQ(run({"pinv-bench", "--sizes"}).code, kExitUsage);
  EXPECT_EQ(run({"pinv-bench", "--sizes", "0"}).code, kExitUsage);
  EXPECT_EQ(run({"pinv-bench", "--sizes", "5", "--method", "bogus"}).code, kExitUsage);
  EXPECT_EQ(run({"pinv-bench", "--sizes", "5", "--shape", "square"}).code, kExitUsage);
  EXPECT_EQ(run({"recurrence-check", "--bogus-flag"}).code, kExitUsage);
  EXPECT_EQ(run({"recurrence-check", "--schedule", "fast"}).code, kExitUsage);
  EXPECT_EQ(run({"deblur", "--sizes", "12"}).code, kExitUsage);
  EXPECT_EQ(run({"cur-complete", "--missing", "1.5"}).code, kExitUsage);
}

TEST(Cli, HelpSucceeds) {
  const CliRun r = run({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("pinv-bench"), std::string::npos);
}

TEST(Cli, RuntimeErrorOnMissingImage) {
  const CliRun r = run({"deblur", "--image", "/nonexistent/in.ppm"});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.err.find("cannot open"), std::string::npos);
}

TEST(Cli, PinvBenchRow) {
  const CliRun r = run({"pinv-bench", "--sizes", "20", "--method", "ns,qsvd-baseline", "--shape", "wide",
                     "--maxit", "35", "--tol", "0"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].size(), 11u);
  EXPECT_EQ(rows[1][0], "ns");
  EXPECT_EQ(rows[1][1], "20");
  EXPECT_EQ(rows[1][2], "70");
  EXPECT_EQ(rows[1][4], "35");
  for (int c = 6; c <= 9; ++c) EXPECT_LE(std::stod(rows[1][c]), 1e-8);
}

TEST(Cli, FailedRunsBecomeNanRows) {
  const CliRun r = run({"pinv-bench", "--sizes", "6", "--method", "ns", "--gamma", "0"});
  ASSERT_EQ(r.code, kExitOk);
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][4], "nan");
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, RecurrenceDeviationsAreTiny) {
  const CliRun r = run({"recurrence-check", "--seeds", "0,1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_GT(rows.size(), 10u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"kind", "param", "seed", "iter", "residual", "deviation"}));
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(std::stod(rows[i][5]), 1e-11) << i;
}

TEST(Cli, LorenzRow) {
  const CliRun r = run({"lorenz", "--sizes", "50"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0][0], "app");
  EXPECT_EQ(rows[1][0], "lorenz-ns");
  EXPECT_LE(std::stod(rows[1][5]), 1e-6);
}

TEST(Cli, DeblurParityAndPpmOutput) {
  const auto dir = std::filesystem::temp_directory_path() / "quatpinv_cli_ppm";
  std::filesystem::remove_all(dir);
  const CliRun r = run({"deblur", "--sizes", "64", "--lambda", "0.05", "--ppm-dir", dir.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][0], "deblur-fft-ns");
  EXPECT_EQ(rows[2][0], "deblur-closed-form");
  EXPECT_NEAR(std::stod(rows[1][4]), std::stod(rows[2][4]), 0.01);
  int ppm = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) ppm += e.path().extension() == ".ppm";
  EXPECT_EQ(ppm, 3);
  std::filesystem::remove_all(dir);
}

TEST(Cli, CurCompleteHistory) {
  const CliRun r = run({"cur-complete", "--sizes", "30", "--iters", "6", "--method", "qsvd-baseline"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[1][0], "cur-complete-qsvd-baseline");
  EXPECT_EQ(rows[6][2], "6");
}

TEST(Cli, WritesToOutFile) {
  const auto path = std::filesystem::temp_directory_path() / "quatpinv_cli_out.csv";
  const CliRun r = run({"recurrence-check", "--out", path.string()});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "kind,param,seed,iter,residual,deviation");
  std::filesystem::remove(path);
  EXPECT_EQ(run({"recurrence-check", "--out", "/nonexistent/dir/x.csv"}).code, kExitRuntime);
}

TEST(Cli, DeterministicApartFromWallTime) {
  const std::vector<std::string> bench{"pinv-bench", "--sizes", "10", "--seeds", "3,4",
                                       "--method", "ns,rsp,hybrid,cgne"};
  EXPECT_EQ(without_column(run(bench).out, "wall_s"), without_column(run(bench).out, "wall_s"));
  const std::vector<std::string> deblur{"deblur", "--sizes", "32", "--lambda", "0.02"};
  EXPECT_EQ(without_column(run(deblur).out, "wall_s"), without_column(run(deblur).out, "wall_s"));
}
