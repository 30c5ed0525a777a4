#include "cli_runner.hpp"

#include <gtest/gtest.h>

using cli::run;
using cli::slurp;

TEST(Cli, VerifyDefaultsPass) {
  const auto dir = cli::scratch("verify");
  EXPECT_EQ(run("verify --out \"" + dir.string() + "\"", dir), 0);
  const auto report = slurp(dir / "verify_report.jsonl");
  EXPECT_EQ(report.rfind("{\"schema\":\"zblab.report/1\"", 0), 0u);
  EXPECT_NE(report.find("\"status\":\"PASS\""), std::string::npos);
  EXPECT_EQ(report.find("FAIL"), std::string::npos);
}

TEST(Cli, VerifyIsByteDeterministic) {
  const auto a = cli::scratch("det_a"), b = cli::scratch("det_b");
  const std::string args = "verify --config \"" + cli::samples("verify.conf") + "\" --seed 9 --out ";
  ASSERT_EQ(run(args + "\"" + a.string() + "\"", a), 0);
  ASSERT_EQ(run(args + "\"" + b.string() + "\"", b), 0);
  EXPECT_EQ(slurp(a / "verify_report.jsonl"), slurp(b / "verify_report.jsonl"));
  EXPECT_EQ(slurp(a / "stdout.txt"), slurp(b / "stdout.txt"));

  const auto c = cli::scratch("det_c");
  ASSERT_EQ(run("verify --seed 10 --out \"" + c.string() + "\"", c), 0);
  EXPECT_NE(slurp(a / "verify_report.jsonl"), slurp(c / "verify_report.jsonl"));
}

TEST(Cli, ImpossibleToleranceExitsOne) {
  const auto dir = cli::scratch("tol");
  EXPECT_EQ(run("verify --tolerance decomposition=1e-30 --out \"" + dir.string() + "\"", dir), 1);
  const auto out = slurp(dir / "stdout.txt");
  EXPECT_NE(out.find("FAIL decomposition["), std::string::npos);
  EXPECT_NE(slurp(dir / "verify_report.jsonl").find("\"status\":\"FAIL\""), std::string::npos);
}

TEST(Cli, ConfigErrorsExitTwo) {
  const auto dir = cli::scratch("config");
  {
    std::ofstream f(dir / "nomass.conf");
    f << "spacing = 1\nn_max = 1\n";
  }
  EXPECT_EQ(run("verify --config \"" + (dir / "nomass.conf").string() + "\" --out \"" +
                    dir.string() + "\"",
                dir),
            2);
  EXPECT_NE(slurp(dir / "stderr.txt").find("mass"), std::string::npos);
  EXPECT_EQ(run("verify --tolerance nonsense=1 --out \"" + dir.string() + "\"", dir), 2);
  EXPECT_EQ(run("verify --tolerance car=-1 --out \"" + dir.string() + "\"", dir), 2);
  EXPECT_EQ(run("verify --set unknown_key=3 --out \"" + dir.string() + "\"", dir), 2);
  EXPECT_EQ(run("frobnicate", dir), 2);
  EXPECT_EQ(run("", dir), 2);
  EXPECT_EQ(run("simulate --set grid_points=500 --out \"" + dir.string() + "\"", dir), 2);
  EXPECT_EQ(run("--help", dir), 0);
  EXPECT_NE(slurp(dir / "stdout.txt").find("box_length"), std::string::npos);
}

TEST(Cli, SimulateAndSpectrum) {
  const auto dir = cli::scratch("simulate");
  ASSERT_EQ(run("simulate --out \"" + dir.string() + "\"", dir), 0);
  const auto csv = slurp(dir / "trajectory.csv");
  EXPECT_EQ(csv.rfind("t,x1,x2,x3,j1,j2,j3,norm\n", 0), 0u);
  EXPECT_EQ(run("spectrum \"" + (dir / "trajectory.csv").string() + "\" --check --out \"" +
                    dir.string() + "\"",
                dir),
            0);
  EXPECT_EQ(run("spectrum \"" + (dir / "trajectory.csv").string() +
                    "\" --check --set mass=3 --out \"" + dir.string() + "\"",
                dir),
            1);
  EXPECT_EQ(run("spectrum \"" + (dir / "missing.csv").string() + "\" --out \"" + dir.string() +
                    "\"",
                dir),
            2);
}

TEST(Cli, SimulateDemoVelocity) {
  const auto dir = cli::scratch("demo");
  ASSERT_EQ(run("simulate --config \"" + cli::samples("simulate_demo.conf") + "\" --out \"" +
                    dir.string() + "\"",
                dir),
            0);
  EXPECT_NE(slurp(dir / "stdout.txt").find("mean velocity (0.59"), std::string::npos);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const auto dir = cli::scratch("env");
  EXPECT_EQ(std::system(("ZBLAB_OUT=\"" + dir.string() + "\" \"" + ZBLAB_BINARY +
                         "\" horizon --flat > /dev/null")
                            .c_str()),
            0);
  EXPECT_TRUE(std::filesystem::exists(dir / "horizon.svg"));
}

TEST(Cli, HorizonScenarios) {
  const auto dir = cli::scratch("horizon");
  const std::string out = " --out \"" + dir.string() + "\"";
  EXPECT_EQ(run("horizon \"" + cli::samples("horizon_ok.txt") + "\"" + out, dir), 0);
  const auto first = slurp(dir / "horizon.svg");
  EXPECT_EQ(run("horizon \"" + cli::samples("horizon_ok.txt") + "\"" + out, dir), 0);
  EXPECT_EQ(first, slurp(dir / "horizon.svg"));
  EXPECT_EQ(run("horizon \"" + cli::samples("horizon_r2_inside_r.txt") + "\" --format ascii" + out,
                dir),
            0);
  EXPECT_TRUE(std::filesystem::exists(dir / "horizon.txt"));
  EXPECT_EQ(run("horizon \"" + cli::samples("horizon_invalid.txt") + "\"" + out, dir), 1);
  EXPECT_NE(slurp(dir / "stderr.txt").find("r1 > r_g"), std::string::npos);
  EXPECT_EQ(run("horizon \"" + cli::samples("horizon_ok.txt") + "\" --format png" + out, dir), 2);
}

TEST(Cli, Selftest) {
  const auto dir = cli::scratch("selftest");
  EXPECT_EQ(run("selftest --out \"" + dir.string() + "\"", dir), 0);
}
