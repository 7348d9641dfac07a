#include "eikfm_cli/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "eikfm/convergence.hpp"
#include "eikfm/field_io.hpp"

namespace eikfm {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("eikfm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string slurp(const std::string& name) const {
    std::ifstream is(dir_ / name);
    std::stringstream buf;
    buf << is.rdbuf();
    return buf.str();
  }
  fs::path dir_;
};

TEST_F(CliTest, SolveAnalyticCasePrintsErrors) {
  const CliResult r = run({"solve", "--case", "cgss2d", "--h", "0.025", "--order", "1",
                     "--out", path("cgss")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("linf=3.679e-03 mean_l2=9.423e-04"), std::string::npos) << r.out;
  const ScalarField tau = read_field(fs::path(path("cgss.tau.fld")));
  EXPECT_EQ(tau.grid().count(0), 161);
  EXPECT_TRUE(fs::exists(path("cgss.tau1.fld")));
}

TEST_F(CliTest, SolveUnitSlownessIsExact) {
  const CliResult r = run({"solve", "--case", "const1", "--order", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto pos = r.out.find("linf=");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_LE(std::stod(r.out.substr(pos + 5)), 1e-10);
}

TEST_F(CliTest, SolveModelFileRejectsNonPositiveSlowness) {
  ScalarField m(RegularGrid::make2d(5, 5, 1.0), 1.0);
  m[12] = -0.5;
  write_field(fs::path(path("bad.fld")), m);
  const CliResult r = run({"solve", "--model", path("bad.fld")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("non-positive slowness"), std::string::npos);
}

TEST_F(CliTest, SolveModelFileWithSource) {
  write_field(fs::path(path("m.fld")), ScalarField(RegularGrid::make2d(7, 5, 0.5), 1.0));
  const CliResult r = run({"solve", "--model", path("m.fld"), "--source", "3,2", "--out", path("s")});
  ASSERT_EQ(r.code, 0) << r.err;
  const ScalarField tau = read_field(fs::path(path("s.tau.fld")));
  EXPECT_NEAR(tau[0], std::hypot(1.5, 1.0), 1e-12);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"solve"}).code, 2);
  EXPECT_EQ(run({"solve", "--case", "nope2d"}).code, 2);
  EXPECT_EQ(run({"solve", "--case", "cgss2d", "--order", "3"}).code, 2);
  EXPECT_EQ(run({"solve", "--case", "cgss2d", "--h", "0.3"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, ConvergenceWritesCsvAndSlopes) {
  const CliResult r = run({"convergence", "--case", "cgss2d", "--h", "0.1,0.05", "--orders", "1,2",
                     "--no-work", "--out", path("c.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("slope order 1: mean_l2 "), std::string::npos);
  std::istringstream csv(slurp("c.csv"));
  const ConvergenceReport rep = read_convergence_csv(csv);
  ASSERT_EQ(rep.rows.size(), 4u);
  EXPECT_EQ(rep.rows[0].h, 0.1);
  EXPECT_EQ(rep.rows[0].dims_label(), "41x81");
}

TEST_F(CliTest, ConvergenceSingleSpacingPrintsNa) {
  const CliResult r = run({"convergence", "--case", "cgv2d", "--h", "0.1", "--orders", "1", "--no-work"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("slope order 1: mean_l2 NA, linf NA"), std::string::npos) << r.out;
}

TEST_F(CliTest, InvertSyntheticHistoryIsMonotone) {
  const CliResult r = run({"invert", "--synthetic", "desk64", "--seed", "7", "--out", path("inv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream hist(slurp("inv_history.csv"));
  std::string line;
  std::getline(hist, line);
  EXPECT_EQ(line, "iteration,misfit,reg,mu,objective");
  std::vector<double> misfit, objective;
  while (std::getline(hist, line)) {
    std::istringstream row(line);
    std::vector<double> cells;
    for (std::string c; std::getline(row, c, ',');) cells.push_back(std::stod(c));
    ASSERT_EQ(cells.size(), 5u);
    misfit.push_back(cells[1]);
    objective.push_back(cells[4]);
  }
  ASSERT_EQ(objective.size(), 11u);
  // The line search guarantees the objective; the misfit alone may trade a
  // little against the regularization once it reaches the noise level.
  for (std::size_t i = 1; i < objective.size(); ++i) EXPECT_LE(objective[i], objective[i - 1]);
  EXPECT_LT(misfit.back(), 0.05 * misfit.front());
  for (const char* f : {"inv_m_final.fld", "inv_predicted.csv", "inv_observed.csv",
                        "inv_residual.csv", "inv_survey.eiks"}) {
    EXPECT_TRUE(fs::exists(path(f))) << f;
  }
}

TEST_F(CliTest, InvertFromTruthConvergesImmediately) {
  const CliResult r = run({"invert", "--synthetic", "desk64", "--noise", "0", "--init", "truth",
                     "--out", path("t")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream hist(slurp("t_history.csv"));
  std::string header, row, extra;
  std::getline(hist, header);
  std::getline(hist, row);
  EXPECT_FALSE(std::getline(hist, extra));
  EXPECT_LE(std::stod(row.substr(row.find(',') + 1)), 1e-20);
}

TEST_F(CliTest, InvertMissingConfigExitsTwo) {
  EXPECT_EQ(run({"invert", "--synthetic", "desk64", "--config", path("missing.json")}).code, 2);
  EXPECT_EQ(run({"invert", "--survey", path("missing.eiks")}).code, 2);
}

TEST_F(CliTest, InvertSurveyFileWithConfig) {
  ASSERT_EQ(run({"invert", "--synthetic", "desk64", "--seed", "3", "--out", path("a")}).code, 0);
  {
    std::ofstream cfg(path("cfg.json"));
    cfg << R"({"n_gn": 2, "m_low": 0.0493827, "m_high": 0.694444, "m_ref": "a_m_true.fld"})";
  }
  const CliResult r = run({"invert", "--survey", path("a_survey.eiks"), "--config", path("cfg.json"),
                     "--out", path("b")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("b_m_final.fld")));
}

TEST_F(CliTest, DeterministicOutputs) {
  ASSERT_EQ(run({"invert", "--synthetic", "desk64", "--seed", "11", "--out", path("x")}).code, 0);
  ASSERT_EQ(run({"invert", "--synthetic", "desk64", "--seed", "11", "--out", path("y")}).code, 0);
  EXPECT_EQ(slurp("x_history.csv"), slurp("y_history.csv"));
  EXPECT_EQ(slurp("x_m_final.fld"), slurp("y_m_final.fld"));
}

TEST_F(CliTest, WorkUnit) {
  const CliResult r = run({"workunit", "--grid", "65x129"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("work unit"), std::string::npos);
  EXPECT_EQ(run({"workunit", "--grid", "65"}).code, 2);
}

}  // namespace
}  // namespace eikfm
