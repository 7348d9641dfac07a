#include "eikfm/survey_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "eikfm/errors.hpp"
#include "eikfm/field_io.hpp"
#include "support/media.hpp"

namespace eikfm {
namespace {

Survey sample() {
  const RegularGrid g = RegularGrid::make2d(12, 6, 0.25);
  return synthesize_survey(testing::smooth_medium(g, 1), surface_geometry(g, 3, 2), 0.01, 4)
      .survey;
}

TEST(SurveyIo, RoundTripIsExact) {
  const Survey s = sample();
  std::stringstream buf;
  write_survey(buf, s);
  EXPECT_EQ(buf.str().rfind("EIKSURV v1 2 12 6 0.25 0 0 4 6\n", 0), 0u);
  const Survey back = read_survey(buf);
  EXPECT_EQ(back.grid, s.grid);
  ASSERT_EQ(back.sources.size(), s.sources.size());
  for (std::size_t i = 0; i < s.sources.size(); ++i) {
    EXPECT_EQ(back.sources[i].index, s.sources[i].index);
  }
  EXPECT_EQ(back.receivers, s.receivers);
  EXPECT_EQ(back.d_obs.values, s.d_obs.values);
}

TEST(SurveyIo, RejectsBadInput) {
  std::stringstream wrong("EIKFIELD v1 2 3 3 1 0 0\n");
  EXPECT_THROW(read_survey(wrong), DomainError);
  std::stringstream short_header("EIKSURV v1 2 3 3 1 0 0 1\n");
  EXPECT_THROW(read_survey(short_header), DomainError);
  std::stringstream truncated("EIKSURV v1 2 3 3 1 0 0 1 1\nabc");
  EXPECT_THROW(read_survey(truncated), DomainError);
}

TEST(InversionConfigText, ParsesKnownKeys) {
  const InversionConfig c = parse_inversion_config(
      R"({"alpha": 0.25, "n_gn": 4, "n_cg": 3, "ls_factor": 0.6, "ls_max": 7,
          "armijo": 1e-3, "m_low": 0.1, "m_high": 2.0, "order": 2,
          "enforce_monotonicity": true})");
  EXPECT_EQ(c.alpha, 0.25);
  EXPECT_EQ(c.n_gn, 4);
  EXPECT_EQ(c.n_cg, 3);
  EXPECT_EQ(c.ls_factor, 0.6);
  EXPECT_EQ(c.ls_max, 7);
  EXPECT_EQ(c.armijo, 1e-3);
  EXPECT_EQ(c.bound.low, 0.1);
  EXPECT_EQ(c.bound.high, 2.0);
  EXPECT_EQ(c.fm.order, 2);
  EXPECT_TRUE(c.fm.enforce_monotonicity);
}

TEST(InversionConfigText, DefaultsMatchReferenceSettings) {
  const InversionConfig c = parse_inversion_config("{}");
  EXPECT_EQ(c.alpha, 0.5);
  EXPECT_EQ(c.n_gn, 10);
  EXPECT_EQ(c.n_cg, 8);
}

TEST(InversionConfigText, RejectsBadInput) {
  EXPECT_THROW(parse_inversion_config("{\"alpah\": 1}"), DomainError);
  EXPECT_THROW(parse_inversion_config("{\"alpha\": -1}"), DomainError);
  EXPECT_THROW(parse_inversion_config("{\"n_gn\": \"ten\"}"), DomainError);
  EXPECT_THROW(parse_inversion_config("{\"order\": 3}"), DomainError);
  EXPECT_THROW(parse_inversion_config("alpha = 1"), DomainError);
  EXPECT_THROW(read_inversion_config("/nonexistent/cfg.json"), DomainError);
}

TEST(InversionConfigText, ReferenceModelPathIsRelativeToConfig) {
  const auto dir = std::filesystem::temp_directory_path() / "eikfm_cfg_test";
  std::filesystem::create_directories(dir);
  const ScalarField ref(RegularGrid::make2d(4, 3, 1.0), 0.3);
  write_field(dir / "ref.fld", ref);
  {
    std::ofstream os(dir / "cfg.json");
    os << R"({"m_ref": "ref.fld"})";
  }
  const InversionConfig c = read_inversion_config(dir / "cfg.json");
  std::filesystem::remove_all(dir);
  ASSERT_EQ(c.m_ref.size(), 12);
  EXPECT_EQ(c.m_ref[5], 0.3);
}

TEST(DataCsv, RoundTripIsExact) {
  const Survey s = sample();
  std::stringstream buf;
  write_data_csv(buf, s.d_obs);
  const DataMatrix back = read_data_csv(buf);
  EXPECT_EQ(back.sources, s.d_obs.sources);
  EXPECT_EQ(back.receivers, s.d_obs.receivers);
  EXPECT_EQ(back.values, s.d_obs.values);
}

}  // namespace
}  // namespace eikfm
