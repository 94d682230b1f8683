#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "tds/scan.hpp"

namespace {

namespace fs = std::filesystem;
using namespace tds::scan;

// A fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("tds_scan_test_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

using tds::testing::read_csv;
using tds::testing::split;

SweepSpec small_physical() {
  SweepSpec s;
  s.axes = {{"xi", 0.1, 0.5, 3}, {"mu", 0.4, 1.0, 4}};
  s.fixed = {{"eta", 0.7}};
  return s;
}

TEST(FormatNumber, SeventeenDigitsLowercaseExponent) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(1e-20), "9.9999999999999995e-21");
  EXPECT_EQ(format_number(0.0), "0");
  for (double x : {1.0 / 3.0, 2.5e-300, 123456.789, -7.0e22}) EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(Csv, HeaderMatchesTheReportSchema) {
  EXPECT_EQ(csv_header(),
            "xi,eta,mu,q,p,d,brightness,g2,os,qfi_lower,qfi_upper,wnv,nonclassical,wigner_negative,limit_tag");
}

TEST(Csv, RowHasOneFieldPerColumnAndEmptyOptionals) {
  const auto r = tds::witness_report(tds::CanonicalParams(0.5, 0.0, 0.0));
  const auto fields = split(csv_row(r));
  ASSERT_EQ(fields.size(), report_columns().size());
  EXPECT_EQ(fields[0], "");
  EXPECT_EQ(fields[6], "");
  EXPECT_EQ(fields[3], "0.5");
  EXPECT_EQ(fields[12], "false");
  EXPECT_EQ(fields[14], "");
}

TEST(Json, NullsForMissingCoordinatesAndFixedKeyOrder) {
  const auto j = to_json(tds::witness_report(tds::CanonicalParams(0.5, 0.0, 0.0)));
  EXPECT_TRUE(j["xi"].is_null());
  EXPECT_TRUE(j["brightness"].is_null());
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, report_columns());
}

TEST(Render, JsonIsAnArrayAndCommentsAreCsvOnly) {
  const std::vector<tds::WitnessReport> rows = {tds::witness_report(tds::PhysicalParams(0.5, 0.5, 0.5))};
  const auto json = render_reports(rows, Format::json, {"note"});
  EXPECT_EQ(json.front(), '[');
  EXPECT_EQ(json.find('#'), std::string::npos);
  const auto csv = render_reports(rows, Format::csv, {"note"});
  EXPECT_EQ(csv.rfind("# note\n" + csv_header() + "\n", 0), 0u);
}

TEST(ParseAxis, AcceptsAndRejects) {
  const auto a = parse_axis("xi:0.1:0.9:5");
  EXPECT_EQ(a.name, "xi");
  EXPECT_EQ(a.min, 0.1);
  EXPECT_EQ(a.max, 0.9);
  EXPECT_EQ(a.count, 5u);
  EXPECT_EQ(a.value(0), 0.1);
  EXPECT_EQ(a.value(4), 0.9);
  EXPECT_THROW(parse_axis("xi:0.1:0.9"), tds::domain_error);
  EXPECT_THROW(parse_axis("xi:a:0.9:5"), tds::domain_error);
  EXPECT_THROW(parse_axis("xi:0.1:0.9:5x"), tds::domain_error);
  EXPECT_THROW(parse_axis("xi:0.1:0.9:-2"), tds::domain_error);
  EXPECT_THROW(parse_fixed("eta"), tds::domain_error);
  EXPECT_THROW(parse_fixed("eta=x"), tds::domain_error);
  EXPECT_EQ(parse_fixed("eta=0.25").second, 0.25);
}

TEST(Validate, RejectsMalformedSpecs) {
  auto bad = [](auto mutate) {
    auto s = small_physical();
    mutate(s);
    return s;
  };
  EXPECT_EQ(validate(small_physical()), Coordinates::physical);
  EXPECT_THROW(validate(bad([](SweepSpec& s) { s.axes[0].count = 1; })), tds::domain_error);
  EXPECT_THROW(validate(bad([](SweepSpec& s) { s.axes = {{"xi", 0.5, 0.5, 1}}; })), tds::domain_error);
  EXPECT_THROW(validate(bad([](SweepSpec& s) { s.axes[0].max = 1.0; })), tds::domain_error);
  EXPECT_THROW(validate(bad([](SweepSpec& s) { std::swap(s.axes[0].min, s.axes[0].max); })), tds::domain_error);
  EXPECT_THROW(validate(bad([](SweepSpec& s) { s.fixed = {{"d", 0.5}}; })), tds::domain_error);
  EXPECT_THROW(validate(bad([](SweepSpec& s) { s.fixed.push_back({"mu", 0.5}); })), tds::domain_error);
  EXPECT_THROW(validate(bad([](SweepSpec& s) { s.fixed.clear(); })), tds::domain_error);
  EXPECT_THROW(validate(bad([](SweepSpec& s) { s.fixed = {{"zeta", 0.5}}; })), tds::domain_error);
  EXPECT_THROW(validate(bad([](SweepSpec& s) { s.axes.clear(); })), tds::domain_error);
  EXPECT_THROW(validate(bad([](SweepSpec& s) { s.epsilon = 0.0; })), tds::domain_error);
  EXPECT_THROW(validate(bad([](SweepSpec& s) { s.fixed = {{"eta", 0.0}}; })), tds::domain_error);
}

TEST(Validate, CanonicalSpecs) {
  SweepSpec s;
  s.axes = {{"q", 0.0, 0.9, 3}};
  s.fixed = {{"p", 0.2}, {"d", 1.0}};
  EXPECT_EQ(validate(s), Coordinates::canonical);
}

TEST(Sweep, RowMajorOrderWithTheFirstAxisSlowest) {
  const auto spec = small_physical();
  ASSERT_EQ(point_count(spec), 12u);
  const auto rows = run_sweep(spec);
  std::size_t i = 0;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 4; ++b, ++i) {
      EXPECT_EQ(*rows[i].xi, spec.axes[0].value(a));
      EXPECT_EQ(*rows[i].mu, spec.axes[1].value(b));
      EXPECT_EQ(*rows[i].eta, 0.7);
    }
}

TEST(Sweep, RowsEqualSinglePointReports) {
  const auto spec = small_physical();
  const auto rows = run_sweep(spec);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto v = point_values(spec, i);
    const auto r = tds::witness_report(tds::PhysicalParams(v.at("xi"), v.at("eta"), v.at("mu")));
    EXPECT_EQ(csv_row(rows[i]), csv_row(r));
  }
}

TEST(Sweep, Deterministic) {
  auto spec = small_physical();
  spec.axes = {{"xi", 0.0, 0.9, 7}, {"eta", 0.1, 1.0, 6}, {"mu", 0.1, 1.0, 6}};
  spec.fixed.clear();
  const auto first = render_reports(run_sweep(spec), Format::csv);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(render_reports(run_sweep(spec), Format::csv), first);
}

TEST(Sweep, SingularEdgesCarryALimitTag) {
  SweepSpec s;
  s.axes = {{"q", 0.0, 0.5, 2}};
  s.fixed = {{"p", 1.0}, {"d", 1.0}};
  const auto rows = run_sweep(s);
  EXPECT_EQ(rows[0].limit_tag, "single_photon");
  EXPECT_EQ(rows[1].limit_tag, "photon_added_thermal");
}

TEST(WriteAtomically, ReplacesTheFileAndLeavesNoTemporary) {
  TempDir dir;
  const auto p = dir.path / "out.csv";
  write_atomically(p, "first\n");
  write_atomically(p, "second\n");
  EXPECT_EQ(slurp(p), "second\n");
  EXPECT_FALSE(fs::exists(dir.path / "out.csv.tmp"));
  EXPECT_THROW(write_atomically(dir.path / "missing" / "out.csv", "x"), std::runtime_error);
  EXPECT_FALSE(fs::exists(dir.path / "missing"));
}

TEST(ParseFigure, KnownAndUnknown) {
  EXPECT_EQ(parse_figure("fig6b"), FigureId::fig6b);
  EXPECT_THROW(parse_figure("fig8"), tds::domain_error);
}

TEST(Figure, ThreeWritesThreeFiles) {
  TempDir dir;
  const auto paths = write_figure(FigureId::fig3, dir.path);
  ASSERT_EQ(paths.size(), 3u);
  const auto p = read_csv(dir.path / "fig3_p.csv");
  const auto w = read_csv(dir.path / "fig3_wigner.csv");
  const auto fock = read_csv(dir.path / "fig3_fock.csv");
  EXPECT_EQ(p.header, (std::vector<std::string>{"re", "im", "value"}));
  EXPECT_EQ(p.rows.size(), 101u * 101u);
  EXPECT_EQ(w.rows.size(), 101u * 101u);
  // the origin sits at the centre of the grid
  const std::size_t centre = 50 * 101 + 50;
  EXPECT_EQ(p.num(centre, "re"), 0.0);
  EXPECT_EQ(p.num(centre, "im"), 0.0);
  EXPECT_LT(p.num(centre, "value"), 0.0);
  EXPECT_GE(w.num(centre, "value"), -1e-15);
  EXPECT_EQ(fock.header, (std::vector<std::string>{"n", "weight"}));
  EXPECT_EQ(fock.rows[0][0], "0");
  EXPECT_GT(fock.num(1, "weight"), fock.num(0, "weight"));
  EXPECT_GT(fock.num(1, "weight"), fock.num(2, "weight"));
}

TEST(Figure, FourShowsBothMaxima) {
  TempDir dir;
  write_figure(FigureId::fig4, dir.path);
  const auto t = read_csv(dir.path / "fig4.csv");
  ASSERT_EQ(t.rows.size(), kContourResolution * kContourResolution);
  auto at = [&](std::size_t i, std::size_t j) { return t.num(i * kContourResolution + j, "os"); };
  // global maximum at small xi, mu = 1
  double best = 0.0;
  std::size_t best_i = 0, best_j = 0;
  for (std::size_t i = 0; i < kContourResolution; ++i)
    for (std::size_t j = 0; j < kContourResolution; ++j)
      if (at(i, j) > best) {
        best = at(i, j);
        best_i = i;
        best_j = j;
      }
  EXPECT_EQ(best_i, 0u);
  EXPECT_EQ(best_j, kContourResolution - 1);
  EXPECT_NEAR(best, 3.0, 0.01);
  // second, local maximum of 1 at small xi, small mu
  EXPECT_NEAR(at(0, 0), 1.0, 0.005);
  EXPECT_GT(at(0, 0), at(1, 0));
  EXPECT_GT(at(0, 0), at(0, 1));
  EXPECT_GT(at(0, 0), at(1, 1));
}

TEST(Figure, FiveIsNearlyFlatInEtaAtLowMu) {
  TempDir dir;
  write_figure(FigureId::fig5, dir.path);
  const auto t = read_csv(dir.path / "fig5.csv");
  ASSERT_EQ(t.rows.size(), kContourResolution * kContourResolution);
  for (std::size_t j = 0; j < 10; ++j) {  // mu <= 0.1
    double lo = 1e9, hi = -1e9;
    for (std::size_t i = 0; i < kContourResolution; ++i) {
      const double v = t.num(i * kContourResolution + j, "os");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    EXPECT_LT((hi - lo) / hi, 0.01) << "mu column " << j;
  }
}

TEST(Figure, SixCurvesCrossOneAtTheExpectedBrightness) {
  TempDir dir;
  write_figure(FigureId::fig6a, dir.path);
  write_figure(FigureId::fig6b, dir.path);
  write_figure(FigureId::fig6c, dir.path);
  for (const char* name : {"fig6a.csv", "fig6b.csv", "fig6c.csv"}) {
    EXPECT_EQ(read_csv(dir.path / name).rows.size(), 3 * kCurveResolution);
  }
  const auto t = read_csv(dir.path / "fig6b.csv");
  std::vector<double> b, os, qfi;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.num(i, "eta") != 0.8 || t.num(i, "mu") != 0.8) continue;
    b.push_back(t.num(i, "brightness"));
    os.push_back(t.num(i, "os"));
    qfi.push_back(t.num(i, "qfi_upper"));
  }
  ASSERT_EQ(b.size(), kCurveResolution);
  EXPECT_NEAR(tds::testing::crossing(b, os, 1.0), 0.40, 0.02);
  EXPECT_NEAR(tds::testing::crossing(b, qfi, 1.0), 0.26, 0.02);
}

TEST(Figure, SevenCarriesTheScaledWnvColumn) {
  TempDir dir;
  write_figure(FigureId::fig7, dir.path);
  const auto t = read_csv(dir.path / "fig7.csv");
  ASSERT_EQ(t.rows.size(), kCurveResolution);
  EXPECT_EQ(t.header.back(), "wnv_scaled");
  const double single = 2.0 * std::exp(-0.5) - 1.0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_EQ(t.num(i, "xi"), 0.01);
    EXPECT_EQ(t.num(i, "eta"), 1.0);
    EXPECT_NEAR(t.num(i, "wnv_scaled"), 3.0 * t.num(i, "wnv") / single, 1e-14);
  }
  EXPECT_EQ(t.num(0, "wnv_scaled"), 0.0);  // mu below 1/2
  EXPECT_GT(t.num(t.rows.size() - 1, "wnv_scaled"), 2.5);
}

TEST(Figure, JsonFormat) {
  TempDir dir;
  const auto paths = write_figure(FigureId::fig3, dir.path, Format::json);
  for (const auto& p : paths) {
    EXPECT_EQ(p.extension(), ".json");
    EXPECT_TRUE(nlohmann::json::parse(slurp(p)).is_array());
  }
}

TEST(OracleCheck, DefaultGridPasses) {
  const auto r = oracle_check(5, 1e-10);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.evaluated, 125u);
  EXPECT_EQ(r.skipped, 0u);
  EXPECT_LE(r.max_tv, 1e-10);
  EXPECT_TRUE(r.worst.has_value());
}

TEST(OracleCheck, TruncationCapBoundsTheCutoff) {
  const auto r = oracle_check(3, 1e-10, 0.1, 0.9, tds::kDefaultEpsilon, 512);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.max_truncation, 512u);
  EXPECT_GT(oracle_check(3, 1e-10).max_truncation, 512u);
}

TEST(OracleCheck, ZeroToleranceFails) {
  const auto r = oracle_check(2, 0.0);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.max_tv, 0.0);
}

TEST(OracleCheck, PairlessPointsAreSkipped) {
  const auto r = oracle_check(3, 1e-10, 0.0, 0.5);
  EXPECT_EQ(r.skipped, 9u);
  EXPECT_EQ(r.evaluated, 18u);
  EXPECT_TRUE(r.passed);
  EXPECT_THROW(oracle_check(1, 1e-10), tds::domain_error);
}

}  // namespace
