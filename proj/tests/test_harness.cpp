#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aniso/errors.hpp"
#include "aniso/harness.hpp"

using namespace aniso;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("aniso_harness_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

RunRecord record(std::string mode, std::size_t n, double err, double ku = 10.0, double ks = 5.0) {
  RunRecord r;
  r.mode = std::move(mode);
  r.N = n;
  r.n_int = n / 2;
  r.energy_error = err;
  r.hb_estimate = 0.9 * err;
  r.max_aspect = 2.5;
  r.kappa_unscaled = ku;
  r.kappa_scaled = ks;
  r.wall_time = 0.125;
  r.seed = 42;
  return r;
}

// Data rows of a plot file, split by mode block.
std::map<std::string, std::vector<std::vector<double>>> parse_blocks(const fs::path& p) {
  std::map<std::string, std::vector<std::vector<double>>> out;
  std::ifstream is(p);
  std::string line, mode;
  while (std::getline(is, line)) {
    if (line.rfind("# mode ", 0) == 0) {
      mode = line.substr(7);
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) row.push_back(tok == "nan" ? std::nan("") : std::stod(tok));
    out[mode].push_back(row);
  }
  return out;
}

}  // namespace

TEST(Csv, HeaderHasExactColumns) {
  std::ostringstream os;
  write_records(os, {});
  EXPECT_EQ(os.str(), "mode,N,n_int,energy_error,hb_estimate,max_aspect,kappa_unscaled,kappa_scaled,wall_time,seed\n");
}

TEST(Csv, RoundTripIsExact) {
  std::vector<RunRecord> in = {record("uniform", 2040, 18.776543210987654), record("anisotropic", 7993, 1.0 / 3.0)};
  in[1].kappa_unscaled = std::nan("");
  in[1].kappa_scaled = std::nan("");
  RunRecord failed = record("isotropic", 500, std::nan(""));
  failed.error = "solver divergence: no convergence, \"quoted\" text";
  in.push_back(failed);

  std::stringstream ss;
  write_records(ss, in);
  const auto out = read_records(ss);
  ASSERT_EQ(out.size(), in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    EXPECT_EQ(out[i].mode, in[i].mode);
    EXPECT_EQ(out[i].N, in[i].N);
    EXPECT_EQ(out[i].n_int, in[i].n_int);
    for (auto f : {&RunRecord::energy_error, &RunRecord::hb_estimate, &RunRecord::max_aspect, &RunRecord::kappa_unscaled,
                   &RunRecord::kappa_scaled, &RunRecord::wall_time}) {
      if (std::isnan(in[i].*f))
        EXPECT_TRUE(std::isnan(out[i].*f));
      else
        EXPECT_EQ(out[i].*f, in[i].*f);
    }
    EXPECT_EQ(out[i].seed, in[i].seed);
    EXPECT_EQ(out[i].error, in[i].error);
  }
  EXPECT_FALSE(out[2].ok());
}

TEST(Csv, MalformedInputThrows) {
  const std::string header = std::string(kCsvHeader) + "\n";
  for (const std::string& text : {std::string(""), std::string("mode,N\n"),
                                  header + "uniform,12,3,1.0,1.0,2.0,nan,nan,0\n",
                                  header + "uniform,12,3,abc,1.0,2.0,nan,nan,0,42\n",
                                  header + "uniform,-4,3,1.0,1.0,2.0,nan,nan,0,42\n",
                                  header + ",12,3,1.0,1.0,2.0,nan,nan,0,42\n",
                                  header + "uniform,12,3,1.0,1.0,2.0,nan,nan,0,42,\"open\n"}) {
    std::istringstream is(text);
    EXPECT_THROW(read_records(is), MalformedCsv) << text;
  }
  EXPECT_THROW(load_records("/nonexistent/dir/file.csv"), MalformedCsv);
}

TEST(SlopeFit, RecoversPowerLaws) {
  const std::vector<double> n = {500, 1000, 2000, 4000, 8000};
  std::vector<double> e, k;
  for (double x : n) {
    e.push_back(3.0 * std::pow(x, -0.5));
    k.push_back(0.1 * std::pow(x, 1.2));
  }
  EXPECT_NEAR(fit_loglog_slope(n, e), -0.5, 1e-12);
  EXPECT_NEAR(fit_loglog_slope(n, k), 1.2, 1e-12);
  EXPECT_THROW(fit_loglog_slope({1.0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(fit_loglog_slope({2.0, 2.0}, {1.0, 3.0}), std::invalid_argument);
}

TEST(PlotData, EmptyRecordsGiveHeadersOnly) {
  const fs::path d = scratch_dir("empty");
  const PlotFiles f = emit_plot_data(std::vector<RunRecord>{}, d);
  EXPECT_EQ(slurp(f.convergence), "# N energy_error hb_estimate ref_N^-1/2\n");
  EXPECT_EQ(slurp(f.conditioning), "# N kappa_unscaled kappa_scaled ref_N ref_NlogN\n");
  fs::remove_all(d);
}

TEST(PlotData, ReferenceColumnsAreAnchoredAtTheFirstRow) {
  const fs::path d = scratch_dir("anchor");
  // Deliberately out of order; rows come out sorted by N.
  const std::vector<RunRecord> recs = {record("uniform", 4000, 5.0, 400.0, 80.0), record("uniform", 1000, 10.0, 100.0, 20.0),
                                       record("uniform", 2000, 7.0, 200.0, 40.0)};
  const PlotFiles f = emit_plot_data(recs, d);
  const auto conv = parse_blocks(f.convergence);
  const auto cond = parse_blocks(f.conditioning);
  ASSERT_EQ(conv.at("uniform").size(), 3u);
  ASSERT_EQ(cond.at("uniform").size(), 3u);
  const auto& c = conv.at("uniform");
  EXPECT_EQ(c[0][0], 1000.0);
  EXPECT_EQ(c[2][0], 4000.0);
  EXPECT_DOUBLE_EQ(c[0][3], 10.0);
  EXPECT_NEAR(c[2][3], 10.0 * 0.5, 1e-12);
  const auto& k = cond.at("uniform");
  EXPECT_DOUBLE_EQ(k[0][3], 20.0);
  EXPECT_NEAR(k[2][3], 80.0, 1e-12);
  EXPECT_NEAR(k[2][4], 100.0 * 4.0 * std::log(4000.0) / std::log(1000.0), 1e-9);
  fs::remove_all(d);
}

TEST(PlotData, BlocksPerModeAndFailedRowsSkipped) {
  const fs::path d = scratch_dir("blocks");
  std::vector<RunRecord> recs = {record("uniform", 1000, 10.0), record("anisotropic", 1000, 1.0),
                                 record("anisotropic", 2000, 0.7)};
  RunRecord bad = record("anisotropic", 4000, std::nan(""));
  bad.error = "boom";
  recs.push_back(bad);
  const PlotFiles f = emit_plot_data(recs, d);
  const std::string text = slurp(f.convergence);
  EXPECT_NE(text.find("# mode uniform\n"), std::string::npos);
  EXPECT_NE(text.find("\n\n\n# mode anisotropic\n"), std::string::npos);
  const auto conv = parse_blocks(f.convergence);
  EXPECT_EQ(conv.at("anisotropic").size(), 2u);
  fs::remove_all(d);
}

TEST(PlotData, ValuesSurviveToTwelveDigits) {
  const fs::path d = scratch_dir("digits");
  const fs::path csv = d / "study.csv";
  save_records(csv, {record("isotropic", 1234, 0.123456789012345678, 98765.4321098765, 321.987654321098)});
  const PlotFiles f = emit_plot_data(csv, d);
  const auto row = parse_blocks(f.convergence).at("isotropic").at(0);
  EXPECT_NEAR(row[1], 0.123456789012345678, 1e-12 * 0.1234);
  const auto krow = parse_blocks(f.conditioning).at("isotropic").at(0);
  EXPECT_NEAR(krow[1], 98765.4321098765, 1e-12 * 98765.0);
  EXPECT_NEAR(krow[2], 321.987654321098, 1e-12 * 321.0);
  fs::remove_all(d);
}

TEST(PlotData, MalformedCsvThrows) {
  const fs::path d = scratch_dir("malformed");
  std::ofstream(d / "bad.csv") << "not,a,header\n";
  EXPECT_THROW(emit_plot_data(d / "bad.csv", d), MalformedCsv);
  fs::remove_all(d);
}

TEST(Study, FailedRowsAreRecordedAndTheRunContinues) {
  StudyOptions opt;
  opt.modes = {AdaptMode::uniform};
  opt.targets = {50, 200};
  const auto recs = run_study(opt);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_FALSE(recs[0].ok());
  EXPECT_NE(recs[0].error.find("target_n"), std::string::npos);
  EXPECT_TRUE(recs[1].ok());
  EXPECT_TRUE(std::isfinite(recs[1].energy_error));
}

TEST(Study, ConditioningStudyFillsKappa) {
  StudyOptions opt;
  opt.modes = {AdaptMode::isotropic};
  opt.targets = {300};
  const fs::path d = scratch_dir("cond");
  const auto recs = run_conditioning_study(opt, d / "conditioning.csv");
  ASSERT_TRUE(recs.at(0).ok());
  EXPECT_GE(recs[0].kappa_unscaled, 1.0);
  EXPECT_GE(recs[0].kappa_scaled, 1.0);
  EXPECT_EQ(load_records(d / "conditioning.csv").size(), 1u);
  const auto conv = run_convergence_study(opt, d / "convergence.csv");
  EXPECT_TRUE(std::isnan(conv.at(0).kappa_unscaled));
  fs::remove_all(d);
}

TEST(Study, ByteIdenticalReruns) {
  StudyOptions opt;
  opt.modes = {AdaptMode::uniform, AdaptMode::isotropic, AdaptMode::anisotropic};
  opt.targets = {200, 400};
  opt.record_timing = false;
  const fs::path d = scratch_dir("determinism");
  run_convergence_study(opt, d / "a.csv");
  run_convergence_study(opt, d / "b.csv");
  const std::string a = slurp(d / "a.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(d / "b.csv"));
  fs::remove_all(d);
}

TEST(Study, RecordFieldsArePositive) {
  StudyOptions opt;
  opt.modes = {AdaptMode::anisotropic};
  opt.targets = {500};
  const auto recs = run_study(opt);
  const RunRecord& r = recs.at(0);
  ASSERT_TRUE(r.ok()) << r.error;
  EXPECT_GT(r.N, 0u);
  EXPECT_GT(r.n_int, 0u);
  EXPECT_GT(r.energy_error, 0.0);
  EXPECT_GT(r.hb_estimate, 0.0);
  EXPECT_GE(r.max_aspect, 2.0 / std::sqrt(3.0));
  EXPECT_GE(r.wall_time, 0.0);
  EXPECT_EQ(r.seed, 42u);
}
