#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "aniso/adapt.hpp"
#include "aniso/errors.hpp"
#include "aniso/fem.hpp"
#include "aniso/mesh.hpp"
#include "aniso/problem.hpp"
#include "aniso/solver.hpp"

namespace aniso {

/// One (mode, target) row of a study. Failed rows carry a message in `error`
/// and NaN in the measured fields.
struct RunRecord {
  std::string mode;
  std::size_t N = 0;
  std::size_t n_int = 0;
  double energy_error = std::numeric_limits<double>::quiet_NaN();
  double hb_estimate = std::numeric_limits<double>::quiet_NaN();
  double max_aspect = std::numeric_limits<double>::quiet_NaN();
  double kappa_unscaled = std::numeric_limits<double>::quiet_NaN();
  double kappa_scaled = std::numeric_limits<double>::quiet_NaN();
  double wall_time = 0.0;
  std::uint64_t seed = 0;
  std::string error;

  bool ok() const { return error.empty(); }
};

inline constexpr const char* kCsvHeader =
    "mode,N,n_int,energy_error,hb_estimate,max_aspect,kappa_unscaled,kappa_scaled,wall_time,seed";

namespace detail {

inline std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out + "\"";
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw MalformedCsv("unterminated quote");
  fields.push_back(cur);
  return fields;
}

inline double parse_real(const std::string& s, const char* column) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw MalformedCsv(std::string("bad value '") + s + "' in column " + column);
}

template <class Int>
Int parse_count(const std::string& s, const char* column) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used == s.size() && !s.empty() && s[0] != '-') return static_cast<Int>(v);
  } catch (const std::exception&) {
  }
  throw MalformedCsv(std::string("bad count '") + s + "' in column " + column);
}

inline void write_real(std::ostream& os, double v) {
  if (std::isnan(v))
    os << "nan";
  else
    os << v;
}

}  // namespace detail

/// Header plus one line per record, doubles with 17 significant digits.
inline void write_records(std::ostream& os, const std::vector<RunRecord>& records) {
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  os << kCsvHeader << '\n';
  for (const RunRecord& r : records) {
    os << r.mode << ',' << r.N << ',' << r.n_int << ',';
    for (double v : {r.energy_error, r.hb_estimate, r.max_aspect, r.kappa_unscaled, r.kappa_scaled, r.wall_time}) {
      detail::write_real(os, v);
      os << ',';
    }
    os << r.seed;
    if (!r.ok()) os << ',' << detail::csv_quote(r.error);
    os << '\n';
  }
  os.precision(old_precision);
}

inline std::vector<RunRecord> read_records(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw MalformedCsv("missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw MalformedCsv("unexpected header '" + line + "'");
  std::vector<RunRecord> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 10 && f.size() != 11)
      throw MalformedCsv("line " + std::to_string(lineno) + ": expected 10 or 11 fields, got " + std::to_string(f.size()));
    RunRecord r;
    r.mode = f[0];
    if (r.mode.empty()) throw MalformedCsv("line " + std::to_string(lineno) + ": empty mode");
    r.N = detail::parse_count<std::size_t>(f[1], "N");
    r.n_int = detail::parse_count<std::size_t>(f[2], "n_int");
    r.energy_error = detail::parse_real(f[3], "energy_error");
    r.hb_estimate = detail::parse_real(f[4], "hb_estimate");
    r.max_aspect = detail::parse_real(f[5], "max_aspect");
    r.kappa_unscaled = detail::parse_real(f[6], "kappa_unscaled");
    r.kappa_scaled = detail::parse_real(f[7], "kappa_scaled");
    r.wall_time = detail::parse_real(f[8], "wall_time");
    r.seed = detail::parse_count<std::uint64_t>(f[9], "seed");
    if (f.size() == 11) {
      r.error = f[10];
      if (r.error.empty()) r.error = "unspecified failure";
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline void save_records(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  write_records(os, records);
}

inline std::vector<RunRecord> load_records(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw MalformedCsv("cannot open " + path.string());
  return read_records(is);
}

struct StudyOptions {
  std::vector<AdaptMode> modes = {AdaptMode::uniform, AdaptMode::isotropic, AdaptMode::anisotropic};
  std::vector<int> targets = {500, 1000, 2000, 4000, 8000, 16000, 32000};
  std::string problem = "mitchell-lshape";
  int quad_degree = kDefaultQuadDegree;
  double gs_tol = 1e-2;
  int gs_max_sweeps = 20;
  std::uint64_t seed = 42;
  bool conditioning = false;   // compute kappa before and after diagonal scaling
  bool record_timing = true;   // false writes wall_time = 0 for byte-exact reruns
  AdaptParams params;
  std::string debug_dir;
};

/// Record plus the final mesh and solution of one adaptation run.
struct RunOutcome {
  RunRecord record;
  std::vector<AdaptStep> steps;  // empty when the run failed
};

inline RunOutcome run_single(const TestProblem& p, AdaptMode mode, int target_n, const StudyOptions& opt) {
  RunOutcome out;
  out.record.mode = std::string(to_string(mode));
  out.record.N = static_cast<std::size_t>(target_n);
  out.record.seed = opt.seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    LoopOptions loop;
    loop.solve.quad_degree = opt.quad_degree;
    loop.gs_tol = opt.gs_tol;
    loop.gs_max_sweeps = opt.gs_max_sweeps;
    loop.debug_dir = opt.debug_dir;
    out.steps = adaptation_loop(p, mode, target_n, opt.params, loop);
    const AdaptStep& last = out.steps.back();
    RunRecord& r = out.record;
    r.N = last.mesh.num_triangles();
    r.n_int = last.mesh.num_interior_vertices();
    r.energy_error = energy_error(last.mesh, last.solution, p, opt.quad_degree);
    r.hb_estimate = last.diag.hb_estimate;
    r.max_aspect = max_aspect_ratio(last.mesh);
    if (opt.conditioning) {
      const SparseSpdMatrix a = assemble_stiffness(last.mesh);
      r.kappa_unscaled = condition_number(a, 1e-6, opt.seed).kappa;
      r.kappa_scaled = scaled_condition_number(a, 1e-6, opt.seed).kappa;
    }
  } catch (const std::exception& e) {
    out.record.error = e.what();
    out.steps.clear();
  }
  if (opt.record_timing)
    out.record.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

/// Runs every (mode, target) pair in order. `observer` sees each outcome.
inline std::vector<RunRecord> run_study(const StudyOptions& opt,
                                        const std::function<void(const RunOutcome&)>& observer = {}) {
  const TestProblem p = make_problem(opt.problem);
  std::vector<RunRecord> records;
  for (AdaptMode mode : opt.modes)
    for (int target : opt.targets) {
      RunOutcome o = run_single(p, mode, target, opt);
      if (observer) observer(o);
      records.push_back(std::move(o.record));
    }
  return records;
}

inline std::vector<RunRecord> run_convergence_study(StudyOptions opt, const std::filesystem::path& out_csv) {
  opt.conditioning = false;
  auto records = run_study(opt);
  save_records(out_csv, records);
  return records;
}

inline std::vector<RunRecord> run_conditioning_study(StudyOptions opt, const std::filesystem::path& out_csv) {
  opt.conditioning = true;
  auto records = run_study(opt);
  save_records(out_csv, records);
  return records;
}

/// Least-squares slope of log(y) against log(x).
inline double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs two or more points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("log-log fit needs positive data");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw std::invalid_argument("slope fit needs distinct x values");
  return (n * sxy - sx * sy) / den;
}

struct PlotFiles {
  std::filesystem::path convergence;
  std::filesystem::path conditioning;
};

/// Writes convergence.dat and conditioning.dat: one gnuplot index block per
/// mode (blocks separated by two blank lines), rows sorted by N, reference
/// slopes anchored at the first row of the block.
inline PlotFiles emit_plot_data(const std::vector<RunRecord>& records, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  PlotFiles files{out_dir / "convergence.dat", out_dir / "conditioning.dat"};
  std::ofstream conv(files.convergence);
  std::ofstream cond(files.conditioning);
  if (!conv || !cond) throw Error("cannot write plot data in " + out_dir.string());
  conv.precision(std::numeric_limits<double>::max_digits10);
  cond.precision(std::numeric_limits<double>::max_digits10);
  conv << "# N energy_error hb_estimate ref_N^-1/2\n";
  cond << "# N kappa_unscaled kappa_scaled ref_N ref_NlogN\n";

  std::vector<std::string> order;
  std::map<std::string, std::vector<RunRecord>> by_mode;
  for (const RunRecord& r : records) {
    if (!r.ok()) continue;
    if (!by_mode.count(r.mode)) order.push_back(r.mode);
    by_mode[r.mode].push_back(r);
  }
  bool first_block = true;
  for (const std::string& mode : order) {
    auto rows = by_mode[mode];
    std::stable_sort(rows.begin(), rows.end(), [](const RunRecord& a, const RunRecord& b) { return a.N < b.N; });
    if (!first_block) {
      conv << "\n\n";
      cond << "\n\n";
    }
    first_block = false;
    conv << "# mode " << mode << '\n';
    cond << "# mode " << mode << '\n';
    const double n0 = static_cast<double>(rows.front().N);
    for (const RunRecord& r : rows) {
      const double n = static_cast<double>(r.N);
      conv << r.N << ' ';
      detail::write_real(conv, r.energy_error);
      conv << ' ';
      detail::write_real(conv, r.hb_estimate);
      conv << ' ';
      detail::write_real(conv, rows.front().energy_error * std::pow(n / n0, -0.5));
      conv << '\n';

      cond << r.N << ' ';
      detail::write_real(cond, r.kappa_unscaled);
      cond << ' ';
      detail::write_real(cond, r.kappa_scaled);
      cond << ' ';
      detail::write_real(cond, rows.front().kappa_scaled * n / n0);
      cond << ' ';
      detail::write_real(cond, rows.front().kappa_unscaled * (n * std::log(n)) / (n0 * std::log(n0)));
      cond << '\n';
    }
  }
  return files;
}

inline PlotFiles emit_plot_data(const std::filesystem::path& csv, const std::filesystem::path& out_dir) {
  return emit_plot_data(load_records(csv), out_dir);
}

}  // namespace aniso
