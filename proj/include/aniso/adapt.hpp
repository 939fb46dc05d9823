#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aniso/estimator.hpp"
#include "aniso/fem.hpp"
#include "aniso/mesh.hpp"
#include "aniso/mesh_io.hpp"
#include "aniso/metric.hpp"
#include "aniso/problem.hpp"
#include "aniso/remesh.hpp"

namespace aniso {

enum class AdaptMode { uniform, isotropic, anisotropic };

inline std::string_view to_string(AdaptMode m) {
  switch (m) {
    case AdaptMode::uniform: return "uniform";
    case AdaptMode::isotropic: return "isotropic";
    case AdaptMode::anisotropic: return "anisotropic";
  }
  return "?";
}

inline AdaptMode parse_mode(std::string_view s) {
  if (s == "uniform") return AdaptMode::uniform;
  if (s == "isotropic") return AdaptMode::isotropic;
  if (s == "anisotropic") return AdaptMode::anisotropic;
  throw std::invalid_argument("unknown adaptation mode '" + std::string(s) + "'");
}

/// Expected number of elements of an M-uniform mesh: each unit metric
/// equilateral triangle covers sqrt(3)/4 of metric area.
inline double predicted_element_count(const Mesh& m, std::span<const SymTensor2> vertex_metric) {
  double metric_area = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& v = m.triangle(static_cast<int>(t)).v;
    const SymTensor2 mean = (1.0 / 3.0) * (vertex_metric[v[0]] + vertex_metric[v[1]] + vertex_metric[v[2]]);
    metric_area += std::abs(m.signed_area(static_cast<int>(t))) * std::sqrt(std::max(mean.det(), 0.0));
  }
  return metric_area * 4.0 / std::sqrt(3.0);
}

/// Structured mesh of the initial mesh's domain with element count close to
/// target_n. Cells keep aspect at most 1.25.
inline Mesh uniform_start_mesh(const Mesh& initial, int target_n) {
  const Polygon& dom = initial.domain();
  const auto [lo, hi] = bounding_box(dom);
  // For a grid-aligned rectilinear polygon the inside cells tile it exactly.
  const double fill = dom.area() / ((hi.x - lo.x) * (hi.y - lo.y));
  int best_nx = 0, best_ny = 0;
  double best_err = std::numeric_limits<double>::infinity();
  const int limit = static_cast<int>(std::sqrt(4.0 * target_n / fill)) + 8;
  for (int nx = 1; nx <= limit; ++nx)
    for (int ny = std::max(1, nx * 4 / 5); ny <= nx * 5 / 4 + 1; ++ny) {
      const double err = std::abs(2.0 * nx * ny * fill - target_n);
      if (err < best_err && grid_aligned(dom, nx, ny)) {
        best_err = err;
        best_nx = nx;
        best_ny = ny;
      }
    }
  if (best_nx == 0) throw std::invalid_argument("domain is not grid-aligned");
  return structured_polygon_mesh(dom, best_nx, best_ny);
}

/// Outcome of remeshing toward a prescribed element count.
struct CountedRemesh {
  AdaptResult result;
  double scale = 1.0;
  int attempts = 0;
};

inline constexpr int kCountCorrections = 6;
inline constexpr double kCountTolerance = 0.08;

/// Remeshes `background` for the metric c * vertex_metric with c tuned so the
/// element count is close to target_n. `ratio` carries the observed
/// actual/predicted count between calls and is updated.
inline CountedRemesh remesh_to_count(const Mesh& background, std::vector<SymTensor2> vertex_metric, int target_n,
                                     const AdaptParams& params, double& ratio) {
  limit_gradation(background, vertex_metric, params.gradation);
  const double predicted = predicted_element_count(background, vertex_metric);
  const MetricSampler sampler(background, std::move(vertex_metric));
  const double target = static_cast<double>(target_n);

  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double c = target / (predicted * ratio);
  CountedRemesh best;
  double best_err = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt <= kCountCorrections; ++attempt) {
    AdaptResult r = adapt_to_sampler(background, sampler, c, params);
    const double n = static_cast<double>(r.mesh.num_triangles());
    const double err = std::abs(n / target - 1.0);
    if (err < best_err) {
      best_err = err;
      best = {std::move(r), c, attempt + 1};
    }
    best.attempts = attempt + 1;
    ratio = n / (c * predicted);
    if (err <= kCountTolerance) break;
    (n < target ? lo : hi) = c;
    double next = c * target / n;
    if (!(next > lo && next < hi)) next = std::isfinite(hi) ? (lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi) : 2.0 * lo;
    c = next;
  }
  return best;
}

struct LoopOptions {
  SolveOptions solve;
  double gs_tol = 1e-2;
  int gs_max_sweeps = 20;
  std::string debug_dir;  // non-empty: write every mesh as <mode>_<target>_<iter>.mesh
};

struct IterationDiagnostics {
  int iteration = 0;
  std::size_t elements = 0;
  double hb_estimate = 0.0;
  int gs_sweeps = 0;
  bool zero_estimate = false;
  double alpha = std::numeric_limits<double>::infinity();
  double metric_scale = 1.0;
  int count_attempts = 0;
  double uniformity = 0.0;
  bool stalled = false;
  int local_passes = 0;
};

struct AdaptStep {
  Mesh mesh;
  FemSolution solution;
  HbEstimate estimate;
  IterationDiagnostics diag;
};

namespace detail {

inline void dump_mesh(const LoopOptions& opt, AdaptMode mode, int target_n, int iter, const Mesh& m) {
  if (opt.debug_dir.empty()) return;
  std::filesystem::create_directories(opt.debug_dir);
  const auto path = std::filesystem::path(opt.debug_dir) /
                    (std::string(to_string(mode)) + "_" + std::to_string(target_n) + "_" + std::to_string(iter) + ".mesh");
  save_mesh(path.string(), m);
}

inline std::vector<SymTensor2> mode_vertex_metrics(const Mesh& m, MetricField field, AdaptMode mode) {
  if (mode == AdaptMode::isotropic)
    for (SymTensor2& t : field.element) t = SymTensor2::identity(std::sqrt(std::max(t.det(), 0.0)));
  return vertex_metrics(m, field);
}

}  // namespace detail

/// Solve -> estimate -> metric -> remesh, starting from a uniform mesh of
/// about target_n elements built from the problem's initial mesh.
/// The last step holds the final mesh and its solution.
inline std::vector<AdaptStep> adaptation_loop(const TestProblem& p, AdaptMode mode, int target_n,
                                              const AdaptParams& params, const LoopOptions& opt = {}) {
  if (target_n < 100) throw std::invalid_argument("target_n must be at least 100");
  std::vector<AdaptStep> steps;
  double ratio = 1.0;

  CountedRemesh current;
  current.result.mesh = uniform_start_mesh(p.initial_mesh(), target_n);
  current.result.uniformity = 1.0;

  for (int it = 0; it < std::max(params.outer_max_iters, 1); ++it) {
    AdaptStep step;
    step.mesh = std::move(current.result.mesh);
    detail::dump_mesh(opt, mode, target_n, it, step.mesh);
    step.solution = solve_fem(step.mesh, p, opt.solve);
    step.diag.iteration = it;
    step.diag.elements = step.mesh.num_triangles();
    step.diag.metric_scale = current.scale;
    step.diag.count_attempts = current.attempts;
    step.diag.uniformity = current.result.uniformity;
    step.diag.stalled = current.result.stalled;
    step.diag.local_passes = current.result.passes;

    const HbSystem sys = assemble_hb_system(step.mesh, step.solution, p, opt.solve.quad_degree);
    step.estimate = gauss_seidel_estimate(sys, opt.gs_tol, opt.gs_max_sweeps);
    step.diag.hb_estimate = step.estimate.energy_norm;
    step.diag.gs_sweeps = step.estimate.sweeps;
    step.diag.zero_estimate = step.estimate.zero;

    bool done = mode == AdaptMode::uniform || step.estimate.zero || it + 1 >= params.outer_max_iters;
    if (!done && !steps.empty()) {
      const auto& prev = steps.back().diag;
      const double dn = std::abs(static_cast<double>(step.diag.elements) - static_cast<double>(prev.elements)) /
                        static_cast<double>(step.diag.elements);
      const double de = std::abs(step.diag.hb_estimate - prev.hb_estimate) / step.diag.hb_estimate;
      done = dn < params.outer_element_tol && de < params.outer_element_tol;
    }

    if (!done) {
      std::vector<SymTensor2> hessians(step.mesh.num_triangles());
      std::vector<double> areas(step.mesh.num_triangles());
      for (std::size_t t = 0; t < hessians.size(); ++t) {
        hessians[t] = element_hessian(step.estimate, static_cast<int>(t), step.mesh);
        areas[t] = std::abs(step.mesh.signed_area(static_cast<int>(t)));
      }
      const MetricField field = build_metric_field(hessians, areas);
      step.diag.alpha = field.alpha;
      current = remesh_to_count(step.mesh, detail::mode_vertex_metrics(step.mesh, field, mode), target_n, params,
                                ratio);
    }
    steps.push_back(std::move(step));
    if (done) break;
  }
  return steps;
}

}  // namespace aniso
