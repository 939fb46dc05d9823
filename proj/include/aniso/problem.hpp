#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "aniso/errors.hpp"
#include "aniso/mesh.hpp"
#include "aniso/tensor.hpp"

namespace aniso {

/// Dirichlet Poisson problem -Lap u = f, u = g on the boundary, with a known solution.
struct TestProblem {
  std::string name;
  Polygon domain;
  std::function<Mesh()> initial_mesh;
  std::function<double(Vec2)> exact;
  std::function<Vec2(Vec2)> exact_grad;
  std::function<double(Vec2)> source;    // f = -Lap u
  std::function<double(Vec2)> boundary;  // g = u on the boundary
};

/// Multi-feature L-shape benchmark: reentrant corner, circular wavefront,
/// Gaussian peak and a boundary layer along y = -1.
namespace mitchell {

inline constexpr double kFrontSteepness = 200.0;
inline constexpr double kFrontRadius = 0.75;
inline constexpr double kFrontCenterY = -0.75;
inline constexpr double kPeakSharpness = 1000.0;
inline const double kPeakX = -std::sqrt(5.0) / 4.0;
inline constexpr double kPeakY = -0.25;
inline constexpr double kLayerRate = 100.0;

/// Polar angle in [0, 2pi), so the L-shape sees [0, 3pi/2].
inline double polar_angle(double x, double y) {
  double theta = std::atan2(y, x);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  return theta;
}

inline double corner_term(double x, double y) {
  const double r = std::hypot(x, y);
  if (r == 0.0) return 0.0;
  return std::cbrt(r * r) * std::sin(2.0 * polar_angle(x, y) / 3.0);
}

inline Vec2 corner_grad(double x, double y) {
  const double r = std::hypot(x, y);
  if (r == 0.0) throw EvaluationAtSingularity("corner gradient at the origin");
  const double theta = polar_angle(x, y);
  const double scale = (2.0 / 3.0) / std::cbrt(r);
  return {-scale * std::sin(theta / 3.0), scale * std::cos(theta / 3.0)};
}

inline double front_term(double x, double y) {
  const double rho = std::hypot(x, y - kFrontCenterY);
  return std::atan(kFrontSteepness * (rho - kFrontRadius));
}

inline Vec2 front_grad(double x, double y) {
  const double dy = y - kFrontCenterY;
  const double rho = std::hypot(x, dy);
  const double s = kFrontSteepness * (rho - kFrontRadius);
  const double g = kFrontSteepness / (1.0 + s * s);
  if (rho == 0.0) return {0.0, 0.0};
  return {g * x / rho, g * dy / rho};
}

// Radial function: Lap = g'' + g'/rho.
inline double front_laplacian(double x, double y) {
  const double rho = std::hypot(x, y - kFrontCenterY);
  const double s = kFrontSteepness * (rho - kFrontRadius);
  const double q = 1.0 + s * s;
  const double g1 = kFrontSteepness / q;
  const double g2 = -2.0 * kFrontSteepness * kFrontSteepness * s / (q * q);
  return g2 + g1 / rho;
}

inline double peak_term(double x, double y) {
  const double dx = x - kPeakX;
  const double dy = y - kPeakY;
  return std::exp(-kPeakSharpness * (dx * dx + dy * dy));
}

inline Vec2 peak_grad(double x, double y) {
  const double e = peak_term(x, y);
  return {-2.0 * kPeakSharpness * (x - kPeakX) * e, -2.0 * kPeakSharpness * (y - kPeakY) * e};
}

inline double peak_laplacian(double x, double y) {
  const double dx = x - kPeakX;
  const double dy = y - kPeakY;
  const double q = dx * dx + dy * dy;
  return (-4.0 * kPeakSharpness + 4.0 * kPeakSharpness * kPeakSharpness * q) * peak_term(x, y);
}

inline double layer_term(double /*x*/, double y) { return std::exp(-kLayerRate * (y + 1.0)); }

inline Vec2 layer_grad(double x, double y) { return {0.0, -kLayerRate * layer_term(x, y)}; }

inline double layer_laplacian(double x, double y) { return kLayerRate * kLayerRate * layer_term(x, y); }

inline double exact_u(double x, double y) {
  return corner_term(x, y) + front_term(x, y) + peak_term(x, y) + layer_term(x, y);
}

inline Vec2 exact_grad(double x, double y) {
  // corner_grad throws at the origin
  return corner_grad(x, y) + front_grad(x, y) + peak_grad(x, y) + layer_grad(x, y);
}

inline double source_f(double x, double y) {
  if (x == 0.0 && y == 0.0) throw EvaluationAtSingularity("source term at the origin");
  // The corner term is harmonic.
  return -(front_laplacian(x, y) + peak_laplacian(x, y) + layer_laplacian(x, y));
}

}  // namespace mitchell

inline TestProblem mitchell_lshape_problem() {
  TestProblem p;
  p.name = "mitchell-lshape";
  p.domain = lshape_domain();
  p.initial_mesh = [] { return initial_lshape_mesh(); };
  p.exact = [](Vec2 q) { return mitchell::exact_u(q.x, q.y); };
  p.exact_grad = [](Vec2 q) { return mitchell::exact_grad(q.x, q.y); };
  p.source = [](Vec2 q) { return mitchell::source_f(q.x, q.y); };
  p.boundary = p.exact;
  return p;
}

/// u = a + b x + c y on the L-shape; P1 elements reproduce it exactly.
inline TestProblem linear_problem(double a, double b, double c) {
  TestProblem p;
  p.name = "linear";
  p.domain = lshape_domain();
  p.initial_mesh = [] { return initial_lshape_mesh(); };
  p.exact = [=](Vec2 q) { return a + b * q.x + c * q.y; };
  p.exact_grad = [=](Vec2) { return Vec2{b, c}; };
  p.source = [](Vec2) { return 0.0; };
  p.boundary = p.exact;
  return p;
}

inline std::vector<std::string> problem_names() { return {"mitchell-lshape"}; }

inline TestProblem make_problem(const std::string& name) {
  static const std::map<std::string, std::function<TestProblem()>> registry = {
      {"mitchell-lshape", mitchell_lshape_problem},
  };
  const auto it = registry.find(name);
  if (it == registry.end()) throw Error("unknown problem '" + name + "'");
  return it->second();
}

}  // namespace aniso
