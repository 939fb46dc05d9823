#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <span>
#include <vector>

#include "aniso/errors.hpp"
#include "aniso/mesh.hpp"
#include "aniso/tensor.hpp"

namespace aniso {

/// Same eigenvectors, eigenvalues replaced by their absolute values.
inline SymTensor2 absolute_tensor(const SymTensor2& h) {
  const SymEigen e = h.eigen();
  return SymTensor2::from_eigen(std::abs(e.large), std::abs(e.small), e.angle);
}

/// H^1-seminorm optimal metric for a quadratic with Hessian h:
/// with B = I + |h| / alpha, M = |B|_2 det(B)^{-1/4} B.
inline SymTensor2 metric_tensor(const SymTensor2& h, double alpha) {
  const SymEigen e = h.eigen();
  const double b1 = 1.0 + std::abs(e.large) / alpha;
  const double b2 = 1.0 + std::abs(e.small) / alpha;
  const double scale = std::max(b1, b2) * std::pow(b1 * b2, -0.25);
  return SymTensor2::from_eigen(scale * b1, scale * b2, e.angle);
}

namespace detail {

struct AbsEigen {
  double a1;
  double a2;
};

// sum_K |K| det(I + |H_K|/alpha)^{1/4} / sum_K |K| - 2
inline double calibration_residual(std::span<const AbsEigen> eig, std::span<const double> areas, double total,
                                   double alpha) {
  double s = 0.0;
  for (std::size_t k = 0; k < eig.size(); ++k)
    s += areas[k] * std::pow((1.0 + eig[k].a1 / alpha) * (1.0 + eig[k].a2 / alpha), 0.25);
  return s / total - 2.0;
}

}  // namespace detail

/// Regularization parameter alpha_h solving
///   sum_K |K| det(I + |H_K|/alpha)^{1/4} = 2 sum_K |K|
/// by bisection in log(alpha). Throws UniformField when every H_K is zero.
inline double calibrate_alpha(std::span<const SymTensor2> hessians, std::span<const double> areas) {
  std::vector<detail::AbsEigen> eig(hessians.size());
  double h_max = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < hessians.size(); ++k) {
    const SymEigen e = hessians[k].eigen();
    eig[k] = {std::abs(e.large), std::abs(e.small)};
    if (areas[k] > 0.0) h_max = std::max({h_max, eig[k].a1, eig[k].a2});
    total += areas[k];
  }
  if (!(h_max > 0.0) || !(total > 0.0)) throw UniformField();

  // At alpha = h_max every factor is at most sqrt(2) < 2, so the residual is negative.
  double hi = h_max;
  double lo = 1e-12 * h_max;
  for (int i = 0; i < 60 && detail::calibration_residual(eig, areas, total, lo) <= 0.0; ++i) lo *= 1e-3;

  double alpha = std::sqrt(lo * hi);
  for (int it = 0; it < 200; ++it) {
    alpha = std::sqrt(lo * hi);
    const double r = detail::calibration_residual(eig, areas, total, alpha);
    if (std::abs(r) <= 1e-9 || hi / lo - 1.0 < 1e-14) break;
    (r > 0.0 ? lo : hi) = alpha;
  }
  return alpha;
}

/// Element-wise metric tensors and the regularization they were built with.
struct MetricField {
  std::vector<SymTensor2> element;
  double alpha = std::numeric_limits<double>::infinity();
};

/// Metric field from element Hessians; identity everywhere for a uniform field.
inline MetricField build_metric_field(std::span<const SymTensor2> hessians, std::span<const double> areas) {
  MetricField field;
  try {
    field.alpha = calibrate_alpha(hessians, areas);
  } catch (const UniformField&) {
    field.element.assign(hessians.size(), SymTensor2::identity());
    return field;
  }
  field.element.reserve(hessians.size());
  for (const SymTensor2& h : hessians) field.element.push_back(metric_tensor(h, field.alpha));
  return field;
}

/// Area-weighted arithmetic mean of the incident element tensors.
inline std::vector<SymTensor2> vertex_metrics(const Mesh& m, const MetricField& field) {
  std::vector<SymTensor2> acc(m.num_vertices());
  std::vector<double> weight(m.num_vertices(), 0.0);
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const double area = std::abs(m.signed_area(static_cast<int>(t)));
    for (int v : m.triangle(static_cast<int>(t)).v) {
      acc[v] += area * field.element[t];
      weight[v] += area;
    }
  }
  for (std::size_t v = 0; v < acc.size(); ++v)
    if (weight[v] > 0.0) acc[v] *= 1.0 / weight[v];
  return acc;
}

/// Rows `element_id m11 m12 m22`.
inline void write_metric_field(std::ostream& os, const MetricField& field) {
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t k = 0; k < field.element.size(); ++k) {
    const SymTensor2& t = field.element[k];
    os << k << ' ' << t.xx << ' ' << t.xy << ' ' << t.yy << '\n';
  }
  os.precision(old_precision);
}

}  // namespace aniso
