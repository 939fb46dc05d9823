#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "aniso/fem.hpp"
#include "aniso/mesh.hpp"
#include "aniso/problem.hpp"
#include "aniso/quadrature.hpp"
#include "aniso/sparse.hpp"
#include "aniso/tensor.hpp"

namespace aniso {

// Hierarchical basis error estimate in the space of quadratic edge bubbles
// psi_e = 4 lambda_a lambda_b. Local edge i of a triangle is the edge
// opposite local vertex i, joining vertices i+1 and i+2.

/// Global bubble-space error problem.
struct HbSystem {
  EdgeTable edges;
  std::vector<int> dof_of_edge;  // -1 on Dirichlet edges
  std::vector<int> edge_of_dof;
  SparseSpdMatrix stiffness;
  std::vector<double> residual;  // int f psi_e - int grad u_h . grad psi_e

  int size() const { return static_cast<int>(edge_of_dof.size()); }
};

struct HbEstimate {
  EdgeTable edges;
  std::vector<double> edge_coefficients;  // indexed like edges.edges; 0 on Dirichlet edges
  int sweeps = 0;
  bool zero = false;  // the residual vanished, z_h = 0
  double energy_norm = 0.0;
};

/// Exact local bubble stiffness: 16 sum of M_xy G_zw over the four index pairings.
inline ElementMatrix bubble_stiffness(const ElementGeometry& g) {
  std::array<std::array<double, 3>, 3> gram{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) gram[i][j] = dot(g.grad_lambda[i], g.grad_lambda[j]);
  // int lambda_x lambda_y = |K| (1 + delta_xy) / 12
  auto mass = [&g](int x, int y) { return g.area * (x == y ? 2.0 : 1.0) / 12.0; };
  ElementMatrix k{};
  for (int i = 0; i < 3; ++i) {
    const int a = (i + 1) % 3;
    const int b = (i + 2) % 3;
    for (int j = 0; j < 3; ++j) {
      const int c = (j + 1) % 3;
      const int d = (j + 2) % 3;
      k[i][j] = 16.0 * (mass(a, c) * gram[b][d] + mass(a, d) * gram[b][c] + mass(b, c) * gram[a][d] +
                        mass(b, d) * gram[a][c]);
    }
  }
  return k;
}

inline HbSystem assemble_hb_system(const Mesh& m, const FemSolution& s, const TestProblem& p,
                                   int quad_degree = kDefaultQuadDegree) {
  HbSystem sys;
  sys.edges = build_edge_table(m);
  sys.dof_of_edge.assign(sys.edges.size(), -1);
  for (std::size_t e = 0; e < sys.edges.size(); ++e)
    if (!sys.edges.is_boundary(e)) {
      sys.dof_of_edge[e] = sys.size();
      sys.edge_of_dof.push_back(static_cast<int>(e));
    }
  sys.residual.assign(static_cast<std::size_t>(sys.size()), 0.0);

  const TriangleRule& rule = triangle_rule(quad_degree);
  std::vector<CsrMatrix::Triplet> trip;
  trip.reserve(9 * m.num_triangles());
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const int ti = static_cast<int>(t);
    const ElementGeometry g = element_geometry(m, ti);
    const auto& te = sys.edges.tri_edges[t];
    std::array<int, 3> dof{};
    bool any = false;
    for (int i = 0; i < 3; ++i) {
      dof[i] = sys.dof_of_edge[te[i]];
      any = any || dof[i] >= 0;
    }
    if (!any) continue;

    const ElementMatrix k = bubble_stiffness(g);
    for (int i = 0; i < 3; ++i) {
      if (dof[i] < 0) continue;
      for (int j = 0; j < 3; ++j)
        if (dof[j] >= 0) trip.push_back({dof[i], dof[j], k[i][j]});
    }

    // int grad psi_i = -(4|K|/3) grad lambda_i
    const Vec2 grad_h = element_gradient(g, m.triangle(ti), s.nodal);
    std::array<double, 3> local{};
    for (int i = 0; i < 3; ++i) local[i] = (4.0 * g.area / 3.0) * dot(grad_h, g.grad_lambda[i]);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& l = rule.points[q];
      const double fw = p.source(map_to_element(m, ti, l)) * rule.weights[q] * g.area;
      for (int i = 0; i < 3; ++i) local[i] += fw * 4.0 * l[(i + 1) % 3] * l[(i + 2) % 3];
    }
    for (int i = 0; i < 3; ++i)
      if (dof[i] >= 0) sys.residual[dof[i]] += local[i];
  }
  sys.stiffness = CsrMatrix::from_triplets(sys.size(), std::move(trip));
  return sys;
}

namespace detail {

inline double energy(const SparseSpdMatrix& a, const std::vector<double>& z) {
  const std::vector<double> az = a * std::span<const double>(z);
  return std::sqrt(std::max(0.0, dot(z, az)));
}

}  // namespace detail

/// Symmetric Gauss-Seidel from a zero start until the energy norm of z_h
/// changes by less than rel_change_tol between sweeps, or max_sweeps.
inline HbEstimate gauss_seidel_estimate(const HbSystem& sys, double rel_change_tol = 1e-2, int max_sweeps = 20) {
  const int n = sys.size();
  const auto& a = sys.stiffness;
  const auto rows = a.row_ptr();
  const auto cols = a.cols();
  const auto vals = a.values();
  const std::vector<double> diag = a.diagonal();

  std::vector<double> z(static_cast<std::size_t>(n), 0.0);
  auto relax = [&](int i) {
    double s = sys.residual[i];
    for (int k = rows[i]; k < rows[i + 1]; ++k)
      if (cols[k] != i) s -= vals[k] * z[cols[k]];
    z[i] = s / diag[i];
  };

  HbEstimate est;
  est.edges = sys.edges;
  est.edge_coefficients.assign(sys.edges.size(), 0.0);
  const bool zero_residual = std::all_of(sys.residual.begin(), sys.residual.end(), [](double r) { return r == 0.0; });
  if (zero_residual) {
    est.zero = true;
    est.sweeps = 1;
    return est;
  }

  double eta = 0.0;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    for (int i = 0; i < n; ++i) relax(i);
    for (int i = n - 1; i >= 0; --i) relax(i);
    const double eta_new = detail::energy(a, z);
    est.sweeps = sweep;
    const bool settled = eta_new > 0.0 && std::abs(eta_new - eta) / eta_new < rel_change_tol;
    eta = eta_new;
    if (settled) break;
  }
  est.energy_norm = eta;
  for (int d = 0; d < n; ++d) est.edge_coefficients[sys.edge_of_dof[d]] = z[d];
  return est;
}

/// Value of z_h at barycentric point `bary` of triangle t.
inline double evaluate_estimate(const HbEstimate& est, int t, const std::array<double, 3>& bary) {
  const auto& te = est.edges.tri_edges[t];
  double v = 0.0;
  for (int i = 0; i < 3; ++i) v += est.edge_coefficients[te[i]] * 4.0 * bary[(i + 1) % 3] * bary[(i + 2) % 3];
  return v;
}

/// Constant Hessian of the quadratic z_h on triangle t:
/// sum over edges of 4 c_e (grad la grad lb^T + grad lb grad la^T).
inline SymTensor2 element_hessian(const HbEstimate& est, int t, const Mesh& m) {
  const ElementGeometry g = element_geometry(m, t);
  const auto& te = est.edges.tri_edges[t];
  SymTensor2 h;
  for (int i = 0; i < 3; ++i) {
    const double c = est.edge_coefficients[te[i]];
    if (c == 0.0) continue;
    h += (8.0 * c) * SymTensor2::outer(g.grad_lambda[(i + 1) % 3], g.grad_lambda[(i + 2) % 3]);
  }
  return h;
}

/// |z_h|_{H^1}, integrated element by element.
inline double estimate_energy_norm(const HbEstimate& est, const Mesh& m) {
  double sum = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& te = est.edges.tri_edges[t];
    const std::array<double, 3> c = {est.edge_coefficients[te[0]], est.edge_coefficients[te[1]],
                                     est.edge_coefficients[te[2]]};
    if (c[0] == 0.0 && c[1] == 0.0 && c[2] == 0.0) continue;
    const ElementMatrix k = bubble_stiffness(element_geometry(m, static_cast<int>(t)));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) sum += c[i] * k[i][j] * c[j];
  }
  return std::sqrt(std::max(0.0, sum));
}

}  // namespace aniso
