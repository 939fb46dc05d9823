#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "aniso/mesh.hpp"
#include "aniso/problem.hpp"
#include "aniso/quadrature.hpp"
#include "aniso/solver.hpp"
#include "aniso/sparse.hpp"

namespace aniso {

/// Numbering of the interior (unknown) vertices.
struct DofMap {
  std::vector<int> dof_of_vertex;  // -1 on the Dirichlet boundary
  std::vector<int> vertex_of_dof;

  int size() const { return static_cast<int>(vertex_of_dof.size()); }
};

inline DofMap interior_dofs(const Mesh& m) {
  DofMap map;
  map.dof_of_vertex.assign(m.num_vertices(), -1);
  for (std::size_t v = 0; v < m.num_vertices(); ++v)
    if (!m.vertex(static_cast<int>(v)).tag.is_boundary()) {
      map.dof_of_vertex[v] = map.size();
      map.vertex_of_dof.push_back(static_cast<int>(v));
    }
  return map;
}

using ElementMatrix = std::array<std::array<double, 3>, 3>;

inline ElementMatrix element_stiffness(const ElementGeometry& g) {
  ElementMatrix k{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) k[i][j] = g.area * dot(g.grad_lambda[i], g.grad_lambda[j]);
  return k;
}

inline ElementMatrix element_stiffness(const Mesh& m, int t) { return element_stiffness(element_geometry(m, t)); }

inline Vec2 map_to_element(const Mesh& m, int t, const std::array<double, 3>& bary) {
  return bary[0] * m.point(t, 0) + bary[1] * m.point(t, 1) + bary[2] * m.point(t, 2);
}

/// Stiffness over all vertices, before any boundary elimination.
inline SparseSpdMatrix assemble_full_stiffness(const Mesh& m) {
  std::vector<CsrMatrix::Triplet> trip;
  trip.reserve(9 * m.num_triangles());
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto k = element_stiffness(m, static_cast<int>(t));
    const auto& v = m.triangle(static_cast<int>(t)).v;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.push_back({v[i], v[j], k[i][j]});
  }
  return CsrMatrix::from_triplets(static_cast<int>(m.num_vertices()), std::move(trip));
}

/// Stiffness restricted to interior vertices (rows/columns numbered by DofMap).
inline SparseSpdMatrix assemble_stiffness(const Mesh& m, const DofMap& dofs) {
  std::vector<CsrMatrix::Triplet> trip;
  trip.reserve(9 * m.num_triangles());
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto k = element_stiffness(m, static_cast<int>(t));
    const auto& v = m.triangle(static_cast<int>(t)).v;
    for (int i = 0; i < 3; ++i) {
      const int di = dofs.dof_of_vertex[v[i]];
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int dj = dofs.dof_of_vertex[v[j]];
        if (dj >= 0) trip.push_back({di, dj, k[i][j]});
      }
    }
  }
  return CsrMatrix::from_triplets(dofs.size(), std::move(trip));
}

inline SparseSpdMatrix assemble_stiffness(const Mesh& m) { return assemble_stiffness(m, interior_dofs(m)); }

/// Integrals of f * lambda_i over one element.
inline std::array<double, 3> element_load(const Mesh& m, int t, const std::function<double(Vec2)>& f, int quad_degree) {
  const TriangleRule& rule = triangle_rule(quad_degree);
  const double area = element_geometry(m, t).area;
  std::array<double, 3> out{};
  for (std::size_t q = 0; q < rule.weights.size(); ++q) {
    const double fw = f(map_to_element(m, t, rule.points[q])) * rule.weights[q] * area;
    for (int i = 0; i < 3; ++i) out[i] += fw * rule.points[q][i];
  }
  return out;
}

struct LoadVector {
  std::vector<double> values;
};

/// F_i = int f phi_i, no boundary lifting.
inline LoadVector assemble_source_load(const Mesh& m, const DofMap& dofs, const std::function<double(Vec2)>& f,
                                       int quad_degree) {
  LoadVector load;
  load.values.assign(static_cast<std::size_t>(dofs.size()), 0.0);
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& v = m.triangle(static_cast<int>(t)).v;
    const auto fe = element_load(m, static_cast<int>(t), f, quad_degree);
    for (int i = 0; i < 3; ++i)
      if (const int d = dofs.dof_of_vertex[v[i]]; d >= 0) load.values[d] += fe[i];
  }
  return load;
}

/// Load with the Dirichlet lifting -sum_b A_ib g_b folded into interior rows.
inline LoadVector assemble_load(const Mesh& m, const DofMap& dofs, const TestProblem& p, int quad_degree) {
  LoadVector load = assemble_source_load(m, dofs, p.source, quad_degree);
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& v = m.triangle(static_cast<int>(t)).v;
    ElementMatrix k{};
    bool have_k = false;
    for (int j = 0; j < 3; ++j) {
      if (dofs.dof_of_vertex[v[j]] >= 0) continue;
      if (!have_k) {
        k = element_stiffness(m, static_cast<int>(t));
        have_k = true;
      }
      const double g = p.boundary(m.vertex(v[j]).pos);
      for (int i = 0; i < 3; ++i)
        if (const int d = dofs.dof_of_vertex[v[i]]; d >= 0) load.values[d] -= k[i][j] * g;
    }
  }
  return load;
}

inline LoadVector assemble_load(const Mesh& m, const TestProblem& p, int quad_degree) {
  return assemble_load(m, interior_dofs(m), p, quad_degree);
}

/// Nodal values at every vertex; boundary entries carry g.
struct FemSolution {
  std::vector<double> nodal;
  int cg_iterations = 0;
  double relative_residual = 0.0;
};

struct SolveOptions {
  int quad_degree = kDefaultQuadDegree;
  double rel_tol = 1e-10;
  int max_iter = 0;  // 0 selects 20 n + 100
};

inline FemSolution solve_fem(const Mesh& m, const TestProblem& p, const SolveOptions& opt = {}) {
  const DofMap dofs = interior_dofs(m);
  FemSolution sol;
  sol.nodal.assign(m.num_vertices(), 0.0);
  for (std::size_t v = 0; v < m.num_vertices(); ++v)
    if (dofs.dof_of_vertex[v] < 0) sol.nodal[v] = p.boundary(m.vertex(static_cast<int>(v)).pos);
  if (dofs.size() == 0) return sol;

  const SparseSpdMatrix a = assemble_stiffness(m, dofs);
  const LoadVector f = assemble_load(m, dofs, p, opt.quad_degree);
  const int max_iter = opt.max_iter > 0 ? opt.max_iter : 20 * dofs.size() + 100;
  const CgResult cg = cg_solve(a, f.values, opt.rel_tol, max_iter);
  for (int d = 0; d < dofs.size(); ++d) sol.nodal[dofs.vertex_of_dof[d]] = cg.x[d];
  sol.cg_iterations = cg.iterations;
  sol.relative_residual = cg.relative_residual;
  return sol;
}

/// Gradient of the P1 function with the given nodal values on element t.
inline Vec2 element_gradient(const ElementGeometry& g, const Triangle& tri, const std::vector<double>& nodal) {
  return nodal[tri.v[0]] * g.grad_lambda[0] + nodal[tri.v[1]] * g.grad_lambda[1] + nodal[tri.v[2]] * g.grad_lambda[2];
}

/// |u - u_h|_{H^1} by element quadrature against the exact gradient.
inline double energy_error(const Mesh& m, const FemSolution& s, const TestProblem& p, int quad_degree = kDefaultQuadDegree) {
  const TriangleRule& rule = triangle_rule(quad_degree);
  double sum = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const int ti = static_cast<int>(t);
    const ElementGeometry g = element_geometry(m, ti);
    const Vec2 grad_h = element_gradient(g, m.triangle(ti), s.nodal);
    double local = 0.0;
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Vec2 d = p.exact_grad(map_to_element(m, ti, rule.points[q])) - grad_h;
      local += rule.weights[q] * dot(d, d);
    }
    sum += local * g.area;
  }
  return std::sqrt(sum);
}

}  // namespace aniso
