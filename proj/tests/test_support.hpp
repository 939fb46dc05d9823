#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

#include "aniso/mesh.hpp"
#include "aniso/sparse.hpp"

namespace aniso::fixtures {

inline Eigen::MatrixXd to_dense(const CsrMatrix& a) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(a.size(), a.size());
  const auto rows = a.row_ptr();
  const auto cols = a.cols();
  const auto vals = a.values();
  for (int i = 0; i < a.size(); ++i)
    for (int k = rows[i]; k < rows[i + 1]; ++k) d(i, cols[k]) = vals[k];
  return d;
}

inline CsrMatrix from_dense(const Eigen::MatrixXd& d) {
  std::vector<CsrMatrix::Triplet> trip;
  for (int i = 0; i < d.rows(); ++i)
    for (int j = 0; j < d.cols(); ++j)
      if (d(i, j) != 0.0) trip.push_back({i, j, d(i, j)});
  return CsrMatrix::from_triplets(static_cast<int>(d.rows()), std::move(trip));
}

// B^T B + I with B uniform in [-1, 1].
inline Eigen::MatrixXd random_spd(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = u(rng);
  return b.transpose() * b + Eigen::MatrixXd::Identity(n, n);
}

inline Mesh unit_right_triangle() {
  const Polygon dom({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
  return Mesh(dom,
              {{{0.0, 0.0}, BoundaryTag::corner(0)}, {{1.0, 0.0}, BoundaryTag::corner(1)},
               {{0.0, 1.0}, BoundaryTag::corner(2)}},
              {{0, 1, 2}});
}

// Unit square split along the rising diagonal.
inline Mesh two_triangle_square() { return structured_square_mesh(1); }

// Unit square: four corners plus the centre, four triangles.
inline Mesh five_vertex_square() {
  return Mesh(unit_square_domain(),
              {{{0.0, 0.0}, BoundaryTag::corner(0)},
               {{1.0, 0.0}, BoundaryTag::corner(1)},
               {{1.0, 1.0}, BoundaryTag::corner(2)},
               {{0.0, 1.0}, BoundaryTag::corner(3)},
               {{0.5, 0.5}, BoundaryTag::interior()}},
              {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}});
}

}  // namespace aniso::fixtures
