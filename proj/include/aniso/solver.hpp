#pragma once

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <sstream>
#include <vector>

#include "aniso/errors.hpp"
#include "aniso/sparse.hpp"

namespace aniso {

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients. Stops once the true residual
/// satisfies |Ax - b| <= rel_tol |b|.
inline CgResult cg_solve(const SparseSpdMatrix& a, std::span<const double> b, double rel_tol, int max_iter) {
  const int n = a.size();
  CgResult out;
  out.x.assign(static_cast<std::size_t>(n), 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return out;

  std::vector<double> inv_diag = a.diagonal();
  for (double& d : inv_diag) {
    if (!(d > 0.0)) throw NonpositiveDiagonal("Jacobi preconditioner needs a positive diagonal");
    d = 1.0 / d;
  }

  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(n), p(n), q(n);
  auto restart = [&] {
    a.multiply(out.x, q);
    for (int i = 0; i < n; ++i) r[i] = b[i] - q[i];
    for (int i = 0; i < n; ++i) p[i] = z[i] = inv_diag[i] * r[i];
    return dot(r, z);
  };
  double rz = restart();
  double rnorm = norm2(r);
  while (rnorm > rel_tol * bnorm) {
    if (out.iterations >= max_iter) {
      std::ostringstream os;
      os << "no convergence after " << max_iter << " iterations, relative residual " << rnorm / bnorm;
      throw SolverDivergence(os.str());
    }
    ++out.iterations;
    a.multiply(p, q);
    const double alpha = rz / dot(p, q);
    for (int i = 0; i < n; ++i) {
      out.x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    rnorm = norm2(r);
    if (rnorm <= rel_tol * bnorm) {
      // Confirm with the true residual; the recurrence drifts on hard systems.
      rz = restart();
      rnorm = norm2(r);
      continue;
    }
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  out.relative_residual = rnorm / bnorm;
  return out;
}

/// D^{-1/2} A D^{-1/2} with D = diag(A).
inline SparseSpdMatrix diagonal_scale(const SparseSpdMatrix& a) {
  std::vector<double> s = a.diagonal();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0.0)) throw NonpositiveDiagonal("row " + std::to_string(i));
    s[i] = 1.0 / std::sqrt(s[i]);
  }
  SparseSpdMatrix out = a;
  auto vals = out.values();
  const auto rows = out.row_ptr();
  const auto cols = out.cols();
  for (int i = 0; i < out.size(); ++i)
    for (int k = rows[i]; k < rows[i + 1]; ++k) vals[k] = vals[k] * s[i] * s[cols[k]];
  return out;
}

struct LanczosResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

// Reproducible start vector in [-1, 1)^n.
inline std::vector<double> seeded_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
  return v;
}

}  // namespace detail

/// Largest eigenvalue of a symmetric operator by Lanczos with full
/// reorthogonalization. Converged when the Ritz residual r satisfies
/// r <= tol*theta or r^2/gap <= tol*theta.
template <class Apply>
LanczosResult lanczos_largest(Apply&& apply, int n, double rel_tol, int max_iter, std::uint64_t seed) {
  LanczosResult res;
  const int kmax = std::min(max_iter, n);
  std::vector<std::vector<double>> basis;
  basis.reserve(static_cast<std::size_t>(kmax));
  std::vector<double> alpha, beta;

  std::vector<double> q = detail::seeded_vector(n, seed);
  double qn = norm2(q);
  for (double& x : q) x /= qn;
  std::vector<double> w(static_cast<std::size_t>(n));

  for (int j = 0; j < kmax; ++j) {
    basis.push_back(q);
    apply(std::span<const double>(basis.back()), std::span<double>(w));
    alpha.push_back(dot(basis.back(), w));
    // Two passes of classical Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : basis) {
        const double c = dot(v, w);
        for (int i = 0; i < n; ++i) w[i] -= c * v[i];
      }
    const double b = norm2(w);
    res.iterations = j + 1;

    const int k = j + 1;
    const bool last = (k == kmax) || b == 0.0;
    if (k % 5 == 0 || k < 5 || last) {
      Eigen::VectorXd diag(k), sub(std::max(k - 1, 0));
      for (int i = 0; i < k; ++i) diag[i] = alpha[i];
      for (int i = 0; i + 1 < k; ++i) sub[i] = beta[i];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const double theta = tri.eigenvalues()[k - 1];
      const double resid = b * std::abs(tri.eigenvectors()(k - 1, k - 1));
      const double gap = k > 1 ? theta - tri.eigenvalues()[k - 2] : theta;
      res.value = theta;
      const double scale = std::abs(theta);
      if (resid <= rel_tol * scale || (gap > 0.0 && resid * resid <= rel_tol * scale * gap) ||
          b <= 1e-14 * scale) {
        res.converged = true;
        return res;
      }
    }
    if (last) break;
    beta.push_back(b);
    for (int i = 0; i < n; ++i) q[i] = w[i] / b;
  }
  return res;
}

struct ConditionReport {
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  double kappa = 0.0;
  bool scaled = false;
  int iterations_max = 0;  // Lanczos steps on A
  int iterations_min = 0;  // Lanczos steps on A^{-1}
  bool converged = false;
};

inline constexpr int kLanczosCap = 300;

inline Eigen::SparseMatrix<double> to_eigen(const SparseSpdMatrix& a) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(a.nonzeros());
  const auto rows = a.row_ptr();
  const auto cols = a.cols();
  const auto vals = a.values();
  for (int i = 0; i < a.size(); ++i)
    for (int k = rows[i]; k < rows[i + 1]; ++k) trip.emplace_back(i, cols[k], vals[k]);
  Eigen::SparseMatrix<double> m(a.size(), a.size());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

/// 2-norm condition number: lambda_max by Lanczos on A, lambda_min by
/// Lanczos on A^{-1} applied through a sparse Cholesky factor.
inline ConditionReport condition_number(const SparseSpdMatrix& a, double rel_tol = 1e-6, std::uint64_t seed = 42) {
  const int n = a.size();
  if (n == 0) throw Error("condition number of an empty matrix");

  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> chol;
  chol.compute(to_eigen(a));
  if (chol.info() != Eigen::Success) throw FactorizationFailure("sparse Cholesky broke down; matrix is not SPD");

  const auto hi = lanczos_largest(
      [&a](std::span<const double> x, std::span<double> y) { a.multiply(x, y); }, n, rel_tol, kLanczosCap, seed);
  const auto inv = lanczos_largest(
      [&chol, n](std::span<const double> x, std::span<double> y) {
        const Eigen::Map<const Eigen::VectorXd> xv(x.data(), n);
        Eigen::Map<Eigen::VectorXd>(y.data(), n) = chol.solve(xv);
      },
      n, rel_tol, kLanczosCap, seed + 1);
  if (!(inv.value > 0.0)) throw FactorizationFailure("inverse spectrum is not positive");

  ConditionReport rep;
  rep.lambda_max = hi.value;
  rep.lambda_min = 1.0 / inv.value;
  rep.kappa = rep.lambda_max / rep.lambda_min;
  rep.iterations_max = hi.iterations;
  rep.iterations_min = inv.iterations;
  rep.converged = hi.converged && inv.converged;
  return rep;
}

inline ConditionReport scaled_condition_number(const SparseSpdMatrix& a, double rel_tol = 1e-6, std::uint64_t seed = 42) {
  ConditionReport rep = condition_number(diagonal_scale(a), rel_tol, seed);
  rep.scaled = true;
  return rep;
}

}  // namespace aniso
