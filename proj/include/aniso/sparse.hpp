#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace aniso {

/// Square matrix in compressed sparse row form with sorted column indices.
class CsrMatrix {
 public:
  struct Triplet {
    int row;
    int col;
    double value;
  };

  CsrMatrix() = default;

  /// Duplicates are summed in input order, so the result is bitwise
  /// reproducible for a fixed triplet order.
  static CsrMatrix from_triplets(int n, std::vector<Triplet> triplets) {
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m;
    m.n_ = n;
    m.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (std::size_t i = 0; i < triplets.size();) {
      const int r = triplets[i].row;
      const int c = triplets[i].col;
      double sum = 0.0;
      for (; i < triplets.size() && triplets[i].row == r && triplets[i].col == c; ++i) sum += triplets[i].value;
      m.cols_.push_back(c);
      m.vals_.push_back(sum);
      ++m.row_ptr_[r + 1];
    }
    std::partial_sum(m.row_ptr_.begin(), m.row_ptr_.end(), m.row_ptr_.begin());
    return m;
  }

  static CsrMatrix identity(int n) {
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
    return from_triplets(n, std::move(t));
  }

  int size() const { return n_; }
  std::size_t nonzeros() const { return vals_.size(); }
  std::span<const int> row_ptr() const { return row_ptr_; }
  std::span<const int> cols() const { return cols_; }
  std::span<const double> values() const { return vals_; }
  std::span<double> values() { return vals_; }

  double at(int i, int j) const {
    const auto first = cols_.begin() + row_ptr_[i];
    const auto last = cols_.begin() + row_ptr_[i + 1];
    const auto it = std::lower_bound(first, last, j);
    return (it != last && *it == j) ? vals_[static_cast<std::size_t>(it - cols_.begin())] : 0.0;
  }

  std::vector<double> diagonal() const {
    std::vector<double> d(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < n_; ++i) d[i] = at(i, i);
    return d;
  }

  void multiply(std::span<const double> x, std::span<double> y) const {
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += vals_[k] * x[cols_[k]];
      y[i] = s;
    }
  }

  std::vector<double> operator*(std::span<const double> x) const {
    std::vector<double> y(static_cast<std::size_t>(n_));
    multiply(x, y);
    return y;
  }

  /// Largest |A_ij - A_ji| relative to the largest |A_ij|.
  double symmetry_defect() const {
    double worst = 0.0;
    double scale = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        scale = std::max(scale, std::abs(vals_[k]));
        worst = std::max(worst, std::abs(vals_[k] - at(cols_[k], i)));
      }
    return scale > 0.0 ? worst / scale : 0.0;
  }

 private:
  int n_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> cols_;
  std::vector<double> vals_;
};

/// Stiffness operators of this library are symmetric positive definite.
using SparseSpdMatrix = CsrMatrix;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace aniso
