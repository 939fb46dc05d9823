#pragma once

#include <algorithm>
#include <cmath>

namespace aniso {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

/// Twice the signed area of (a, b, c); positive for counterclockwise order.
constexpr double signed_area2(const Vec2& a, const Vec2& b, const Vec2& c) {
  return cross(b - a, c - a);
}

/// Spectral data of a symmetric 2x2 tensor: `large >= small`, `angle` is the
/// direction of the eigenvector belonging to `large`.
struct SymEigen {
  double large = 0.0;
  double small = 0.0;
  double angle = 0.0;

  Vec2 large_dir() const { return {std::cos(angle), std::sin(angle)}; }
  Vec2 small_dir() const { return {-std::sin(angle), std::cos(angle)}; }
};

/// Symmetric 2x2 tensor stored by its three independent entries.
struct SymTensor2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  static constexpr SymTensor2 identity(double s = 1.0) { return {s, 0.0, s}; }
  static constexpr SymTensor2 outer(const Vec2& a, const Vec2& b) {
    // symmetrized: (a b^T + b a^T) / 2
    return {a.x * b.x, 0.5 * (a.x * b.y + a.y * b.x), a.y * b.y};
  }
  static SymTensor2 from_eigen(double large, double small, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {large * c * c + small * s * s, (large - small) * c * s, large * s * s + small * c * c};
  }

  constexpr double det() const { return xx * yy - xy * xy; }
  constexpr double trace() const { return xx + yy; }
  constexpr Vec2 apply(const Vec2& v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
  constexpr double quad(const Vec2& v) const { return v.x * (xx * v.x + xy * v.y) + v.y * (xy * v.x + yy * v.y); }

  SymEigen eigen() const {
    const double mean = 0.5 * (xx + yy);
    const double radius = std::hypot(0.5 * (xx - yy), xy);
    SymEigen e;
    e.large = mean + radius;
    e.small = mean - radius;
    e.angle = radius > 0.0 ? 0.5 * std::atan2(2.0 * xy, xx - yy) : 0.0;
    return e;
  }

  SymTensor2 inverse() const {
    const double d = det();
    return {yy / d, -xy / d, xx / d};
  }

  constexpr SymTensor2& operator+=(const SymTensor2& o) {
    xx += o.xx;
    xy += o.xy;
    yy += o.yy;
    return *this;
  }
  constexpr SymTensor2& operator-=(const SymTensor2& o) {
    xx -= o.xx;
    xy -= o.xy;
    yy -= o.yy;
    return *this;
  }
  constexpr SymTensor2& operator*=(double s) {
    xx *= s;
    xy *= s;
    yy *= s;
    return *this;
  }
  friend constexpr bool operator==(const SymTensor2&, const SymTensor2&) = default;
};

constexpr SymTensor2 operator+(SymTensor2 a, const SymTensor2& b) { return a += b; }
constexpr SymTensor2 operator-(SymTensor2 a, const SymTensor2& b) { return a -= b; }
constexpr SymTensor2 operator*(SymTensor2 a, double s) { return a *= s; }
constexpr SymTensor2 operator*(double s, SymTensor2 a) { return a *= s; }

/// R T R^T for the rotation by `angle`.
inline SymTensor2 rotated(const SymTensor2& t, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double a = c * t.xx - s * t.xy;  // (R T)_00
  const double b = c * t.xy - s * t.yy;  // (R T)_01
  const double d = s * t.xx + c * t.xy;  // (R T)_10
  const double e = s * t.xy + c * t.yy;  // (R T)_11
  return {a * c - b * s, a * s + b * c, d * s + e * c};
}

/// Cholesky-based SPD test.
constexpr bool is_spd(const SymTensor2& t) { return t.xx > 0.0 && t.det() > 0.0; }

inline double max_abs_entry(const SymTensor2& t) {
  return std::max({std::abs(t.xx), std::abs(t.xy), std::abs(t.yy)});
}

/// Metric intersection by simultaneous reduction: the largest SPD tensor
/// whose unit ball lies inside both unit balls.
inline SymTensor2 intersect(const SymTensor2& a, const SymTensor2& b) {
  // Reduce b against a: with a = L L^T, eigen-decompose L^{-1} b L^{-T}.
  const double l11 = std::sqrt(a.xx);
  const double l21 = a.xy / l11;
  const double l22 = std::sqrt(a.yy - l21 * l21);
  // C = L^{-1} b L^{-T}
  const double i11 = 1.0 / l11;
  const double i21 = -l21 / (l11 * l22);
  const double i22 = 1.0 / l22;
  // L^{-1} = [[i11, 0], [i21, i22]]
  const double c00 = i11 * i11 * b.xx;
  const double c01 = i11 * (i21 * b.xx + i22 * b.xy);
  const double c11 = i21 * i21 * b.xx + 2.0 * i21 * i22 * b.xy + i22 * i22 * b.yy;
  const SymEigen e = SymTensor2{c00, c01, c11}.eigen();
  // In the reduced basis a is the identity, so the intersection is
  // diag(max(1, mu_i)) and maps back through L.
  const SymTensor2 reduced =
      SymTensor2::from_eigen(std::max(1.0, e.large), std::max(1.0, e.small), e.angle);
  // L reduced L^T
  const double m00 = l11 * l11 * reduced.xx;
  const double m01 = l11 * (l21 * reduced.xx + l22 * reduced.xy);
  const double m11 = l21 * l21 * reduced.xx + 2.0 * l21 * l22 * reduced.xy + l22 * l22 * reduced.yy;
  return {m00, m01, m11};
}

}  // namespace aniso
