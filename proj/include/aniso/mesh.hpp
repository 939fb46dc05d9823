#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <stdexcept>
#include <utility>
#include <vector>

#include "aniso/errors.hpp"
#include "aniso/tensor.hpp"

namespace aniso {

inline constexpr double kGeomTol = 1e-12;

/// Closed counterclockwise polygon. Segment i runs from corner i to corner i+1.
class Polygon {
 public:
  Polygon() = default;
  explicit Polygon(std::vector<Vec2> corners) : corners_(std::move(corners)) {}

  const std::vector<Vec2>& corners() const { return corners_; }
  int num_segments() const { return static_cast<int>(corners_.size()); }
  Vec2 segment_start(int s) const { return corners_[s]; }
  Vec2 segment_end(int s) const { return corners_[(s + 1) % corners_.size()]; }

  double area() const {
    double a2 = 0.0;
    for (std::size_t i = 0; i < corners_.size(); ++i)
      a2 += cross(corners_[i], corners_[(i + 1) % corners_.size()]);
    return 0.5 * a2;
  }

  /// Parameter of the projection of p onto segment s, in [0,1] on the segment.
  double segment_param(int s, const Vec2& p) const {
    const Vec2 a = segment_start(s);
    const Vec2 d = segment_end(s) - a;
    return dot(p - a, d) / dot(d, d);
  }

  Vec2 segment_point(int s, double t) const {
    return segment_start(s) + t * (segment_end(s) - segment_start(s));
  }

  bool on_segment(int s, const Vec2& p, double tol = kGeomTol) const {
    const Vec2 a = segment_start(s);
    const Vec2 d = segment_end(s) - a;
    const double len = norm(d);
    const double t = segment_param(s, p);
    if (t * len < -tol || (t - 1.0) * len > tol) return false;
    return std::abs(cross(d, p - a)) / len <= tol;
  }

  /// Segment containing both points, or -1.
  int segment_containing(const Vec2& p, const Vec2& q, double tol = kGeomTol) const {
    for (int s = 0; s < num_segments(); ++s)
      if (on_segment(s, p, tol) && on_segment(s, q, tol)) return s;
    return -1;
  }

  /// Index of the corner at p, or -1.
  int corner_at(const Vec2& p, double tol = kGeomTol) const {
    for (int c = 0; c < num_segments(); ++c)
      if (norm(p - corners_[c]) <= tol) return c;
    return -1;
  }

  bool operator==(const Polygon&) const = default;

 private:
  std::vector<Vec2> corners_;
};

inline Polygon lshape_domain() {
  // (-1,1)^2 minus [0,1) x (-1,0]; the reentrant corner is corner 2.
  return Polygon({{-1.0, -1.0}, {0.0, -1.0}, {0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {-1.0, 1.0}});
}

inline Polygon unit_square_domain() { return Polygon({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}); }

enum class BoundaryKind { interior, segment, corner };

struct BoundaryTag {
  BoundaryKind kind = BoundaryKind::interior;
  int index = -1;  // segment id or corner id

  static constexpr BoundaryTag interior() { return {}; }
  static constexpr BoundaryTag segment(int s) { return {BoundaryKind::segment, s}; }
  static constexpr BoundaryTag corner(int c) { return {BoundaryKind::corner, c}; }
  constexpr bool is_boundary() const { return kind != BoundaryKind::interior; }
  friend constexpr bool operator==(const BoundaryTag&, const BoundaryTag&) = default;
};

struct Vertex {
  Vec2 pos;
  BoundaryTag tag;
};

inline constexpr int kNoNeighbor = -1;

/// Counterclockwise vertex triple; neighbors[i] lies across the edge opposite vertex i.
struct Triangle {
  std::array<int, 3> v{};
  std::array<int, 3> neighbors{kNoNeighbor, kNoNeighbor, kNoNeighbor};
};

namespace detail {

inline std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace detail

class Mesh {
 public:
  Mesh() = default;
  Mesh(Polygon domain, std::vector<Vertex> vertices, const std::vector<std::array<int, 3>>& triangles)
      : domain_(std::move(domain)), vertices_(std::move(vertices)) {
    triangles_.reserve(triangles.size());
    for (const auto& t : triangles) triangles_.push_back(Triangle{t, {kNoNeighbor, kNoNeighbor, kNoNeighbor}});
    link_neighbors();
  }

  const Polygon& domain() const { return domain_; }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }

  const Vertex& vertex(int i) const { return vertices_[i]; }
  const Triangle& triangle(int t) const { return triangles_[t]; }
  Vec2 point(int t, int local) const { return vertices_[triangles_[t].v[local]].pos; }

  std::size_t num_interior_vertices() const {
    return static_cast<std::size_t>(std::count_if(vertices_.begin(), vertices_.end(),
                                                  [](const Vertex& v) { return !v.tag.is_boundary(); }));
  }

  double signed_area(int t) const { return 0.5 * signed_area2(point(t, 0), point(t, 1), point(t, 2)); }

  double total_area() const {
    double a = 0.0;
    for (std::size_t t = 0; t < triangles_.size(); ++t) a += signed_area(static_cast<int>(t));
    return a;
  }

 private:
  void link_neighbors() {
    struct HalfEdge {
      std::uint64_t key;
      int tri;
      int local;
    };
    std::vector<HalfEdge> half;
    half.reserve(3 * triangles_.size());
    for (std::size_t t = 0; t < triangles_.size(); ++t)
      for (int i = 0; i < 3; ++i) {
        const auto& v = triangles_[t].v;
        half.push_back({detail::edge_key(v[(i + 1) % 3], v[(i + 2) % 3]), static_cast<int>(t), i});
      }
    std::sort(half.begin(), half.end(), [](const HalfEdge& a, const HalfEdge& b) {
      return a.key != b.key ? a.key < b.key : a.tri < b.tri;
    });
    for (std::size_t i = 0; i + 1 < half.size(); ++i) {
      if (half[i].key != half[i + 1].key) continue;
      // Only exact pairs are linked; a nonmanifold edge keeps no neighbors.
      const bool lone_pair = (i == 0 || half[i - 1].key != half[i].key) &&
                             (i + 2 >= half.size() || half[i + 2].key != half[i].key);
      if (lone_pair) {
        triangles_[half[i].tri].neighbors[half[i].local] = half[i + 1].tri;
        triangles_[half[i + 1].tri].neighbors[half[i + 1].local] = half[i].tri;
      }
    }
  }

  Polygon domain_;
  std::vector<Vertex> vertices_;
  std::vector<Triangle> triangles_;
};

/// Geometry of one element: area and gradients of the barycentric coordinates.
struct ElementGeometry {
  double area = 0.0;
  std::array<Vec2, 3> grad_lambda;
};

inline ElementGeometry element_geometry(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
  const double a2 = signed_area2(p0, p1, p2);
  const double longest2 = std::max({dot(p1 - p0, p1 - p0), dot(p2 - p1, p2 - p1), dot(p0 - p2, p0 - p2)});
  if (!(std::abs(a2) > 2e-14 * longest2)) {
    std::ostringstream os;
    os << "area " << 0.5 * a2 << " at (" << p0.x << ", " << p0.y << ")";
    throw DegenerateElement(os.str());
  }
  ElementGeometry g;
  g.area = 0.5 * std::abs(a2);
  g.grad_lambda[0] = Vec2{p1.y - p2.y, p2.x - p1.x} * (1.0 / a2);
  g.grad_lambda[1] = Vec2{p2.y - p0.y, p0.x - p2.x} * (1.0 / a2);
  g.grad_lambda[2] = Vec2{p0.y - p1.y, p1.x - p0.x} * (1.0 / a2);
  return g;
}

inline ElementGeometry element_geometry(const Mesh& m, int t) {
  return element_geometry(m.point(t, 0), m.point(t, 1), m.point(t, 2));
}

/// Longest edge over shortest altitude.
inline double aspect_ratio(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
  const double longest2 = std::max({dot(p1 - p0, p1 - p0), dot(p2 - p1, p2 - p1), dot(p0 - p2, p0 - p2)});
  const double area = 0.5 * std::abs(signed_area2(p0, p1, p2));
  if (!(area > 1e-14 * longest2)) {
    std::ostringstream os;
    os << "area " << area << " vs longest edge^2 " << longest2;
    throw DegenerateElement(os.str());
  }
  // shortest altitude = 2 area / longest
  return longest2 / (2.0 * area);
}

inline double aspect_ratio(const Mesh& m, int t) { return aspect_ratio(m.point(t, 0), m.point(t, 1), m.point(t, 2)); }

inline double max_aspect_ratio(const Mesh& m) {
  double worst = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) worst = std::max(worst, aspect_ratio(m, static_cast<int>(t)));
  return worst;
}

/// Canonical sorted edge table derived from a mesh.
struct EdgeTable {
  std::vector<std::array<int, 2>> edges;       // (a, b) with a < b, sorted
  std::vector<std::array<int, 3>> tri_edges;   // edge opposite local vertex i
  std::vector<std::uint8_t> edge_tri_count;

  std::size_t size() const { return edges.size(); }
  bool is_boundary(std::size_t e) const { return edge_tri_count[e] == 1; }
};

inline EdgeTable build_edge_table(const Mesh& m) {
  struct Entry {
    std::uint64_t key;
    int tri;
    int local;
  };
  std::vector<Entry> entries;
  entries.reserve(3 * m.num_triangles());
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& v = m.triangle(static_cast<int>(t)).v;
    for (int i = 0; i < 3; ++i)
      entries.push_back({detail::edge_key(v[(i + 1) % 3], v[(i + 2) % 3]), static_cast<int>(t), i});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.key != b.key ? a.key < b.key : a.tri < b.tri;
  });
  EdgeTable table;
  table.tri_edges.resize(m.num_triangles());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i == 0 || entries[i].key != entries[i - 1].key) {
      table.edges.push_back({static_cast<int>(entries[i].key >> 32), static_cast<int>(entries[i].key & 0xffffffffu)});
      table.edge_tri_count.push_back(0);
    }
    table.tri_edges[entries[i].tri][entries[i].local] = static_cast<int>(table.edges.size() - 1);
    ++table.edge_tri_count.back();
  }
  return table;
}

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind {
  non_finite_position,
  invalid_index,
  orientation,
  nonmanifold_edge,
  hanging_node,
  neighbor_asymmetry,
  boundary_edge_off_domain,
  tag_mismatch,
  area_mismatch,
};

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::non_finite_position: return "non-finite-position";
    case ViolationKind::invalid_index: return "invalid-index";
    case ViolationKind::orientation: return "orientation";
    case ViolationKind::nonmanifold_edge: return "nonmanifold-edge";
    case ViolationKind::hanging_node: return "hanging-node";
    case ViolationKind::neighbor_asymmetry: return "neighbor-asymmetry";
    case ViolationKind::boundary_edge_off_domain: return "boundary-edge-off-domain";
    case ViolationKind::tag_mismatch: return "tag-mismatch";
    case ViolationKind::area_mismatch: return "area-mismatch";
  }
  return "unknown";
}

struct Violation {
  ViolationKind kind;
  std::vector<int> triangles;
  std::vector<int> vertices;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::size_t count(ViolationKind k) const {
    return static_cast<std::size_t>(
        std::count_if(violations.begin(), violations.end(), [k](const Violation& v) { return v.kind == k; }));
  }
};

namespace detail {

// Strictly inside the open segment (a, b).
inline bool strictly_inside_segment(const Vec2& a, const Vec2& b, const Vec2& p, double tol) {
  const Vec2 d = b - a;
  const double len = norm(d);
  if (std::abs(cross(d, p - a)) / len > tol) return false;
  const double t = dot(p - a, d) / (len * len);
  return t * len > tol && (1.0 - t) * len > tol;
}

inline bool on_closed_segment(const Vec2& a, const Vec2& b, const Vec2& p, double tol) {
  const Vec2 d = b - a;
  const double len = norm(d);
  if (std::abs(cross(d, p - a)) / len > tol) return false;
  const double t = dot(p - a, d) / (len * len);
  return t * len >= -tol && (1.0 - t) * len >= -tol;
}

}  // namespace detail

/// Empty report iff every mesh invariant holds.
inline ValidationReport validate(const Mesh& m) {
  ValidationReport report;
  auto add = [&](ViolationKind k, std::vector<int> tris, std::vector<int> verts, std::string msg) {
    report.violations.push_back({k, std::move(tris), std::move(verts), std::move(msg)});
  };
  const int nv = static_cast<int>(m.num_vertices());
  const int nt = static_cast<int>(m.num_triangles());
  const Polygon& dom = m.domain();

  for (int i = 0; i < nv; ++i) {
    const Vec2 p = m.vertex(i).pos;
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) add(ViolationKind::non_finite_position, {}, {i}, "vertex position is not finite");
  }
  for (int t = 0; t < nt; ++t)
    for (int vid : m.triangle(t).v)
      if (vid < 0 || vid >= nv) add(ViolationKind::invalid_index, {t}, {vid}, "triangle references a missing vertex");
  if (!report.ok()) return report;

  for (int t = 0; t < nt; ++t) {
    const auto& v = m.triangle(t).v;
    if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2]) {
      add(ViolationKind::invalid_index, {t}, {v[0], v[1], v[2]}, "repeated vertex in triangle");
    } else if (!(m.signed_area(t) > 0.0)) {
      add(ViolationKind::orientation, {t}, {v[0], v[1], v[2]}, "triangle is not counterclockwise");
    }
  }

  for (int t = 0; t < nt; ++t)
    for (int i = 0; i < 3; ++i) {
      const int n = m.triangle(t).neighbors[i];
      if (n == kNoNeighbor) continue;
      const auto& back = m.triangle(n).neighbors;
      if (std::find(back.begin(), back.end(), t) == back.end())
        add(ViolationKind::neighbor_asymmetry, {t, n}, {}, "neighbor relation is not symmetric");
    }

  const EdgeTable edges = build_edge_table(m);
  std::vector<std::size_t> one_sided;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges.edge_tri_count[e] > 2)
      add(ViolationKind::nonmanifold_edge, {}, {edges.edges[e][0], edges.edges[e][1]}, "edge shared by more than two triangles");
    else if (edges.edge_tri_count[e] == 1)
      one_sided.push_back(e);
  }

  // Hanging nodes: a one-sided edge with a vertex strictly inside it.
  std::vector<int> boundary_verts;
  for (std::size_t e : one_sided) {
    boundary_verts.push_back(edges.edges[e][0]);
    boundary_verts.push_back(edges.edges[e][1]);
  }
  std::sort(boundary_verts.begin(), boundary_verts.end());
  boundary_verts.erase(std::unique(boundary_verts.begin(), boundary_verts.end()), boundary_verts.end());

  std::vector<std::size_t> hanging_edges;
  for (std::size_t e : one_sided) {
    const Vec2 a = m.vertex(edges.edges[e][0]).pos;
    const Vec2 b = m.vertex(edges.edges[e][1]).pos;
    std::vector<int> inside;
    for (int vid : boundary_verts)
      if (detail::strictly_inside_segment(a, b, m.vertex(vid).pos, kGeomTol)) inside.push_back(vid);
    if (!inside.empty()) {
      hanging_edges.push_back(e);
      inside.insert(inside.begin(), {edges.edges[e][0], edges.edges[e][1]});
      add(ViolationKind::hanging_node, {}, inside, "vertex lies inside an edge without splitting it");
    }
  }

  std::vector<char> is_boundary_vertex(nv, 0);
  for (std::size_t e : one_sided) {
    if (std::find(hanging_edges.begin(), hanging_edges.end(), e) != hanging_edges.end()) continue;
    const int ia = edges.edges[e][0];
    const int ib = edges.edges[e][1];
    const Vec2 a = m.vertex(ia).pos;
    const Vec2 b = m.vertex(ib).pos;
    const bool covered = std::any_of(hanging_edges.begin(), hanging_edges.end(), [&](std::size_t h) {
      const Vec2 ha = m.vertex(edges.edges[h][0]).pos;
      const Vec2 hb = m.vertex(edges.edges[h][1]).pos;
      return detail::on_closed_segment(ha, hb, a, kGeomTol) && detail::on_closed_segment(ha, hb, b, kGeomTol);
    });
    if (covered) continue;
    if (dom.segment_containing(a, b) < 0) {
      add(ViolationKind::boundary_edge_off_domain, {}, {ia, ib}, "boundary edge does not lie on a domain segment");
    } else {
      is_boundary_vertex[ia] = is_boundary_vertex[ib] = 1;
    }
  }

  for (int i = 0; i < nv; ++i) {
    const Vertex& v = m.vertex(i);
    switch (v.tag.kind) {
      case BoundaryKind::corner:
        if (v.tag.index < 0 || v.tag.index >= dom.num_segments() || norm(v.pos - dom.corners()[v.tag.index]) > kGeomTol)
          add(ViolationKind::tag_mismatch, {}, {i}, "corner tag does not match a domain corner");
        break;
      case BoundaryKind::segment:
        if (v.tag.index < 0 || v.tag.index >= dom.num_segments() || !dom.on_segment(v.tag.index, v.pos))
          add(ViolationKind::tag_mismatch, {}, {i}, "segment tag does not match vertex position");
        break;
      case BoundaryKind::interior:
        if (is_boundary_vertex[i]) add(ViolationKind::tag_mismatch, {}, {i}, "interior-tagged vertex on the boundary");
        break;
    }
  }

  if (report.ok()) {
    const double expected = dom.area();
    const double actual = m.total_area();
    if (std::abs(actual - expected) > 1e-10 * std::max(1.0, std::abs(expected))) {
      std::ostringstream os;
      os << "element areas sum to " << actual << ", domain area is " << expected;
      add(ViolationKind::area_mismatch, {}, {}, os.str());
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Mesh builders

/// Six triangles from the three unit squares of the L-shape.
inline Mesh initial_lshape_mesh() {
  std::vector<Vertex> v = {
      {{-1.0, -1.0}, BoundaryTag::corner(0)}, {{0.0, -1.0}, BoundaryTag::corner(1)},
      {{0.0, 0.0}, BoundaryTag::corner(2)},   {{1.0, 0.0}, BoundaryTag::corner(3)},
      {{1.0, 1.0}, BoundaryTag::corner(4)},   {{-1.0, 1.0}, BoundaryTag::corner(5)},
      {{-1.0, 0.0}, BoundaryTag::segment(5)}, {{0.0, 1.0}, BoundaryTag::segment(4)},
  };
  return Mesh(lshape_domain(), std::move(v), {{0, 1, 2}, {0, 2, 6}, {6, 2, 7}, {6, 7, 5}, {2, 3, 4}, {2, 4, 7}});
}

/// Tag for a point known to be a vertex of a mesh over `dom`.
inline BoundaryTag classify_point(const Polygon& dom, const Vec2& p) {
  if (const int c = dom.corner_at(p); c >= 0) return BoundaryTag::corner(c);
  for (int s = 0; s < dom.num_segments(); ++s)
    if (dom.on_segment(s, p)) return BoundaryTag::segment(s);
  return BoundaryTag::interior();
}

/// n x n grid of the unit square, every cell split along its rising diagonal.
inline Mesh structured_square_mesh(int n) {
  const Polygon dom = unit_square_domain();
  std::vector<Vertex> verts;
  verts.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      // Boundary rows and columns are exact so classification is exact too.
      const Vec2 p{static_cast<double>(i) / n, static_cast<double>(j) / n};
      verts.push_back({p, classify_point(dom, p)});
    }
  std::vector<std::array<int, 3>> tris;
  tris.reserve(static_cast<std::size_t>(2 * n * n));
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return Mesh(dom, std::move(verts), tris);
}

inline std::pair<Vec2, Vec2> bounding_box(const Polygon& dom) {
  Vec2 lo = dom.corners().front();
  Vec2 hi = lo;
  for (const Vec2& c : dom.corners()) {
    lo = {std::min(lo.x, c.x), std::min(lo.y, c.y)};
    hi = {std::max(hi.x, c.x), std::max(hi.y, c.y)};
  }
  return {lo, hi};
}

/// True when dom is rectilinear and its corners are nodes of the nx x ny grid
/// over its bounding box.
inline bool grid_aligned(const Polygon& dom, int nx, int ny) {
  if (nx < 1 || ny < 1) return false;
  const auto [lo, hi] = bounding_box(dom);
  for (int s = 0; s < dom.num_segments(); ++s) {
    const Vec2 d = dom.segment_end(s) - dom.segment_start(s);
    if (d.x != 0.0 && d.y != 0.0) return false;
  }
  for (const Vec2& c : dom.corners()) {
    const double fi = (c.x - lo.x) / (hi.x - lo.x) * nx;
    const double fj = (c.y - lo.y) / (hi.y - lo.y) * ny;
    if (std::abs(fi - std::round(fi)) > 1e-9 || std::abs(fj - std::round(fj)) > 1e-9) return false;
  }
  return true;
}

/// Grid of nx x ny cells over the bounding box of a rectilinear polygon,
/// keeping cells inside it, each split along its rising diagonal.
inline Mesh structured_polygon_mesh(const Polygon& dom, int nx, int ny) {
  if (!grid_aligned(dom, nx, ny)) throw std::invalid_argument("polygon is not aligned with the grid");
  const auto [lo, hi] = bounding_box(dom);
  const double hx = (hi.x - lo.x) / nx;
  const double hy = (hi.y - lo.y) / ny;
  auto node = [&](int i, int j) {
    // Pin the last row/column so the far boundary is exact.
    return Vec2{i == nx ? hi.x : lo.x + i * hx, j == ny ? hi.y : lo.y + j * hy};
  };
  auto inside = [&dom](const Vec2& p) {
    bool in = false;
    const auto& c = dom.corners();
    for (std::size_t i = 0, j = c.size() - 1; i < c.size(); j = i++)
      if ((c[i].y > p.y) != (c[j].y > p.y) && p.x < (c[j].x - c[i].x) * (p.y - c[i].y) / (c[j].y - c[i].y) + c[i].x)
        in = !in;
    return in;
  };

  std::vector<int> id(static_cast<std::size_t>((nx + 1) * (ny + 1)), -1);
  std::vector<Vertex> verts;
  std::vector<std::array<int, 3>> tris;
  auto vid = [&](int i, int j) {
    int& slot = id[static_cast<std::size_t>(j * (nx + 1) + i)];
    if (slot < 0) {
      slot = static_cast<int>(verts.size());
      const Vec2 p = node(i, j);
      if (const int c = dom.corner_at(p, 1e-9); c >= 0) {
        verts.push_back({dom.corners()[c], BoundaryTag::corner(c)});
        return slot;
      }
      for (int s = 0; s < dom.num_segments(); ++s)
        if (dom.on_segment(s, p, 1e-9)) {
          verts.push_back({dom.segment_point(s, dom.segment_param(s, p)), BoundaryTag::segment(s)});
          return slot;
        }
      verts.push_back({p, BoundaryTag::interior()});
    }
    return slot;
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!inside(0.5 * (node(i, j) + node(i + 1, j + 1)))) continue;
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      tris.push_back({a, b, c});
      tris.push_back({a, c, d});
    }
  return Mesh(dom, std::move(verts), tris);
}

/// Red refinement: every triangle split into four congruent children.
inline Mesh refine_uniform(const Mesh& m) {
  const EdgeTable edges = build_edge_table(m);
  std::vector<Vertex> verts = m.vertices();
  const int base = static_cast<int>(verts.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Vec2 a = m.vertex(edges.edges[e][0]).pos;
    const Vec2 b = m.vertex(edges.edges[e][1]).pos;
    const Vec2 mid = 0.5 * (a + b);
    BoundaryTag tag = BoundaryTag::interior();
    if (edges.is_boundary(e)) {
      const int s = m.domain().segment_containing(a, b);
      if (s >= 0) tag = BoundaryTag::segment(s);
    }
    verts.push_back({mid, tag});
  }
  std::vector<std::array<int, 3>> tris;
  tris.reserve(4 * m.num_triangles());
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& v = m.triangle(static_cast<int>(t)).v;
    const auto& te = edges.tri_edges[t];
    const int m0 = base + te[0];  // opposite v0: between v1 and v2
    const int m1 = base + te[1];
    const int m2 = base + te[2];
    tris.push_back({v[0], m2, m1});
    tris.push_back({m2, v[1], m0});
    tris.push_back({m1, m0, v[2]});
    tris.push_back({m0, m1, m2});
  }
  return Mesh(m.domain(), std::move(verts), tris);
}

}  // namespace aniso
