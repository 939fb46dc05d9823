#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "aniso/mesh.hpp"
#include "aniso/metric.hpp"
#include "aniso/tensor.hpp"

namespace aniso {

/// Controls of the metric-conforming local remesher and the outer loop.
struct AdaptParams {
  double long_threshold = std::numbers::sqrt2;
  double short_threshold = 1.0 / std::numbers::sqrt2;
  int max_local_passes = 30;
  double uniformity_target = 0.95;
  int outer_max_iters = 10;
  double outer_element_tol = 0.05;
  double smoothing_damping = 0.5;
  // A collapse may create edges up to this metric length; later splits fix them.
  double collapse_long_limit = 2.0;
  // Bound on the growth of the metric size along background edges (1 + l ln g).
  // Values <= 1 disable gradation control.
  double gradation = 1.2;
};

/// sqrt(e^T (Ma + Mb)/2 e) with e = b - a.
inline double metric_edge_length(const Vec2& a, const Vec2& b, const SymTensor2& ma, const SymTensor2& mb) {
  const Vec2 e = b - a;
  return std::sqrt(0.5 * (ma.quad(e) + mb.quad(e)));
}

/// Metric shape quality 4 sqrt(3) |K|_M / sum l_M^2, equal to 1 for the
/// metric-equilateral triangle and negative for inverted elements.
inline double metric_quality(const Vec2& p0, const Vec2& p1, const Vec2& p2, const SymTensor2& m0,
                             const SymTensor2& m1, const SymTensor2& m2) {
  const SymTensor2 mean = (1.0 / 3.0) * (m0 + m1 + m2);
  const double area = 0.5 * signed_area2(p0, p1, p2) * std::sqrt(std::max(mean.det(), 0.0));
  const double l2 = mean.quad(p1 - p0) + mean.quad(p2 - p1) + mean.quad(p0 - p2);
  return 4.0 * std::sqrt(3.0) * area / l2;
}

/// Fraction of mesh edges whose metric length lies in [short, long].
inline double m_uniformity(const Mesh& m, std::span<const SymTensor2> vertex_metric, const AdaptParams& params) {
  const EdgeTable edges = build_edge_table(m);
  if (edges.size() == 0) return 1.0;
  std::size_t in_band = 0;
  for (const auto& e : edges.edges) {
    const double l = metric_edge_length(m.vertex(e[0]).pos, m.vertex(e[1]).pos, vertex_metric[e[0]], vertex_metric[e[1]]);
    if (l >= params.short_threshold && l <= params.long_threshold) ++in_band;
  }
  return static_cast<double>(in_band) / static_cast<double>(edges.size());
}

inline double m_uniformity(const Mesh& m, const MetricField& field, const AdaptParams& params) {
  return m_uniformity(m, vertex_metrics(m, field), params);
}

/// Limits the variation of a vertex metric field along the edges of its mesh:
/// M_q <- M_q cap M_p / (1 + l_p(pq) ln g)^2, swept to a fixed point.
inline void limit_gradation(const Mesh& m, std::vector<SymTensor2>& metric, double growth, int max_sweeps = 30) {
  if (!(growth > 1.0)) return;
  const double log_g = std::log(growth);
  const EdgeTable edges = build_edge_table(m);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool changed = false;
    for (const auto& e : edges.edges) {
      for (int dir = 0; dir < 2; ++dir) {
        const int p = e[dir];
        const int q = e[1 - dir];
        const Vec2 d = m.vertex(q).pos - m.vertex(p).pos;
        const double eta = 1.0 + std::sqrt(metric[p].quad(d)) * log_g;
        const SymTensor2 spread = (1.0 / (eta * eta)) * metric[p];
        const SymTensor2 capped = intersect(metric[q], spread);
        if (max_abs_entry(capped - metric[q]) > 1e-6 * max_abs_entry(metric[q])) {
          metric[q] = capped;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
}

/// Piecewise-linear metric over a background mesh with bucketed point location.
class MetricSampler {
 public:
  MetricSampler(Mesh background, std::vector<SymTensor2> vertex_metric)
      : bg_(std::move(background)), metric_(std::move(vertex_metric)) {
    lo_ = hi_ = bg_.vertex(0).pos;
    for (const Vertex& v : bg_.vertices()) {
      lo_.x = std::min(lo_.x, v.pos.x);
      lo_.y = std::min(lo_.y, v.pos.y);
      hi_.x = std::max(hi_.x, v.pos.x);
      hi_.y = std::max(hi_.y, v.pos.y);
    }
    const double w = std::max(hi_.x - lo_.x, 1e-300);
    const double h = std::max(hi_.y - lo_.y, 1e-300);
    const double cells = std::max<double>(1.0, static_cast<double>(bg_.num_triangles()));
    nx_ = std::clamp(static_cast<int>(std::sqrt(cells * w / h)), 1, 4096);
    ny_ = std::clamp(static_cast<int>(std::sqrt(cells * h / w)), 1, 4096);
    cell_w_ = w / nx_;
    cell_h_ = h / ny_;

    std::vector<std::pair<int, int>> entries;  // (cell, triangle)
    for (std::size_t t = 0; t < bg_.num_triangles(); ++t) {
      const int ti = static_cast<int>(t);
      Vec2 a = bg_.point(ti, 0);
      Vec2 b = a;
      for (int k = 1; k < 3; ++k) {
        const Vec2 p = bg_.point(ti, k);
        a = {std::min(a.x, p.x), std::min(a.y, p.y)};
        b = {std::max(b.x, p.x), std::max(b.y, p.y)};
      }
      const auto [i0, j0] = cell_of(a);
      const auto [i1, j1] = cell_of(b);
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) entries.emplace_back(j * nx_ + i, ti);
    }
    std::sort(entries.begin(), entries.end());
    cell_start_.assign(static_cast<std::size_t>(nx_ * ny_) + 1, 0);
    cell_tris_.reserve(entries.size());
    for (const auto& [c, t] : entries) {
      ++cell_start_[c + 1];
      cell_tris_.push_back(t);
    }
    for (std::size_t c = 1; c < cell_start_.size(); ++c) cell_start_[c] += cell_start_[c - 1];
  }

  SymTensor2 operator()(const Vec2& p) const {
    const auto [ci, cj] = cell_of(p);
    int best = -1;
    std::array<double, 3> best_bary{};
    double best_score = -1e300;
    for (int ring = 0; best < 0 || (best_score < -1e-12 && ring <= 2); ++ring) {
      for (int j = cj - ring; j <= cj + ring; ++j)
        for (int i = ci - ring; i <= ci + ring; ++i) {
          if (i < 0 || j < 0 || i >= nx_ || j >= ny_) continue;
          if (ring > 0 && std::abs(i - ci) != ring && std::abs(j - cj) != ring) continue;
          const int c = j * nx_ + i;
          for (int k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
            const int t = cell_tris_[k];
            const auto bary = barycentric(t, p);
            const double score = std::min({bary[0], bary[1], bary[2]});
            if (score > best_score) {
              best_score = score;
              best = t;
              best_bary = bary;
            }
          }
        }
      if (ring > std::max(nx_, ny_)) break;
    }
    double sum = 0.0;
    for (double& b : best_bary) {
      b = std::max(b, 0.0);
      sum += b;
    }
    const auto& v = bg_.triangle(best).v;
    return (best_bary[0] / sum) * metric_[v[0]] + (best_bary[1] / sum) * metric_[v[1]] +
           (best_bary[2] / sum) * metric_[v[2]];
  }

  const Mesh& background() const { return bg_; }
  const std::vector<SymTensor2>& vertex_metric() const { return metric_; }

 private:
  std::pair<int, int> cell_of(const Vec2& p) const {
    const int i = std::clamp(static_cast<int>((p.x - lo_.x) / cell_w_), 0, nx_ - 1);
    const int j = std::clamp(static_cast<int>((p.y - lo_.y) / cell_h_), 0, ny_ - 1);
    return {i, j};
  }

  std::array<double, 3> barycentric(int t, const Vec2& p) const {
    const Vec2 a = bg_.point(t, 0);
    const Vec2 b = bg_.point(t, 1);
    const Vec2 c = bg_.point(t, 2);
    const double a2 = signed_area2(a, b, c);
    const double l1 = signed_area2(p, c, a) / a2;
    const double l2 = signed_area2(p, a, b) / a2;
    return {1.0 - l1 - l2, l1, l2};
  }

  Mesh bg_;
  std::vector<SymTensor2> metric_;
  Vec2 lo_, hi_;
  int nx_ = 1, ny_ = 1;
  double cell_w_ = 1.0, cell_h_ = 1.0;
  std::vector<int> cell_start_;
  std::vector<int> cell_tris_;
};

struct AdaptResult {
  Mesh mesh;
  bool stalled = false;  // a pass changed nothing while uniformity was below target
  int passes = 0;
  double uniformity = 0.0;
  std::size_t splits = 0, collapses = 0, flips = 0, moves = 0;
};

namespace detail {

/// Mutable triangulation driven by local operations.
class Remesher {
 public:
  Remesher(const Mesh& m, const MetricSampler& sampler, double scale, const AdaptParams& params)
      : dom_(m.domain()), sampler_(sampler), scale_(scale), params_(params) {
    for (const Vertex& v : m.vertices()) {
      pos_.push_back(v.pos);
      tag_.push_back(v.tag);
      met_.push_back(sample(v.pos));
      valive_.push_back(1);
    }
    v2t_.resize(pos_.size());
    for (const Triangle& t : m.triangles()) add_triangle(t.v);
  }

  AdaptResult run() {
    AdaptResult res;
    for (int pass = 0; pass < params_.max_local_passes; ++pass) {
      const std::size_t s = split_pass();
      const std::size_t c = collapse_pass();
      const std::size_t f = flip_pass() + cleanup_pass();
      const std::size_t mv = smooth_pass();
      res.splits += s;
      res.collapses += c;
      res.flips += f;
      res.moves += mv;
      res.passes = pass + 1;
      if (s == 0 && c == 0) {
        if (f == 0 && mv == 0 && uniformity() < params_.uniformity_target) res.stalled = true;
        break;
      }
    }
    for (int extra = 0; extra < 3; ++extra) {
      const std::size_t f = flip_pass() + cleanup_pass();
      const std::size_t mv = smooth_pass();
      res.flips += f;
      res.moves += mv;
      if (f == 0 && mv == 0) break;
    }
    res.uniformity = uniformity();
    res.mesh = to_mesh();
    return res;
  }

  double uniformity() const {
    std::size_t total = 0;
    std::size_t in_band = 0;
    for (const auto& [a, b] : collect_edges()) {
      const double l = length(a, b);
      ++total;
      if (l >= params_.short_threshold && l <= params_.long_threshold) ++in_band;
    }
    return total == 0 ? 1.0 : static_cast<double>(in_band) / static_cast<double>(total);
  }

 private:
  SymTensor2 sample(const Vec2& p) const { return scale_ * sampler_(p); }

  double length(int a, int b) const { return metric_edge_length(pos_[a], pos_[b], met_[a], met_[b]); }

  double quality(const std::array<int, 3>& t) const {
    return metric_quality(pos_[t[0]], pos_[t[1]], pos_[t[2]], met_[t[0]], met_[t[1]], met_[t[2]]);
  }

  int add_triangle(const std::array<int, 3>& v) {
    const int t = static_cast<int>(tri_.size());
    tri_.push_back(v);
    talive_.push_back(1);
    for (int x : v) v2t_[x].push_back(t);
    return t;
  }

  void unlink(int v, int t) {
    auto& list = v2t_[v];
    list.erase(std::find(list.begin(), list.end(), t));
  }

  static bool contains(const std::array<int, 3>& t, int v) { return t[0] == v || t[1] == v || t[2] == v; }

  // Triangles sharing edge (a, b); returns their number (0..2).
  int edge_triangles(int a, int b, std::array<int, 2>& out) const {
    int n = 0;
    for (int t : v2t_[a])
      if (contains(tri_[t], b)) {
        if (n < 2) out[n] = t;
        ++n;
      }
    return n;
  }

  static int third_vertex(const std::array<int, 3>& t, int a, int b) {
    for (int x : t)
      if (x != a && x != b) return x;
    return -1;
  }

  std::vector<std::pair<int, int>> collect_edges() const {
    std::vector<std::pair<int, int>> edges;
    edges.reserve(3 * tri_.size());
    for (std::size_t t = 0; t < tri_.size(); ++t) {
      if (!talive_[t]) continue;
      for (int i = 0; i < 3; ++i) {
        const int a = tri_[t][i];
        const int b = tri_[t][(i + 1) % 3];
        edges.emplace_back(std::min(a, b), std::max(a, b));
      }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
  }

  struct ScoredEdge {
    double length;
    int a;
    int b;
  };

  // ---- split -------------------------------------------------------------

  std::size_t split_pass() {
    std::vector<ScoredEdge> todo;
    for (const auto& [a, b] : collect_edges()) {
      const double l = length(a, b);
      if (l > params_.long_threshold) todo.push_back({l, a, b});
    }
    std::sort(todo.begin(), todo.end(), [](const ScoredEdge& x, const ScoredEdge& y) {
      return x.length != y.length ? x.length > y.length : std::pair(x.a, x.b) < std::pair(y.a, y.b);
    });
    std::size_t count = 0;
    for (const ScoredEdge& e : todo) count += split(e.a, e.b) ? 1 : 0;
    return count;
  }

  bool split(int a, int b) {
    std::array<int, 2> ts{};
    const int n = edge_triangles(a, b, ts);
    if (n == 0 || n > 2) return false;
    const Vec2 mid = 0.5 * (pos_[a] + pos_[b]);
    BoundaryTag tag = BoundaryTag::interior();
    if (n == 1) {
      const int s = dom_.segment_containing(pos_[a], pos_[b]);
      if (s < 0) return false;
      tag = BoundaryTag::segment(s);
    }
    const int m = static_cast<int>(pos_.size());
    pos_.push_back(mid);
    tag_.push_back(tag);
    met_.push_back(sample(mid));
    valive_.push_back(1);
    v2t_.emplace_back();
    for (int k = 0; k < n; ++k) {
      const int t = ts[k];
      const auto old = tri_[t];
      int r = 0;
      while (old[r] == a || old[r] == b) ++r;
      const int p = old[(r + 1) % 3];
      const int q = old[(r + 2) % 3];
      const int rv = old[r];
      tri_[t] = {p, m, rv};
      v2t_[m].push_back(t);
      unlink(q, t);
      add_triangle({m, q, rv});
    }
    return true;
  }

  // True when splitting (a, b) at its midpoint raises the worst quality of
  // the triangles sharing it.
  bool split_improves(int a, int b) const {
    std::array<int, 2> ts{};
    const int n = edge_triangles(a, b, ts);
    if (n == 0 || n > 2) return false;
    const Vec2 mid = 0.5 * (pos_[a] + pos_[b]);
    const SymTensor2 mm = sample(mid);
    double q_old = 1e300;
    double q_new = 1e300;
    for (int k = 0; k < n; ++k) {
      const auto& t = tri_[ts[k]];
      q_old = std::min(q_old, quality(t));
      const int r = third_vertex(t, a, b);
      for (int end : {a, b}) {
        // Orientation does not matter for the comparison; use |q|.
        const double q = metric_quality(pos_[end], mid, pos_[r], met_[end], mm, met_[r]);
        q_new = std::min(q_new, std::abs(q));
      }
    }
    return q_new > q_old + 1e-6;
  }

  // ---- collapse ----------------------------------------------------------

  std::size_t collapse_pass() {
    std::vector<ScoredEdge> todo;
    for (const auto& [a, b] : collect_edges()) {
      const double l = length(a, b);
      if (l < params_.short_threshold) todo.push_back({l, a, b});
    }
    std::sort(todo.begin(), todo.end(), [](const ScoredEdge& x, const ScoredEdge& y) {
      return x.length != y.length ? x.length < y.length : std::pair(x.a, x.b) < std::pair(y.a, y.b);
    });
    std::vector<char> touched(pos_.size(), 0);
    std::size_t count = 0;
    for (const ScoredEdge& e : todo) {
      if (!valive_[e.a] || !valive_[e.b] || touched[e.a] || touched[e.b]) continue;
      if (length(e.a, e.b) >= params_.short_threshold) continue;
      int kept = -1;
      if (collapse(e.a, e.b))
        kept = e.b;
      else if (collapse(e.b, e.a))
        kept = e.a;
      if (kept < 0) continue;
      ++count;
      touched[kept] = 1;
      for (int t : v2t_[kept])
        for (int x : tri_[t]) touched[x] = 1;
    }
    return count;
  }

  std::vector<int> ring(int v) const {
    std::vector<int> out;
    for (int t : v2t_[v])
      for (int x : tri_[t])
        if (x != v) out.push_back(x);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // Removes vertex `a` by merging it into `b`.
  bool collapse(int a, int b) { return collapse(a, b, 0.5, params_.collapse_long_limit); }

  // Accepts when the worst quality around `a` is at least quality_ratio times
  // its current value and no new edge exceeds max_length.
  bool collapse(int a, int b, double quality_ratio, double max_length) {
    if (tag_[a].kind == BoundaryKind::corner) return false;
    std::array<int, 2> ts{};
    const int n = edge_triangles(a, b, ts);
    if (tag_[a].is_boundary()) {
      if (n != 1) return false;  // a boundary vertex slides only along the boundary
    } else if (n != 2) {
      return false;
    }

    // Link condition: common neighbors are exactly the apexes of the edge triangles.
    const std::vector<int> ra = ring(a);
    const std::vector<int> rb = ring(b);
    std::vector<int> common;
    std::set_intersection(ra.begin(), ra.end(), rb.begin(), rb.end(), std::back_inserter(common));
    if (static_cast<int>(common.size()) != n) return false;

    double q_old = 1e300;
    double q_new = 1e300;
    for (int t : v2t_[a]) {
      q_old = std::min(q_old, quality(tri_[t]));
      if (contains(tri_[t], b)) continue;
      std::array<int, 3> moved = tri_[t];
      for (int& x : moved)
        if (x == a) x = b;
      const double area2 = signed_area2(pos_[moved[0]], pos_[moved[1]], pos_[moved[2]]);
      const double l2 = std::max({dot(pos_[moved[1]] - pos_[moved[0]], pos_[moved[1]] - pos_[moved[0]]),
                                  dot(pos_[moved[2]] - pos_[moved[1]], pos_[moved[2]] - pos_[moved[1]]),
                                  dot(pos_[moved[0]] - pos_[moved[2]], pos_[moved[0]] - pos_[moved[2]])});
      if (!(area2 > 1e-12 * l2)) return false;
      q_new = std::min(q_new, quality(moved));
    }
    if (!(q_new >= quality_ratio * q_old)) return false;
    for (int x : ra)
      if (x != b && length(b, x) > max_length) return false;

    for (int k = 0; k < n; ++k) {
      const int t = ts[k];
      talive_[t] = 0;
      for (int x : tri_[t]) unlink(x, t);
    }
    for (int t : v2t_[a]) {
      for (int& x : tri_[t])
        if (x == a) x = b;
      v2t_[b].push_back(t);
    }
    v2t_[a].clear();
    valive_[a] = 0;
    return true;
  }

  // ---- flip --------------------------------------------------------------

  std::size_t flip_pass(int max_sweeps = 4) {
    std::size_t total = 0;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      std::size_t count = 0;
      for (const auto& [a, b] : collect_edges()) count += flip(a, b) ? 1 : 0;
      total += count;
      if (count == 0) break;
    }
    return total;
  }

  bool flip(int a, int b) {
    std::array<int, 2> ts{};
    if (edge_triangles(a, b, ts) != 2) return false;
    const int t1 = ts[0];
    const int t2 = ts[1];
    // Orient so that t1 = (u, v, c) and t2 = (v, u, d) cyclically.
    const auto& x = tri_[t1];
    int u = a;
    int v = b;
    for (int i = 0; i < 3; ++i)
      if (x[i] == b && x[(i + 1) % 3] == a) std::swap(u, v);
    const int c = third_vertex(tri_[t1], a, b);
    const int d = third_vertex(tri_[t2], a, b);
    const std::array<int, 3> n1 = {u, d, c};
    const std::array<int, 3> n2 = {d, v, c};
    const auto positive = [this](const std::array<int, 3>& t) {
      const double a2 = signed_area2(pos_[t[0]], pos_[t[1]], pos_[t[2]]);
      const double l2 = std::max({dot(pos_[t[1]] - pos_[t[0]], pos_[t[1]] - pos_[t[0]]),
                                  dot(pos_[t[2]] - pos_[t[1]], pos_[t[2]] - pos_[t[1]]),
                                  dot(pos_[t[0]] - pos_[t[2]], pos_[t[0]] - pos_[t[2]])});
      return a2 > 1e-12 * l2;
    };
    if (!positive(n1) || !positive(n2)) return false;
    const double q_old = std::min(quality(tri_[t1]), quality(tri_[t2]));
    const double q_new = std::min(quality(n1), quality(n2));
    if (!(q_new > q_old + 1e-6)) return false;
    std::array<int, 2> dummy{};
    if (edge_triangles(c, d, dummy) != 0) return false;

    tri_[t1] = n1;
    tri_[t2] = n2;
    unlink(u, t2);
    unlink(v, t1);
    v2t_[c].push_back(t2);
    v2t_[d].push_back(t1);
    return true;
  }

  // ---- poor elements ---------------------------------------------------

  static constexpr double kPoorQuality = 0.3;

  // Flat elements with every edge in band: flip or collapse one of their
  // edges when that improves the worst quality nearby.
  std::size_t cleanup_pass() {
    std::size_t count = 0;
    for (std::size_t t = 0; t < tri_.size(); ++t) {
      if (!talive_[t] || quality(tri_[t]) >= kPoorQuality) continue;
      const auto v = tri_[t];
      bool fixed = false;
      for (int i = 0; i < 3 && !fixed; ++i) fixed = flip(v[i], v[(i + 1) % 3]);
      std::array<ScoredEdge, 3> edges{};
      for (int i = 0; i < 3; ++i) edges[i] = {length(v[i], v[(i + 1) % 3]), v[i], v[(i + 1) % 3]};
      std::sort(edges.begin(), edges.end(), [](const ScoredEdge& x, const ScoredEdge& y) { return x.length < y.length; });
      for (int i = 0; i < 3 && !fixed; ++i) {
        const auto [l, a, b] = edges[i];
        fixed = collapse(a, b, 1.0 + 1e-9, params_.long_threshold) || collapse(b, a, 1.0 + 1e-9, params_.long_threshold);
      }
      if (!fixed && edges[2].length > 1.0 && split_improves(edges[2].a, edges[2].b))
        fixed = split(edges[2].a, edges[2].b);
      count += fixed ? 1 : 0;
    }
    return count;
  }

  // ---- smoothing ---------------------------------------------------------

  std::size_t smooth_pass() {
    std::size_t moved = 0;
    for (std::size_t v = 0; v < pos_.size(); ++v)
      if (valive_[v] && tag_[v].kind != BoundaryKind::corner) moved += smooth(static_cast<int>(v)) ? 1 : 0;
    return moved;
  }

  bool smooth(int v) {
    const std::vector<int> nb = ring(v);
    if (nb.empty()) return false;
    const Vec2 p = pos_[v];
    Vec2 target;
    for (int n : nb) {
      const double l = length(v, n);
      target += pos_[n] + (1.0 / l) * (p - pos_[n]);
    }
    target *= 1.0 / static_cast<double>(nb.size());
    Vec2 np = p + params_.smoothing_damping * (target - p);
    if (tag_[v].kind == BoundaryKind::segment) {
      const int s = tag_[v].index;
      const double t = std::clamp(dom_.segment_param(s, np), 0.0, 1.0);
      np = dom_.segment_point(s, t);
      if (!dom_.on_segment(s, np)) return false;
    }
    if (norm(np - p) <= 1e-14) return false;

    double q_old = 1e300;
    for (int t : v2t_[v]) q_old = std::min(q_old, quality(tri_[t]));
    const SymTensor2 old_metric = met_[v];
    pos_[v] = np;
    met_[v] = sample(np);
    double q_new = 1e300;
    bool ok = true;
    for (int t : v2t_[v]) {
      const auto& x = tri_[t];
      const double a2 = signed_area2(pos_[x[0]], pos_[x[1]], pos_[x[2]]);
      const double l2 = std::max({dot(pos_[x[1]] - pos_[x[0]], pos_[x[1]] - pos_[x[0]]),
                                  dot(pos_[x[2]] - pos_[x[1]], pos_[x[2]] - pos_[x[1]]),
                                  dot(pos_[x[0]] - pos_[x[2]], pos_[x[0]] - pos_[x[2]])});
      if (!(a2 > 1e-12 * l2)) {
        ok = false;
        break;
      }
      q_new = std::min(q_new, quality(x));
    }
    if (!ok || q_new < q_old) {
      pos_[v] = p;
      met_[v] = old_metric;
      return false;
    }
    return true;
  }

  // ---- output ------------------------------------------------------------

  Mesh to_mesh() const {
    std::vector<int> new_id(pos_.size(), -1);
    std::vector<Vertex> verts;
    for (std::size_t v = 0; v < pos_.size(); ++v)
      if (valive_[v] && !v2t_[v].empty()) {
        new_id[v] = static_cast<int>(verts.size());
        verts.push_back({pos_[v], tag_[v]});
      }
    std::vector<std::array<int, 3>> tris;
    for (std::size_t t = 0; t < tri_.size(); ++t)
      if (talive_[t]) tris.push_back({new_id[tri_[t][0]], new_id[tri_[t][1]], new_id[tri_[t][2]]});
    return Mesh(dom_, std::move(verts), tris);
  }

  Polygon dom_;
  const MetricSampler& sampler_;
  double scale_;
  AdaptParams params_;

  std::vector<Vec2> pos_;
  std::vector<BoundaryTag> tag_;
  std::vector<SymTensor2> met_;
  std::vector<char> valive_;
  std::vector<std::array<int, 3>> tri_;
  std::vector<char> talive_;
  std::vector<std::vector<int>> v2t_;
};

}  // namespace detail

/// Remesh toward unit metric edge lengths for the metric `scale * sampler`.
inline AdaptResult adapt_to_sampler(const Mesh& m, const MetricSampler& sampler, double scale,
                                    const AdaptParams& params) {
  detail::Remesher r(m, sampler, scale, params);
  return r.run();
}

/// Local split/collapse/flip/smooth remeshing of m toward an M-uniform mesh.
/// A mesh that already meets the uniformity target is returned unchanged.
inline AdaptResult adapt_mesh(const Mesh& m, const MetricField& field, const AdaptParams& params) {
  std::vector<SymTensor2> vm = vertex_metrics(m, field);
  const double u0 = m_uniformity(m, vm, params);
  if (u0 >= params.uniformity_target) {
    AdaptResult res;
    res.mesh = m;
    res.uniformity = u0;
    return res;
  }
  limit_gradation(m, vm, params.gradation);
  const MetricSampler sampler(m, std::move(vm));
  return adapt_to_sampler(m, sampler, 1.0, params);
}

}  // namespace aniso
