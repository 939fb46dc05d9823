#pragma once

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "aniso/mesh.hpp"

namespace aniso {

// Vertex tags on disk: 0 interior, s+1 for boundary segment s, -(c+1) for corner c.
inline int encode_tag(const BoundaryTag& tag) {
  switch (tag.kind) {
    case BoundaryKind::interior: return 0;
    case BoundaryKind::segment: return tag.index + 1;
    case BoundaryKind::corner: return -(tag.index + 1);
  }
  return 0;
}

inline BoundaryTag decode_tag(int code) {
  if (code == 0) return BoundaryTag::interior();
  if (code > 0) return BoundaryTag::segment(code - 1);
  return BoundaryTag::corner(-code - 1);
}

/// Header `V T`, then `x y tag` per vertex, then `i j k` per triangle.
inline void write_mesh(std::ostream& os, const Mesh& m) {
  const auto old_flags = os.flags();
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  os << m.num_vertices() << ' ' << m.num_triangles() << '\n';
  for (const Vertex& v : m.vertices()) os << v.pos.x << ' ' << v.pos.y << ' ' << encode_tag(v.tag) << '\n';
  for (const Triangle& t : m.triangles()) os << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << '\n';
  os.precision(old_precision);
  os.flags(old_flags);
}

inline Mesh read_mesh(std::istream& is, const Polygon& domain) {
  long long nv = -1;
  long long nt = -1;
  if (!(is >> nv >> nt) || nv < 0 || nt < 0) throw MalformedMesh("bad header");
  std::vector<Vertex> verts(static_cast<std::size_t>(nv));
  for (auto& v : verts) {
    int code = 0;
    if (!(is >> v.pos.x >> v.pos.y >> code)) throw MalformedMesh("truncated vertex block");
    v.tag = decode_tag(code);
  }
  std::vector<std::array<int, 3>> tris(static_cast<std::size_t>(nt));
  for (auto& t : tris)
    if (!(is >> t[0] >> t[1] >> t[2])) throw MalformedMesh("truncated triangle block");
  return Mesh(domain, std::move(verts), tris);
}

inline void save_mesh(const std::string& path, const Mesh& m) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_mesh(os, m);
}

inline Mesh load_mesh(const std::string& path, const Polygon& domain) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  return read_mesh(is, domain);
}

}  // namespace aniso
