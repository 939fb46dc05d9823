#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace aniso {

/// Symmetric quadrature rule on a triangle, in barycentric coordinates.
/// Weights sum to one (they multiply the element area).
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;
};

namespace detail {

enum class Orbit { centroid, edge_symmetric, general };

struct OrbitEntry {
  Orbit kind;
  double weight;
  double a;
  double b;
};

// Symmetric rules of degree 2..10. No node sits on the element boundary.
// clang-format off
inline const std::array<std::vector<OrbitEntry>, 9> kOrbitTables = {{
  // degree 2
  {
      {Orbit::edge_symmetric, 0.33333333333333333333, 0.16666666666666666667, 0.0},
  },
  // degree 3
  {
      {Orbit::centroid, -0.5625, 0.0, 0.0},
      {Orbit::edge_symmetric, 0.52083333333333333333, 0.2, 0.0},
  },
  // degree 4
  {
      {Orbit::edge_symmetric, 0.2233815896780114657, 0.44594849091596488632, 0.0},
      {Orbit::edge_symmetric, 0.10995174365532186764, 0.09157621350977074346, 0.0},
  },
  // degree 5
  {
      {Orbit::centroid, 0.225, 0.0, 0.0},
      {Orbit::edge_symmetric, 0.13239415278850618074, 0.47014206410511508977, 0.0},
      {Orbit::edge_symmetric, 0.1259391805448271526, 0.1012865073234563388, 0.0},
  },
  // degree 6
  {
      {Orbit::edge_symmetric, 0.11678627572637936603, 0.24928674517091042129, 0.0},
      {Orbit::edge_symmetric, 0.050844906370206816921, 0.06308901449150222834, 0.0},
      {Orbit::general, 0.082851075618373575194, 0.053145049844816947353, 0.31035245103378440542},
  },
  // degree 7
  {
      {Orbit::centroid, -0.14957004446768175063, 0.0, 0.0},
      {Orbit::edge_symmetric, 0.17561525743320781175, 0.26034596607903982693, 0.0},
      {Orbit::edge_symmetric, 0.05334723560883849127, 0.065130102902215811538, 0.0},
      {Orbit::general, 0.07711376089025714026, 0.048690315425316411793, 0.31286549600487386141},
  },
  // degree 8
  {
      {Orbit::centroid, 0.14431560767778716825, 0.0, 0.0},
      {Orbit::edge_symmetric, 0.095091634267284624794, 0.45929258829272315603, 0.0},
      {Orbit::edge_symmetric, 0.10321737053471825028, 0.17056930775176020662, 0.0},
      {Orbit::edge_symmetric, 0.032458497623198080311, 0.050547228317030975458, 0.0},
      {Orbit::general, 0.027230314174434994265, 0.0083947774099576053372, 0.26311282963463811342},
  },
  // degree 9
  {
      {Orbit::centroid, 0.097135796282798833819, 0.0, 0.0},
      {Orbit::edge_symmetric, 0.031334700227139070537, 0.48968251919873762778, 0.0},
      {Orbit::edge_symmetric, 0.077827541004774279317, 0.43708959149293663727, 0.0},
      {Orbit::edge_symmetric, 0.079647738927210253033, 0.18820353561903273024, 0.0},
      {Orbit::edge_symmetric, 0.025577675658698031262, 0.044729513394452709865, 0.0},
      {Orbit::general, 0.043283539377289377289, 0.036838412054736283635, 0.22196298916076569568},
  },
  // degree 10
  {
      {Orbit::centroid, 0.090817990382753580095, 0.0, 0.0},
      {Orbit::edge_symmetric, 0.036725957756466704717, 0.48557763338365737737, 0.0},
      {Orbit::edge_symmetric, 0.045321059435527934783, 0.1094815754850370548, 0.0},
      {Orbit::general, 0.072757916845420108604, 0.14170721941487995476, 0.30793983876412095017},
      {Orbit::general, 0.028327242531057484837, 0.025003534762686386074, 0.24667256063990269392},
      {Orbit::general, 0.0094216669637328234599, 0.0095408154002994575802, 0.066803251012200265774},
  },
}};
// clang-format on

inline TriangleRule expand_orbits(const std::vector<OrbitEntry>& orbits, int degree) {
  TriangleRule rule;
  rule.degree = degree;
  auto push = [&rule](double l0, double l1, double l2, double w) {
    rule.points.push_back({l0, l1, l2});
    rule.weights.push_back(w);
  };
  for (const OrbitEntry& o : orbits) {
    switch (o.kind) {
      case Orbit::centroid:
        push(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, o.weight);
        break;
      case Orbit::edge_symmetric: {
        const double c = 1.0 - 2.0 * o.a;
        push(o.a, o.a, c, o.weight);
        push(o.a, c, o.a, o.weight);
        push(c, o.a, o.a, o.weight);
        break;
      }
      case Orbit::general: {
        const double c = 1.0 - o.a - o.b;
        push(o.a, o.b, c, o.weight);
        push(o.a, c, o.b, o.weight);
        push(o.b, o.a, c, o.weight);
        push(o.b, c, o.a, o.weight);
        push(c, o.a, o.b, o.weight);
        push(c, o.b, o.a, o.weight);
        break;
      }
    }
  }
  return rule;
}

}  // namespace detail

inline constexpr int kMinQuadDegree = 2;
inline constexpr int kMaxQuadDegree = 10;
inline constexpr int kDefaultQuadDegree = 8;

/// Rule exact for polynomials of total degree `degree` in [2, 10].
inline const TriangleRule& triangle_rule(int degree) {
  if (degree < kMinQuadDegree || degree > kMaxQuadDegree)
    throw std::invalid_argument("quadrature degree must lie in [2, 10], got " + std::to_string(degree));
  static const std::array<TriangleRule, 9> rules = [] {
    std::array<TriangleRule, 9> r;
    for (int d = kMinQuadDegree; d <= kMaxQuadDegree; ++d)
      r[d - kMinQuadDegree] = detail::expand_orbits(detail::kOrbitTables[d - kMinQuadDegree], d);
    return r;
  }();
  return rules[degree - kMinQuadDegree];
}

}  // namespace aniso
