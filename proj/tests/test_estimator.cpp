#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "aniso/adapt.hpp"
#include "aniso/estimator.hpp"
#include "aniso/fem.hpp"
#include "test_support.hpp"

using namespace aniso;

namespace {

// u = x(1-x) y(1-y), homogeneous Dirichlet data on the unit square.
TestProblem bubble_problem() {
  TestProblem p;
  p.name = "bubble";
  p.domain = unit_square_domain();
  p.initial_mesh = [] { return fixtures::two_triangle_square(); };
  p.exact = [](Vec2 q) { return q.x * (1.0 - q.x) * q.y * (1.0 - q.y); };
  p.exact_grad = [](Vec2 q) {
    return Vec2{(1.0 - 2.0 * q.x) * q.y * (1.0 - q.y), q.x * (1.0 - q.x) * (1.0 - 2.0 * q.y)};
  };
  p.source = [](Vec2 q) { return 2.0 * (q.x * (1.0 - q.x) + q.y * (1.0 - q.y)); };
  p.boundary = [](Vec2) { return 0.0; };
  return p;
}

HbSystem system_for(const Mesh& m, const TestProblem& p) {
  SolveOptions opt;
  opt.rel_tol = 1e-14;
  return assemble_hb_system(m, solve_fem(m, p, opt), p);
}

// Energy norm of the exact solution of the bubble-space system.
double direct_energy(const HbSystem& sys) {
  const Eigen::MatrixXd a = fixtures::to_dense(sys.stiffness);
  const Eigen::Map<const Eigen::VectorXd> r(sys.residual.data(), sys.size());
  const Eigen::VectorXd z = a.llt().solve(r);
  return std::sqrt(z.dot(a * z));
}

}  // namespace

TEST(HbSystem, SingleTriangleHasNoUnknowns) {
  const TestProblem p = bubble_problem();
  const Mesh m = fixtures::unit_right_triangle();
  FemSolution s;
  s.nodal.assign(3, 0.0);
  const HbSystem sys = assemble_hb_system(m, s, p);
  EXPECT_EQ(sys.size(), 0);
  EXPECT_EQ(sys.edges.size(), 3u);
}

TEST(HbSystem, ExactLinearSolutionHasZeroResidual) {
  const TestProblem p = linear_problem(1.0, -0.5, 2.0);
  const Mesh m = structured_polygon_mesh(p.domain, 6, 6);
  const HbSystem sys = system_for(m, p);
  ASSERT_GT(sys.size(), 0);
  for (double r : sys.residual) EXPECT_NEAR(r, 0.0, 1e-12);
}

TEST(HbSystem, DiagonalBubbleEntryOnTwoTriangleSquare) {
  // psi = 4 (1 - x) y on the lower triangle and 4 x (1 - y) on the upper one;
  // each contributes 16 (1/12 + 1/12) = 8/3.
  const Mesh m = fixtures::two_triangle_square();
  FemSolution s;
  s.nodal.assign(4, 0.0);
  const HbSystem sys = assemble_hb_system(m, s, bubble_problem());
  ASSERT_EQ(sys.size(), 1);
  EXPECT_NEAR(sys.stiffness.at(0, 0), 16.0 / 3.0, 1e-12);
  const auto e = sys.edges.edges[sys.edge_of_dof[0]];
  EXPECT_EQ(e, (std::array<int, 2>{0, 3}));
}

TEST(HbSystem, BubbleStiffnessMatchesQuadratureOracle) {
  // grad psi_e is linear, so the degree-2 rule integrates |grad psi|^2 exactly.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const TriangleRule& rule = triangle_rule(2);
  for (int rep = 0; rep < 50; ++rep) {
    std::array<Vec2, 3> p = {Vec2{u(rng), u(rng)}, Vec2{u(rng), u(rng)}, Vec2{u(rng), u(rng)}};
    if (signed_area2(p[0], p[1], p[2]) < 0.0) std::swap(p[1], p[2]);
    if (signed_area2(p[0], p[1], p[2]) < 1e-2) continue;
    const ElementGeometry g = element_geometry(p[0], p[1], p[2]);
    const ElementMatrix k = bubble_stiffness(g);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double q = 0.0;
        for (std::size_t n = 0; n < rule.weights.size(); ++n) {
          const auto& l = rule.points[n];
          auto grad = [&](int e) {
            const int a = (e + 1) % 3, b = (e + 2) % 3;
            return 4.0 * (l[a] * g.grad_lambda[b] + l[b] * g.grad_lambda[a]);
          };
          q += rule.weights[n] * dot(grad(i), grad(j));
        }
        q *= g.area;
        EXPECT_NEAR(k[i][j], q, 1e-12 * std::max(1.0, std::abs(q)));
      }
  }
}

TEST(HbSystem, StiffnessIsSymmetricPositiveDefinite) {
  const TestProblem p = make_problem("mitchell-lshape");
  const HbSystem sys = system_for(structured_polygon_mesh(p.domain, 10, 10), p);
  EXPECT_LT(sys.stiffness.symmetry_defect(), 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fixtures::to_dense(sys.stiffness));
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(GaussSeidel, ZeroResidualStopsAfterOneSweep) {
  const TestProblem p = linear_problem(1.0, 2.0, 3.0);
  const Mesh m = structured_polygon_mesh(p.domain, 4, 4);
  SolveOptions opt;
  opt.rel_tol = 1e-14;
  FemSolution s = solve_fem(m, p, opt);
  // Interpolate exactly so the residual vanishes to the last bit.
  for (std::size_t i = 0; i < m.num_vertices(); ++i) s.nodal[i] = p.exact(m.vertex(static_cast<int>(i)).pos);
  HbSystem sys = assemble_hb_system(m, s, p);
  std::fill(sys.residual.begin(), sys.residual.end(), 0.0);
  const HbEstimate est = gauss_seidel_estimate(sys);
  EXPECT_TRUE(est.zero);
  EXPECT_EQ(est.sweeps, 1);
  for (double c : est.edge_coefficients) EXPECT_EQ(c, 0.0);
  EXPECT_EQ(est.energy_norm, 0.0);
}

TEST(GaussSeidel, EnergyIsNondecreasingFromZeroStart) {
  const TestProblem p = make_problem("mitchell-lshape");
  for (const Mesh& m : {refine_uniform(initial_lshape_mesh()), structured_polygon_mesh(p.domain, 12, 12)}) {
    const HbSystem sys = system_for(m, p);
    double prev = 0.0;
    for (int k = 1; k <= 8; ++k) {
      const double eta = gauss_seidel_estimate(sys, 1e-300, k).energy_norm;
      EXPECT_GE(eta, prev * (1.0 - 1e-14)) << k;
      prev = eta;
    }
    EXPECT_LE(prev, direct_energy(sys) * (1.0 + 1e-12));
  }
}

TEST(GaussSeidel, TenSweepsOnFiftyEdgeSystem) {
  const Mesh m = structured_square_mesh(5);
  const HbSystem sys = system_for(m, bubble_problem());
  EXPECT_GE(sys.size(), 40);
  EXPECT_LE(sys.size(), 70);
  const double oracle = direct_energy(sys);
  const HbEstimate est = gauss_seidel_estimate(sys, 1e-300, 10);
  EXPECT_EQ(est.sweeps, 10);
  EXPECT_NEAR(est.energy_norm, oracle, 0.2 * oracle);
}

TEST(GaussSeidel, MatchesDirectSolveOnSmallMeshes) {
  const TestProblem lp = make_problem("mitchell-lshape");
  const TestProblem bp = bubble_problem();
  const std::vector<std::pair<Mesh, const TestProblem*>> cases = {
      {refine_uniform(initial_lshape_mesh()), &lp},
      {structured_polygon_mesh(lp.domain, 4, 4), &lp},
      {structured_square_mesh(5), &bp},
  };
  for (const auto& [m, p] : cases) {
    const HbSystem sys = system_for(m, *p);
    ASSERT_LE(sys.edges.size(), 100u);
    const double oracle = direct_energy(sys);
    const HbEstimate est = gauss_seidel_estimate(sys, 1e-10, 10000);
    EXPECT_NEAR(est.energy_norm, oracle, 1e-6 * oracle);
    EXPECT_NEAR(estimate_energy_norm(est, m), oracle, 1e-6 * oracle);
  }
}

TEST(Estimate, VanishesAtEveryVertex) {
  const TestProblem p = make_problem("mitchell-lshape");
  const Mesh m = structured_polygon_mesh(p.domain, 20, 20);
  const HbEstimate est = gauss_seidel_estimate(system_for(m, p));
  ASSERT_GT(est.energy_norm, 0.0);
  for (std::size_t t = 0; t < m.num_triangles(); ++t)
    for (const auto& b : {std::array<double, 3>{1, 0, 0}, std::array<double, 3>{0, 1, 0}, std::array<double, 3>{0, 0, 1}})
      EXPECT_EQ(evaluate_estimate(est, static_cast<int>(t), b), 0.0);
}

TEST(Estimate, DirichletEdgesCarryZero) {
  const TestProblem p = make_problem("mitchell-lshape");
  const Mesh m = structured_polygon_mesh(p.domain, 10, 10);
  const HbEstimate est = gauss_seidel_estimate(system_for(m, p));
  for (std::size_t e = 0; e < est.edges.size(); ++e)
    if (est.edges.is_boundary(e)) EXPECT_EQ(est.edge_coefficients[e], 0.0);
}

TEST(ElementHessian, ZeroCoefficientsGiveZero) {
  const Mesh m = structured_square_mesh(2);
  HbEstimate est;
  est.edges = build_edge_table(m);
  est.edge_coefficients.assign(est.edges.size(), 0.0);
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const SymTensor2 h = element_hessian(est, static_cast<int>(t), m);
    EXPECT_EQ(h.xx, 0.0);
    EXPECT_EQ(h.xy, 0.0);
    EXPECT_EQ(h.yy, 0.0);
  }
}

TEST(ElementHessian, SingleBubbleOnUnitTriangle) {
  const Mesh m = fixtures::unit_right_triangle();
  HbEstimate est;
  est.edges = build_edge_table(m);
  est.edge_coefficients.assign(3, 0.0);
  est.edge_coefficients[est.edges.tri_edges[0][0]] = 1.0;  // edge (1,0)-(0,1)
  const SymTensor2 h = element_hessian(est, 0, m);
  EXPECT_NEAR(h.xx, 0.0, 1e-14);
  EXPECT_NEAR(h.xy, 4.0, 1e-14);
  EXPECT_NEAR(h.yy, 0.0, 1e-14);
}

TEST(ElementHessian, MatchesSecondDifferencesOfTheQuadratic) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const Mesh m = structured_polygon_mesh(lshape_domain(), 4, 4);
  HbEstimate est;
  est.edges = build_edge_table(m);
  est.edge_coefficients.resize(est.edges.size());
  for (double& c : est.edge_coefficients) c = u(rng);
  const double h = 1e-3;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const int ti = static_cast<int>(t);
    const ElementGeometry g = element_geometry(m, ti);
    // Evaluate z_h off the element by extending the barycentric coordinates.
    auto z = [&](Vec2 q) {
      std::array<double, 3> l{};
      for (int i = 0; i < 3; ++i) l[i] = dot(g.grad_lambda[i], q - m.point(ti, (i + 1) % 3));
      // lambda_i vanishes on the opposite edge, which contains vertex i+1.
      return evaluate_estimate(est, ti, l);
    };
    const Vec2 c = (1.0 / 3.0) * (m.point(ti, 0) + m.point(ti, 1) + m.point(ti, 2));
    const double zxx = (z(c + Vec2{h, 0}) - 2.0 * z(c) + z(c - Vec2{h, 0})) / (h * h);
    const double zyy = (z(c + Vec2{0, h}) - 2.0 * z(c) + z(c - Vec2{0, h})) / (h * h);
    const double zxy = (z(c + Vec2{h, h}) - z(c + Vec2{h, -h}) - z(c + Vec2{-h, h}) + z(c + Vec2{-h, -h})) / (4.0 * h * h);
    const SymTensor2 hz = element_hessian(est, ti, m);
    const double scale = std::max(1.0, max_abs_entry(hz));
    EXPECT_NEAR(hz.xx, zxx, 1e-5 * scale);
    EXPECT_NEAR(hz.xy, zxy, 1e-5 * scale);
    EXPECT_NEAR(hz.yy, zyy, 1e-5 * scale);
  }
}

TEST(EnergyNorm, ZeroEstimateIsZero) {
  const Mesh m = structured_square_mesh(3);
  HbEstimate est;
  est.edges = build_edge_table(m);
  est.edge_coefficients.assign(est.edges.size(), 0.0);
  EXPECT_EQ(estimate_energy_norm(est, m), 0.0);
}

TEST(EnergyNorm, SingleBubbleOnTwoTriangleSquare) {
  const Mesh m = fixtures::two_triangle_square();
  HbEstimate est;
  est.edges = build_edge_table(m);
  est.edge_coefficients.assign(est.edges.size(), 0.0);
  for (std::size_t e = 0; e < est.edges.size(); ++e)
    if (!est.edges.is_boundary(e)) est.edge_coefficients[e] = 1.0;
  EXPECT_NEAR(estimate_energy_norm(est, m), std::sqrt(16.0 / 3.0), 1e-12);
}

TEST(EnergyNorm, EffectivityOnUniformMeshes) {
  const TestProblem p = make_problem("mitchell-lshape");
  for (int n : {4000, 16000}) {
    const Mesh m = uniform_start_mesh(p.initial_mesh(), n);
    const FemSolution s = solve_fem(m, p);
    const HbEstimate est = gauss_seidel_estimate(assemble_hb_system(m, s, p));
    const double ratio = est.energy_norm / energy_error(m, s, p);
    EXPECT_GE(ratio, 0.2) << n;
    EXPECT_LE(ratio, 5.0) << n;
  }
}
