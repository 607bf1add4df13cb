#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <map>

#include "diraclayer/geometry.hpp"
#include "diraclayer/kernels.hpp"
#include "doctest.h"

using namespace diraclayer;

TEST_CASE("circle preset is exact arclength") {
  const Curve2D c = build_preset_curve("circle", {});
  CHECK(c.length() == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  CHECK(c.arclength_defect() <= 1e-12 * c.length());
  CHECK(c.signed_area() == doctest::Approx(kPi).epsilon(1e-14));
  const Curve2D c8 = build_preset_curve("circle", {{"r", 0.8}});
  CHECK(c8.length() == doctest::Approx(5.0265482457436692).epsilon(1e-15));
  CHECK(c8.signed_area() == doctest::Approx(kPi * 0.64).epsilon(1e-14));
}

TEST_CASE("frozen preset lengths") {
  const Curve2D e = build_preset_curve("ellipse", {{"a", 1.0}, {"b", 0.6}});
  CHECK(e.length() == doctest::Approx(5.1053997726796257).epsilon(1e-12));
  const Curve2D b = build_preset_curve("bean", {});
  CHECK(b.length() == doctest::Approx(6.3809337519229513).epsilon(1e-12));
}

TEST_CASE("reparametrization contract on the presets") {
  for (const auto* name : {"ellipse", "bean"}) {
    const Curve2D c = build_preset_curve(name, {});
    CHECK(c.signed_area() > 0.0);
    // |gamma_dot| = 1 in unit-speed scale within 1e-10
    CHECK(c.arclength_defect() <= 1e-10 * c.length());
    const auto nd = c.nodes(129);
    for (int j = 0; j < 129; ++j) {
      CHECK(nd.nu.row(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
      // nu orthogonal to the tangent
      const Complex tang = nd.Wp(j) / std::abs(nd.Wp(j));
      const double dot = nd.nu(j, 0) * tang.real() + nd.nu(j, 1) * tang.imag();
      CHECK(std::abs(dot) <= 1e-12);
    }
  }
}

TEST_CASE("spectral convergence of the length in n_modes") {
  const double l1 =
      build_preset_curve("ellipse", {{"n_modes", 64}}).length();
  const double l2 =
      build_preset_curve("ellipse", {{"n_modes", 128}}).length();
  CHECK(std::abs(l1 - l2) <= 1e-12);
}

TEST_CASE("non-simple curves are rejected") {
  // figure-eight: W(t) = e^{2 pi i t} + 1.2 e^{-2 pi i t} traces a self-crossing loop
  Eigen::VectorXcd m = Eigen::VectorXcd::Zero(3);
  m(2) = 1.0;
  m(0) = 1.2;
  CHECK_THROWS(reparametrize_arclength(Curve2D(m), 32));
}

TEST_CASE("orientation is normalized to counter-clockwise") {
  // clockwise circle: c_{-1} = r reverses orientation; builder must fix it
  Eigen::VectorXcd m = Eigen::VectorXcd::Zero(3);
  m(0) = 1.0;
  const Curve2D fixed = reparametrize_arclength(Curve2D(m), 8);
  CHECK(fixed.signed_area() > 0.0);
}

TEST_CASE("curve nodes carry consistent derivatives") {
  const Curve2D c = build_preset_curve("ellipse", {});
  const auto nd = c.nodes(65);
  for (int j = 0; j < 65; ++j) {
    CHECK(nd.W(j) == c.point(nd.t(j)));
    CHECK(nd.Wp(j) == c.derivative(nd.t(j), 1));
    CHECK(nd.Wpp(j) == c.derivative(nd.t(j), 2));
    CHECK(nd.s(j) == doctest::Approx(c.length() * nd.t(j)).epsilon(1e-14));
  }
}

TEST_CASE("sphere grid invariants per level") {
  const int want_nodes[] = {204, 776, 1712};
  for (int level = 1; level <= 3; ++level) {
    const SphereGrid g = build_sphere_grid(level);
    CHECK(g.size() == want_nodes[level - 1]);
    CHECK(g.level == level);
    CHECK(g.exact_degree == 5);
    CHECK(g.antipodal);
    CHECK(std::abs(g.weights.sum() - 4.0 * kPi) <= 1e-10);
    CHECK(g.weights.minCoeff() > 0.0);
    for (int i = 0; i < g.size(); ++i) {
      CHECK(std::abs(g.nodes.row(i).norm() - 1.0) <= 1e-14);
      const int j = g.antipodal_map[i];
      CHECK(j != i);
      CHECK(g.antipodal_map[j] == i);
      // antipodes are exact by construction (mirrored sign), not rounded
      CHECK(g.nodes(i, 0) == -g.nodes(j, 0));
      CHECK(g.nodes(i, 1) == -g.nodes(j, 1));
      CHECK(g.nodes(i, 2) == -g.nodes(j, 2));
      CHECK(g.weights(i) == g.weights(j));
    }
  }
}

TEST_CASE("sphere quadrature integrates monomials of degree <= 5") {
  auto dfact = [](int k) {
    double r = 1.0;
    for (int v = k; v > 1; v -= 2) r *= v;
    return r;
  };
  const SphereGrid g = build_sphere_grid(1);
  for (int a = 0; a <= 5; ++a)
    for (int b = 0; a + b <= 5; ++b)
      for (int c = 0; a + b + c <= 5; ++c) {
        const double got = (g.weights.array() * g.nodes.col(0).array().pow(a) *
                            g.nodes.col(1).array().pow(b) *
                            g.nodes.col(2).array().pow(c))
                               .sum();
        const double want = (a % 2 || b % 2 || c % 2)
                                ? 0.0
                                : 4.0 * kPi * dfact(a - 1) * dfact(b - 1) *
                                      dfact(c - 1) / dfact(a + b + c + 1);
        CHECK(std::abs(got - want) <= 1e-12);
      }
  // degree-2 example pinned by the module contract
  const double x1sq = (g.weights.array() * g.nodes.col(0).array().square()).sum();
  CHECK(std::abs(x1sq - 4.0 * kPi / 3.0) <= 1e-10);
}

TEST_CASE("staggered grid variant") {
  const SphereGrid g = build_sphere_grid(2);
  const SphereGrid s = build_sphere_grid(2, true);
  CHECK(s.size() == g.size());
  CHECK(std::abs(s.weights.sum() - 4.0 * kPi) <= 1e-10);
  CHECK((s.nodes - g.nodes).cwiseAbs().maxCoeff() > 1e-3);  // azimuthal offsets differ
  for (int i = 0; i < s.size(); ++i) {
    const int j = s.antipodal_map[i];
    CHECK(s.nodes(i, 0) == -s.nodes(j, 0));
    CHECK(s.nodes(i, 2) == -s.nodes(j, 2));
  }
}

TEST_CASE("grid and preset validation errors") {
  CHECK_THROWS(build_sphere_grid(0));
  CHECK_THROWS(build_preset_curve("torus", {}));
  CHECK_THROWS(build_preset_curve("circle", {{"r", -1.0}}));
  CHECK_THROWS(build_preset_curve("ellipse", {{"a", 0.0}}));
}
