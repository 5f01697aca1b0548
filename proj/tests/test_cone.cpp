#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "slcone/asymptotics.hpp"
#include "slcone/calib.hpp"
#include "slcone/cone.hpp"

using namespace slcone;

TEST_CASE("chart values at simple angles") {
  const Vec6 p = cone_point(std::sqrt(3.0), 0.0, 0.0);
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[2] == doctest::Approx(1.0));
  CHECK(p[4] == doctest::Approx(1.0));
  CHECK(std::abs(p[1]) + std::abs(p[3]) + std::abs(p[5]) < 1e-15);

  const Vec6 q = cone_point(1.0, M_PI, M_PI);
  const double a = 1.0 / std::sqrt(3.0);
  CHECK(q[0] == doctest::Approx(-a));
  CHECK(q[2] == doctest::Approx(-a));
  CHECK(q[4] == doctest::Approx(a));
  // the triple product stays on the positive real axis
  const auto z = to_complex3(q);
  CHECK((z[0] * z[1] * z[2]).real() == doctest::Approx(1.0 / std::pow(3.0, 1.5)));
  CHECK(std::abs((z[0] * z[1] * z[2]).imag()) < 1e-15);

  CHECK_THROWS_AS(cone_point(0.0, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cone_point(-1.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("chart radius and scale equivariance are exact") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  for (int it = 0; it < 100; ++it) {
    const double t1 = angle(rng), t2 = angle(rng);
    const double r = 0.1 + 5.0 * std::abs(std::sin(it + 1.0));
    CHECK(cone_point(r, t1, t2).norm() == doctest::Approx(r).epsilon(1e-14));
    CHECK((cone_point(2.5 * r, t1, t2) - 2.5 * cone_point(r, t1, t2)).norm() < 1e-13 * r);
  }
}

TEST_CASE("link metric: closed form against complex-step recomputation") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  const Eigen::Matrix2d g = link_metric();
  CHECK(g(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(g(0, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(std::abs(g.determinant() - 1.0 / 3.0) < 1e-15);
  for (int it = 0; it < 100; ++it) {
    const Eigen::Matrix2d gn = link_metric_numeric(angle(rng), angle(rng));
    CHECK((gn - g).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK((link_metric_inverse() * g - Eigen::Matrix2d::Identity()).norm() < 1e-14);
}

TEST_CASE("the chart pulls the flat metric back to dr^2 + r^2 g_link") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  const Eigen::Matrix2d g = link_metric();
  // angular partials by complex step (machine precision); the radial partial
  // is the degree-one homogeneity itself
  auto cs_deriv = [](double r, double t1, double t2, int which) {
    using C = std::complex<double>;
    const double h = 1e-100;
    const C c1(t1, which == 0 ? h : 0.0), c2(t2, which == 1 ? h : 0.0);
    const auto comps = cone_chart_components<C>(r, c1, c2);
    Vec6 d;
    for (int i = 0; i < 6; ++i) d[i] = comps[i].imag() / h;
    return d;
  };
  for (int it = 0; it < 40; ++it) {
    const double r = 0.3 + 3.0 * std::abs(std::cos(it * 0.7));
    const double t1 = angle(rng), t2 = angle(rng);
    const Vec6 dr = cone_point(r, t1, t2) / r;
    const Vec6 d1 = cs_deriv(r, t1, t2, 0);
    const Vec6 d2 = cs_deriv(r, t1, t2, 1);
    CHECK(std::abs(dr.squaredNorm() - 1.0) < 1e-14);
    CHECK(std::abs(dr.dot(d1)) < 1e-13 * r);
    CHECK(std::abs(dr.dot(d2)) < 1e-13 * r);
    CHECK(std::abs(d1.squaredNorm() - r * r * g(0, 0)) < 1e-12 * r * r);
    CHECK(std::abs(d1.dot(d2) - r * r * g(0, 1)) < 1e-12 * r * r);
    CHECK(std::abs(d2.squaredNorm() - r * r * g(1, 1)) < 1e-12 * r * r);
  }
}

TEST_CASE("link area: closed form, ball-mass consistency, scale invariance") {
  CHECK(link_area() == doctest::Approx(4.0 * M_PI * M_PI / std::sqrt(3.0)));
  CHECK(link_area() == doctest::Approx(22.7929).epsilon(1e-5));

  const DiscreteVarifold v = sample_cone(std::pow(2.0, -12), 2.0, 416, 48);
  CHECK(std::abs(mass_in_ball(v, 1.0) - link_area() / 3.0) < 0.005 * link_area() / 3.0);
  // density ratio is rho-independent on grid-aligned radii
  const double d1 = mass_in_ball(v, 1.0) / 1.0;
  const double d2 = mass_in_ball(v, 2.0) / 8.0;
  const double dh = mass_in_ball(v, 0.5) / 0.125;
  CHECK(d1 == doctest::Approx(d2).epsilon(1e-6));
  CHECK(d1 == doctest::Approx(dh).epsilon(1e-6));
}

TEST_CASE("cone samples: vanishing energy, correct total weight, calibrated planes") {
  const DiscreteVarifold v = sample_cone(1.0, 2.0, 40, 24);
  CHECK(energy(v) < 1e-12);
  const double expected = (8.0 - 1.0) / 3.0 * link_area();
  CHECK(std::abs(total_mass(v) - expected) < 0.005 * expected);
  const CyStructure cy = flat_structure(3);
  for (Eigen::Index i = 0; i < v.size(); i += 131) {
    const CalibrationDefect d = calibration_defect(cy, v.plane(i));
    CHECK(d.lagrangian < 1e-10);
    CHECK(d.sum() < 1e-10);
  }
  CHECK_THROWS_AS(sample_cone(2.0, 1.0, 8, 8), std::invalid_argument);
  CHECK_THROWS_AS(sample_cone(1.0, 2.0, 1, 8), std::invalid_argument);
}

TEST_CASE("cylindrical norms: zero field, homogeneous field, grid preconditions") {
  const auto zero = make_normal_field(1.0, 4.0, 8, 12, 12,
                                      [](double, double, double) {
                                        return Eigen::Vector3d::Zero();
                                      });
  CHECK(cyl_norm(zero, 0) == 0.0);
  CHECK(cyl_norm(zero, 1) == 0.0);

  // u = r * (first normal direction): degree-one homogeneity is cylinder-flat
  const auto lin = make_normal_field(1.0, 4.0, 10, 16, 16,
                                     [](double r, double, double) {
                                       return Eigen::Vector3d(r, 0.0, 0.0);
                                     });
  CHECK(cyl_norm(lin, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(cyl_norm(lin, 2), std::invalid_argument);

  const auto thin = make_normal_field(1.0, 2.0, 2, 8, 8,
                                      [](double, double, double) {
                                        return Eigen::Vector3d(0.01, 0, 0);
                                      });
  CHECK_THROWS_AS(cyl_norm(thin, 1), std::invalid_argument);
}

TEST_CASE("graph of the zero field reproduces the cone samples exactly") {
  const auto zero = make_normal_field(1.0, 2.0, 12, 16, 16,
                                      [](double, double, double) {
                                        return Eigen::Vector3d::Zero();
                                      });
  const DiscreteVarifold g = graph_cyl(zero);
  const DiscreteVarifold c = sample_cone(1.0, 2.0, 12, 16);
  REQUIRE(g.size() == c.size());
  CHECK((g.points() - c.points()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((g.weights() - c.weights()).cwiseAbs().maxCoeff() <
        1e-12 * c.weights().maxCoeff());
}

TEST_CASE("graph of a degree-one mode approximates a translated cone to O(b^2)") {
  const CyStructure cy = flat_structure(3);
  std::vector<double> dist;
  for (double scale : {1e-2, 1e-3}) {
    Vec6 b = Vec6::Zero();
    b[0] = scale;
    b[3] = -0.5 * scale;
    const auto field = make_normal_field(
        2.0, 4.0, 10, 16, 16, [&](double r, double t1, double t2) -> Eigen::Vector3d {
          return cone_normal_frame(r, t1, t2).transpose() * b;
        });
    const DiscreteVarifold g = graph_cyl(field);
    const DiscreteVarifold t =
        translate(sample_cone(2.0, 4.0, 10, 16), b);
    const std::vector<TestBall> balls = {{Vec::Zero(6), 3.0}, {Vec::Zero(6), 3.9}};
    dist.push_back(weak_distance(g, t, balls));
  }
  // an order of magnitude in b buys two in the distance (up to quadrature floor)
  CHECK(dist[1] < 0.05 * dist[0]);
  (void)cy;
}

TEST_CASE("a random non-special graph shows up in the Im Omega pairing") {
  const CyStructure cy = flat_structure(3);
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> uni(-0.04, 0.04);
  // smooth low-mode field with fixed random coefficients
  const double a1 = uni(rng), a2 = uni(rng), a3 = uni(rng);
  const auto field = make_normal_field(
      1.0, 2.0, 12, 16, 16, [&](double r, double t1, double t2) -> Eigen::Vector3d {
        return {a1 * r * std::cos(t1), a2 * r * std::sin(t2), a3 * r * std::cos(t1 + t2)};
      });
  const DiscreteVarifold g = graph_cyl(field);
  // planes are still nearly Lagrangian but the phase moves measurably
  double im_defect = 0.0;
  for (Eigen::Index i = 0; i < g.size(); i += 7) {
    const Complex val = cy.holomorphic_form.evaluate(g.frame(i));
    im_defect = std::max(im_defect, std::abs(val.imag()));
  }
  CHECK(im_defect > 1e-3);
}

TEST_CASE("graphs beyond the chart bound are rejected") {
  const auto big = make_normal_field(1.0, 2.0, 8, 12, 12,
                                     [](double r, double, double) {
                                       return Eigen::Vector3d(0.5 * r, 0, 0);
                                     });
  CHECK_THROWS_AS(graph_cyl(big), std::runtime_error);
}

TEST_CASE("determinant-one unitaries move cone samples to calibrated samples") {
  const CyStructure cy = flat_structure(3);
  const DiscreteVarifold v = sample_cone(0.5, 2.0, 10, 10);
  const Eigen::MatrixXcd u = random_special_unitary(3, 97);
  const DiscreteVarifold rotated = apply_linear(v, real_matrix(u));
  CHECK(total_mass(rotated) == doctest::Approx(total_mass(v)).epsilon(1e-14));
  for (Eigen::Index i = 0; i < rotated.size(); i += 17)
    CHECK(calibration_defect(cy, rotated.plane(i)).sum() < 1e-9);
  // the rotated cone is still a cone about the origin: zero energy
  CHECK(energy(rotated) < 1e-12);
}
