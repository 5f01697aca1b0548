#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "slcone/calib.hpp"
#include "slcone/models.hpp"

using namespace slcone;

namespace {

// Independent bisection oracle for the positive cubic root.
double cubic_oracle(double c1, double c2, double rhs) {
  double lo = 0.0, hi = 1.0;
  auto g = [&](double p) { return (p + c1) * (p + c2) * p - rhs; };
  while (g(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 240; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("moment maps and the fibration at reference points") {
  // on the cone all moduli agree and the product is positive real
  const C3 zc = to_complex3(cone_point(2.0, 0.7, 1.9));
  CHECK(fibration_F(zc).norm() < 1e-14);

  // on L1 with |w| = 1: mu2 = mu3 = 1/2, Im f = 0, independent of the angles
  for (double th : {0.0, 1.0, 2.5})
    for (double ph : {0.3, 4.0}) {
      const C3 z = model_point(ModelId::L1, th, std::polar(1.0, ph));
      const Eigen::Vector3d f = fibration_F(z);
      CHECK(f[0] == doctest::Approx(0.5).epsilon(1e-14));
      CHECK(f[1] == doctest::Approx(0.5).epsilon(1e-14));
      CHECK(std::abs(f[2]) < 1e-14);
    }

  const C3 e1(Complex(1, 0), Complex(0, 0), Complex(0, 0));
  CHECK(fibration_F(e1)[0] == doctest::Approx(0.5));
  CHECK(fibration_F(e1)[1] == doctest::Approx(0.5));
  CHECK(fibration_F(e1)[2] == 0.0);
  CHECK_THROWS_AS(moment_mu(1, e1), std::invalid_argument);
}

TEST_CASE("model charts: reference values and the defining equations") {
  // psi(1, 1) = (sqrt2, 1, 1)
  const C3 z = model_point(ModelId::L1, 0.0, Complex(1, 0));
  CHECK(z[0].real() == doctest::Approx(std::sqrt(2.0)));
  CHECK(z[1].real() == doctest::Approx(1.0));
  CHECK(z[2].real() == doctest::Approx(1.0));
  CHECK(model_residual(ModelId::L1, z) < 1e-14);

  // the core circle |z1| = 1 at plane coordinate zero
  for (double th : {0.1, 2.0, 5.5}) {
    const C3 c = model_point(ModelId::L1, th, Complex(0, 0));
    CHECK(std::abs(c[0]) == doctest::Approx(1.0));
    CHECK(std::abs(c[1]) < 1e-15);
    CHECK(std::abs(c[2]) < 1e-15);
  }

  std::mt19937_64 rng(13);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  for (ModelId id : {ModelId::L1, ModelId::L2, ModelId::L3})
    for (int it = 0; it < 200; ++it) {
      const C3 p = model_point(id, angle(rng), Complex(2 * gauss(rng), 2 * gauss(rng)));
      CHECK(model_residual(id, p) < 1e-12);
    }
  CHECK_THROWS_AS(model_point(ModelId::Cone, 0.0, Complex(0, 0)), std::invalid_argument);
}

TEST_CASE("round trip through the model chart is exact") {
  // phi(z) = (z1/sqrt(|z2|^2+1), z2) inverts psi on L1
  std::mt19937_64 rng(19);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  for (int it = 0; it < 100; ++it) {
    const double th = angle(rng);
    const Complex w(gauss(rng), gauss(rng));
    const C3 z = model_point(ModelId::L1, th, w);
    const Complex e = z[0] / std::sqrt(std::norm(z[1]) + 1.0);
    CHECK(std::abs(e - std::polar(1.0, th)) < 1e-14);
    CHECK(std::abs(z[1] - w) < 1e-14);
  }
}

TEST_CASE("sampled models are special Lagrangian with the expected asymptotics") {
  const CyStructure cy = flat_structure(3);
  for (ModelId id : {ModelId::L1, ModelId::L2, ModelId::L3}) {
    const DiscreteVarifold v = sample_model(id, 4.0, 14);
    Eigen::Vector3d f0 = fibration_F(to_complex3(v.point(0)));
    for (Eigen::Index i = 0; i < v.size(); i += 41) {
      CHECK(calibration_defect(cy, v.plane(i)).sum() < 1e-10);
      CHECK((fibration_F(to_complex3(v.point(i))) - f0).norm() < 1e-12);
    }
  }
  // density at large radius approaches the cone density (multiplicity one);
  // shell edges aligned at the ball radius keep the cut exact
  const DiscreteVarifold big = sample_model_annulus(ModelId::L1, 0.5, 16.0, 600, 16, 16);
  const double density = total_mass(big) / std::pow(16.0, 3);
  CHECK(std::abs(density - link_area() / 3.0) < 0.02 * link_area() / 3.0);
}

TEST_CASE("solve_phi: closed cases, oracle match, monotonicity, rejection") {
  CHECK(solve_phi(0, 0, 1, 0) == doctest::Approx(1.0));  // phi^3 = 1
  CHECK(solve_phi(2, 0, 0, 0) == 0.0);                   // (phi+2) phi^2 = 0
  const double oracle = cubic_oracle(1.0, 1.0, 1.0);
  CHECK(std::abs(solve_phi(1, 1, 0, 1) - oracle) < 1e-12);
  CHECK(oracle == doctest::Approx(0.46557).epsilon(1e-4));

  double prev = -1.0;
  for (double t : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    const double p = solve_phi(1.0, 0.5, t, 0.3);
    CHECK(p > prev);
    prev = p;
  }
  CHECK_THROWS_AS(solve_phi(1.0, -0.5, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("fiber chart: label round trip and coordinate inverse") {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::Vector3d c(gauss(rng), gauss(rng), gauss(rng));
    if (in_Y(c, 1e-6)) continue;
    for (int it = 0; it < 10; ++it) {
      const double t = 3.0 * gauss(rng);
      const Complex u = std::polar(1.0, angle(rng)), v = std::polar(1.0, angle(rng));
      const C3 z = fiber_point(c, t, u, v);
      CHECK((fibration_F(z) - c).norm() < 1e-12);
      const FiberCoords fc = fiber_coords(c, z);
      CHECK(std::abs(fc.t - t) < 1e-10 * (1.0 + std::abs(t)));
      CHECK(std::abs(fc.u - u) < 1e-10);
      CHECK(std::abs(fc.v - v) < 1e-10);
    }
  }
  // exact round trip at a fixed point, as an anchor
  const Eigen::Vector3d c(0.7, -0.3, 0.4);
  const C3 z = fiber_point(c, 2.0, Complex(1, 0), Complex(0, 1));
  const FiberCoords fc = fiber_coords(c, z);
  CHECK(fc.t == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(std::abs(fc.u - Complex(1, 0)) < 1e-13);
  CHECK(std::abs(fc.v - Complex(0, 1)) < 1e-13);
  CHECK_THROWS_AS(fiber_point(Eigen::Vector3d(0.5, 0.5, 0.0), 1.0, Complex(1, 0),
                              Complex(1, 0)),
                  std::runtime_error);
}

TEST_CASE("fibers near the cone label approach the cone on the positive half") {
  // c = (0, 0, eps): at large positive t the moduli equalize (one cone end);
  // at large negative t the product is negative real (the mirror end)
  const Eigen::Vector3d c(0.0, 0.0, 1e-3);
  const C3 z = fiber_point(c, 10.0, Complex(1, 0), Complex(1, 0));
  CHECK(std::abs(std::abs(z[0]) - std::abs(z[1])) < 1e-10);
  CHECK(std::abs(std::abs(z[1]) - std::abs(z[2])) < 1e-6);
  CHECK((z[0] * z[1] * z[2]).real() == doctest::Approx(10.0));
  const C3 zm = fiber_point(c, -10.0, Complex(1, 0), Complex(1, 0));
  CHECK((zm[0] * zm[1] * zm[2]).real() == doctest::Approx(-10.0));
  CHECK(std::abs(std::abs(zm[0]) - std::abs(zm[2])) < 1e-6);

  // every sample on the positive half sits within O(eps) of the cone
  const DiscreteVarifold half = sample_fiber(c, 0.5, 8.0, 60, 12);
  double worst = 0.0, mean = 0.0;
  for (Eigen::Index i = 0; i < half.size(); ++i) {
    const double res = model_residual(ModelId::Cone, to_complex3(half.point(i)));
    worst = std::max(worst, res);
    mean += res;
  }
  mean /= static_cast<double>(half.size());
  CHECK(worst < 1e-2);
  CHECK(mean < 2e-3);
}

TEST_CASE("smooth fibers are special Lagrangian") {
  const CyStructure cy = flat_structure(3);
  const Eigen::Vector3d c(0.7, -0.3, 0.4);
  const DiscreteVarifold v = sample_fiber(c, -4.0, 4.0, 24, 16);
  for (Eigen::Index i = 0; i < v.size(); i += 29)
    CHECK(calibration_defect(cy, v.plane(i)).sum() < 1e-10);
}

TEST_CASE("tangent planes of generated surfaces kill the fibration differential") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::normal_distribution<double> gauss;
  auto check_kernel = [](const Vec6& p, const Mat63& frame) {
    const double h = 1e-6;
    for (int j = 0; j < 3; ++j) {
      const Vec6 dir = frame.col(j);
      const Eigen::Vector3d df =
          (fibration_F(to_complex3(p + h * dir)) - fibration_F(to_complex3(p - h * dir))) /
          (2.0 * h);
      CHECK(df.norm() < 1e-8);
    }
  };
  for (int it = 0; it < 20; ++it) {
    const double th = angle(rng);
    const Complex w(gauss(rng), gauss(rng));
    check_kernel(to_real6(model_point(ModelId::L2, th, w)),
                 model_tangent_frame(ModelId::L2, th, w));
  }
  const Eigen::Vector3d c(0.4, 0.8, -0.2);
  for (int it = 0; it < 20; ++it) {
    const double t = 2.0 * gauss(rng), au = angle(rng), av = angle(rng);
    check_kernel(to_real6(fiber_point(c, t, std::polar(1.0, au), std::polar(1.0, av))),
                 fiber_tangent_frame(c, t, au, av));
  }
  // and dF itself has rank 3 there (the plane is exactly the kernel)
  const C3 z = fiber_point(c, 1.3, std::polar(1.0, 0.4), std::polar(1.0, 2.2));
  Eigen::Matrix<double, 3, 6> jac;
  const Vec6 y = to_real6(z);
  for (int k = 0; k < 6; ++k) {
    Vec6 e = Vec6::Zero();
    e[k] = 1e-6;
    jac.col(k) = (fibration_F(to_complex3(y + e)) - fibration_F(to_complex3(y - e))) / 2e-6;
  }
  CHECK(jac.fullPivLu().rank() == 3);
}

TEST_CASE("discriminant rays and fiber classification") {
  CHECK(classify_fiber(Eigen::Vector3d::Zero(), 1e-9).kind == FiberKind::ConeFiber);

  // the aligned label of L1 (mu2, mu3, imf) = (1/2, 1/2, 0)
  const FiberClass l1 = classify_fiber(Eigen::Vector3d(0.5, 0.5, 0.0), 1e-9);
  CHECK(l1.kind == FiberKind::SingularRay);
  CHECK(l1.ray_model == ModelId::L1);
  CHECK(l1.ray_param == doctest::Approx(1.0));
  const FiberClass l2 = classify_fiber(Eigen::Vector3d(-0.5, 0.0, 0.0), 1e-9);
  CHECK(l2.kind == FiberKind::SingularRay);
  CHECK(l2.ray_model == ModelId::L2);
  const FiberClass l3 = classify_fiber(Eigen::Vector3d(0.0, -0.5, 0.0), 1e-9);
  CHECK(l3.kind == FiberKind::SingularRay);
  CHECK(l3.ray_model == ModelId::L3);

  CHECK(classify_fiber(Eigen::Vector3d(1.0, 1.0, 1.0), 1e-9).kind ==
        FiberKind::SmoothCylinder);
  CHECK(in_Y(Eigen::Vector3d(0.5, 0.5, 0.0), 1e-9));
  CHECK(!in_Y(Eigen::Vector3d(1.0, 1.0, 1.0), 1e-9));

  // scaled models land on the same rays with the square of the scale
  for (double s : {0.5, 2.0}) {
    const C3 z = model_point(ModelId::L3, 0.3, Complex(0.2, -0.1));
    const Eigen::Vector3d f = fibration_F(C3(s * z));
    const FiberClass fc = classify_fiber(f, 1e-9);
    CHECK(fc.ray_model == ModelId::L3);
    CHECK(fc.ray_param == doctest::Approx(s * s).epsilon(1e-12));
  }
}

TEST_CASE("scale and translation compose as s L + b; moments are not shift-covariant") {
  Vec6 b;
  b << 0.3, 0.0, 0.0, 0.1, 0.0, 0.0;
  const DiscreteVarifold unit = sample_model(ModelId::L1, 2.0, 10);
  const DiscreteVarifold moved = make_model_varifold(ModelId::L1, 1.0, b, 2.0, 10);
  REQUIRE(unit.size() == moved.size());
  CHECK((moved.points().colwise() - b - unit.points()).cwiseAbs().maxCoeff() < 1e-15);

  const DiscreteVarifold doubled = make_model_varifold(ModelId::L1, 2.0, Vec6::Zero(), 2.0, 10);
  CHECK(mass_in_ball(doubled, 6.0) ==
        doctest::Approx(8.0 * mass_in_ball(unit, 3.0)).epsilon(1e-13));

  // mu_j(z + b) - mu_j(z) is not constant: the classifier must recenter first
  const C3 z1 = to_complex3(unit.point(0) + b);
  const C3 z2 = to_complex3(unit.point(unit.size() / 2) + b);
  const double shift1 = moment_mu(2, z1) - moment_mu(2, to_complex3(unit.point(0)));
  const double shift2 =
      moment_mu(2, z2) - moment_mu(2, to_complex3(unit.point(unit.size() / 2)));
  CHECK(std::abs(shift1 - shift2) > 1e-3);
}

TEST_CASE("moment maps restrict harmonically to translated models") {
  // Oracle: a parameter-grid Laplace-Beltrami in divergence form,
  // Lap u = (1/sqrt g) d_a (sqrt g g^{ab} d_b u), all derivatives central.
  // The translation leaves the induced metric alone but makes mu_2
  // nonconstant, so the vanishing is a real statement.
  Vec6 b;
  b << 0.2, -0.1, 0.05, 0.3, -0.15, 0.1;
  auto residual_at = [&](int n) {
    const double h_th = 2.0 * M_PI / n, h_s = 1.0 / n, h_ph = 2.0 * M_PI / n;
    const std::array<double, 3> hh = {h_th, h_s, h_ph};
    const int ns = n + 4;  // extra s-shells so second derivatives stay interior
    auto node = [&](int it, int is, int ip) {
      const double th = (((it % n) + n) % n + 0.5) * h_th;
      const double s = 1.0 + (is + 0.5) * h_s;
      const double ph = (((ip % n) + n) % n + 0.5) * h_ph;
      return std::array<double, 3>{th, s, ph};
    };
    auto value = [&](int it, int is, int ip) {
      const auto q = node(it, is, ip);
      const C3 z = model_point(ModelId::L1, q[0], std::polar(q[1], q[2]));
      return moment_mu(2, C3(z + to_complex3(b)));
    };
    auto metric = [&](int it, int is, int ip) {
      const auto q = node(it, is, ip);
      const double d = 1e-6;
      auto pt = [&](double a, double ss, double pp) {
        return to_real6(model_point(ModelId::L1, a, std::polar(ss, pp)));
      };
      const Vec6 e1 = (pt(q[0] + d, q[1], q[2]) - pt(q[0] - d, q[1], q[2])) / (2 * d);
      const Vec6 e2 = (pt(q[0], q[1] + d, q[2]) - pt(q[0], q[1] - d, q[2])) / (2 * d);
      const Vec6 e3 = (pt(q[0], q[1], q[2] + d) - pt(q[0], q[1], q[2] - d)) / (2 * d);
      Eigen::Matrix3d g;
      g << e1.dot(e1), e1.dot(e2), e1.dot(e3), e2.dot(e1), e2.dot(e2), e2.dot(e3),
          e3.dot(e1), e3.dot(e2), e3.dot(e3);
      return g;
    };
    // flux field W^a = sqrt(g) g^{ab} d_b u at every node
    std::vector<Eigen::Vector3d> w(static_cast<std::size_t>(n) * ns * n);
    auto widx = [&](int it, int is, int ip) {
      return (static_cast<std::size_t>(((it % n) + n) % n) * ns + is) * n +
             ((ip % n) + n) % n;
    };
    for (int it = 0; it < n; ++it)
      for (int is = 1; is < ns - 1; ++is)
        for (int ip = 0; ip < n; ++ip) {
          Eigen::Vector3d du;
          du[0] = (value(it + 1, is, ip) - value(it - 1, is, ip)) / (2 * h_th);
          du[1] = (value(it, is + 1, ip) - value(it, is - 1, ip)) / (2 * h_s);
          du[2] = (value(it, is, ip + 1) - value(it, is, ip - 1)) / (2 * h_ph);
          const Eigen::Matrix3d g = metric(it, is, ip);
          w[widx(it, is, ip)] = std::sqrt(g.determinant()) * (g.inverse() * du);
        }
    double worst = 0.0;
    for (int it = 0; it < n; ++it)
      for (int is = 2; is < ns - 2; ++is)
        for (int ip = 0; ip < n; ++ip) {
          double div = 0.0;
          for (int axis = 0; axis < 3; ++axis) {
            const int dt = axis == 0, ds = axis == 1, dp = axis == 2;
            div += (w[widx(it + dt, is + ds, ip + dp)][axis] -
                    w[widx(it - dt, is - ds, ip - dp)][axis]) /
                   (2.0 * hh[axis]);
          }
          const double sq = std::sqrt(metric(it, is, ip).determinant());
          worst = std::max(worst, std::abs(div / sq));
        }
    return worst;
  };
  const double coarse = residual_at(8);
  const double fine = residual_at(16);
  CHECK(fine < 0.6 * coarse);
  CHECK(fine < 0.05);
}
