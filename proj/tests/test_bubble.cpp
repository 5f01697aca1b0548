#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "slcone/bubble.hpp"

using namespace slcone;

namespace {

// t L1 sampled over the ball of radius `outer` (radially aligned at outer).
DiscreteVarifold scaled_model_ball(double t, double outer, int n_r = 180, int n_ang = 32) {
  return rescale(sample_model_annulus(ModelId::L1, 0.5, outer / t, n_r, n_ang, n_ang), t);
}

double snap_to_gap(const DiscreteVarifold& v, double r) {
  std::vector<double> rads(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) rads[i] = v.point(i).norm();
  std::sort(rads.begin(), rads.end());
  auto it = std::lower_bound(rads.begin(), rads.end(), r);
  if (it == rads.begin() || it == rads.end()) return r;
  return 0.5 * (*(it - 1) + *it);
}

}  // namespace

TEST_CASE("energy profiles: cone flat at zero, model concentrated at its scale") {
  const std::vector<double> grid = {0.02, 0.05, 0.1, 0.2, 0.4};
  const DiscreteVarifold cone = sample_cone(0.01, 0.6, 120, 16);
  const EnergyProfile flat = energy_profile(cone, Vec6::Zero(), 0.5, grid);
  for (double e : flat.energies) CHECK(e < 1e-12);

  const double t = 0.05;
  const DiscreteVarifold v = scaled_model_ball(t, 0.5);
  const EnergyProfile p = energy_profile(v, Vec6::Zero(), 0.5, grid);
  CHECK(p.energies.front() > 1.0);          // below the core scale: all of it
  CHECK(p.energies.back() < 0.05);          // far above: nearly gone
  for (std::size_t i = 1; i < p.energies.size(); ++i)
    CHECK(p.energies[i] <= p.energies[i - 1]);

  // off-center cone has positive energy
  Vec6 y = Vec6::Zero();
  y[0] = 0.1;
  const EnergyProfile off = energy_profile(cone, y, 0.5, grid);
  CHECK(off.energies.front() > 1e-3);

  const std::vector<double> bad = {0.2, 0.1};
  CHECK_THROWS_AS(energy_profile(cone, y, 0.5, bad), std::invalid_argument);
  const std::vector<double> high = {0.2, 0.6};
  CHECK_THROWS_AS(energy_profile(cone, y, 0.5, high), std::invalid_argument);
}

TEST_CASE("bubble scale: none on the cone, linear in t on the models") {
  const double eps = link_area() / 30.0;
  const DiscreteVarifold cone = sample_cone(0.01, 0.6, 120, 16);
  CHECK(!bubble_scale(cone, Vec6::Zero(), 0.5, eps).has_value());

  double ratio0 = 0.0;
  for (double t : {0.02, 0.05, 0.1}) {
    const DiscreteVarifold v = scaled_model_ball(t, 0.5, 150, 24);
    const auto d = bubble_scale(v, Vec6::Zero(), 0.5, eps);
    REQUIRE(d.has_value());
    const double ratio = *d / t;
    if (ratio0 == 0.0) ratio0 = ratio;
    CHECK(std::abs(ratio - ratio0) < 0.1 * ratio0);
  }

  // raising the threshold moves the crossing of the nonincreasing profile
  // inward: delta(2 eps) <= delta(eps)
  const DiscreteVarifold v = scaled_model_ball(0.05, 0.5, 150, 24);
  const auto d1 = bubble_scale(v, Vec6::Zero(), 0.5, eps);
  const auto d2 = bubble_scale(v, Vec6::Zero(), 0.5, 2.0 * eps);
  REQUIRE((d1 && d2));
  CHECK(*d2 <= *d1);
  CHECK_THROWS_AS(bubble_scale(v, Vec6::Zero(), 0.5, -1.0), std::invalid_argument);
}

TEST_CASE("bubble scale is exactly scale-equivariant") {
  const DiscreteVarifold v = scaled_model_ball(0.05, 0.5, 120, 20);
  const double eps = link_area() / 30.0;
  const auto d = bubble_scale(v, Vec6::Zero(), 0.5, eps);
  const auto ds = bubble_scale(rescale(v, 3.0), Vec6::Zero(), 1.5, eps);
  REQUIRE((d && ds));
  CHECK(*ds == doctest::Approx(3.0 * *d).epsilon(1e-12));
}

TEST_CASE("center selection lands on the bubble up to the grid spacing") {
  const double eps = link_area() / 30.0;
  const double t = 0.05;
  // explicit 3^6 grid of spacing 0.1 about the origin
  std::vector<Vec6> centers;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c)
        for (int d = -1; d <= 1; ++d)
          for (int e = -1; e <= 1; ++e)
            for (int f = -1; f <= 1; ++f) {
              Vec6 y;
              y << a, b, c, d, e, f;
              centers.push_back(0.1 * y);
            }

  const DiscreteVarifold v = scaled_model_ball(t, 0.7, 150, 24);
  const auto pick = bubble_center(v, centers, 0.5, eps);
  REQUIRE(pick.has_value());
  CHECK(pick->center.norm() < 1e-12);  // ties break toward the origin

  Vec6 b = Vec6::Zero();
  b[0] = 0.1;
  b[3] = -0.1;
  const auto moved = bubble_center(translate(v, b), centers, 0.5, eps);
  REQUIRE(moved.has_value());
  CHECK((moved->center - b).norm() < 1e-12);  // b sits on the grid

  const DiscreteVarifold cone = sample_cone(0.01, 0.6, 100, 12);
  CHECK(!bubble_center(cone, centers, 0.5, eps).has_value());
  CHECK_THROWS_AS(bubble_center(v, std::span<const Vec6>{}, 0.5, eps),
                  std::invalid_argument);
}

TEST_CASE("extraction is the exact group inverse") {
  const double t = 0.05;
  const DiscreteVarifold unit = sample_model_annulus(ModelId::L1, 0.5, 10.0, 60, 16, 16);
  const DiscreteVarifold v = rescale(unit, t);
  const DiscreteVarifold w = extract_bubble(v, Vec6::Zero(), t);
  REQUIRE(w.size() == unit.size());
  CHECK((w.points() - unit.points()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((w.weights() - unit.weights()).cwiseAbs().maxCoeff() <
        1e-13 * unit.weights().maxCoeff());

  // nontrivial limit: positive energy about every center
  std::mt19937_64 rng(51);
  std::normal_distribution<double> gauss(0.0, 0.2);
  CHECK(energy(w) > 1e-3);
  for (int it = 0; it < 10; ++it) {
    Vec6 b;
    for (int k = 0; k < 6; ++k) b[k] = gauss(rng);
    CHECK(energy(translate(w, -b)) > 1e-3);
  }
}

TEST_CASE("extracted bubbles have unit cone density at large radius") {
  const double t = 0.02;
  const double eps = link_area() / 30.0;
  const DiscreteVarifold v = scaled_model_ball(t, 0.85, 220, 24);
  const auto d = bubble_scale(v, Vec6::Zero(), 0.5, eps);
  REQUIRE(d.has_value());
  const DiscreteVarifold w = extract_bubble(v, Vec6::Zero(), *d);
  const double r16 = snap_to_gap(w, 16.0);
  REQUIRE(r16 > 15.0);
  const double density = mass_in_ball(w, r16) / std::pow(r16, 3);
  CHECK(std::abs(density - link_area() / 3.0) < 0.02 * link_area() / 3.0);
}

TEST_CASE("classification: s L + b comes back as (L, s, b) with a small residual") {
  Vec6 b;
  b << 0.3, 0.0, 0.0, 0.1, 0.0, 0.0;
  const DiscreteVarifold w = make_model_varifold(ModelId::L1, 2.0, b, 8.0, 44);
  const ClassifyOutcome out = classify_bubble(w);
  REQUIRE(out.ok);
  CHECK(out.fit.model == ModelId::L1);
  CHECK(std::abs(out.fit.scale - 2.0) < 0.02);
  CHECK((out.fit.translation - b).norm() < 5e-3);
  CHECK(out.fit.residual < 1e-2);
}

TEST_CASE("classification covers all three models and scales") {
  struct Case {
    ModelId id;
    double s;
  };
  for (const Case c : {Case{ModelId::L2, 0.7}, Case{ModelId::L3, 1.4}}) {
    Vec6 b;
    b << -0.05, 0.1, 0.02, 0.0, -0.08, 0.04;
    const DiscreteVarifold w = make_model_varifold(c.id, c.s, b, 8.0, 40);
    const ClassifyOutcome out = classify_bubble(w);
    REQUIRE(out.ok);
    CHECK(out.fit.model == c.id);
    CHECK(std::abs(out.fit.scale - c.s) < 0.02 * c.s);
    CHECK((out.fit.translation - b).norm() < 8e-3);
    CHECK(out.fit.residual < 1e-2);
  }
}

TEST_CASE("classification of the cone itself") {
  const DiscreteVarifold w = sample_cone(0.05, 8.0, 120, 32);
  const ClassifyOutcome out = classify_bubble(w);
  REQUIRE(out.ok);
  CHECK(out.fit.model == ModelId::Cone);
  CHECK(out.fiber_label.norm() < 1e-10);
  CHECK(out.fit.residual < 1e-2);
}

TEST_CASE("a smooth off-ray fiber is an honest classification failure") {
  const Eigen::Vector3d c(1.0, 1.0, 1.0);
  const DiscreteVarifold w = sample_fiber(c, -30.0, 30.0, 90, 24);
  const ClassifyOutcome out = classify_bubble(w);
  CHECK(!out.ok);
  CHECK(out.failure.find("not in the classified family") != std::string::npos);
  CHECK(out.fiber_class.kind == FiberKind::SmoothCylinder);
}

TEST_CASE("full scan recovers an off-grid translation through the pipeline") {
  const double rho = 0.5, t = 0.05;
  const double eps = link_area() / 30.0;
  Vec6 b;
  b << 0.07, -0.03, 0.05, 0.02, -0.04, 0.06;  // off every scan grid
  const DiscreteVarifold v = translate(scaled_model_ball(t, rho, 150, 32), b);
  const BubbleScan scan = run_bubble_scan(v, rho, eps);
  REQUIRE(scan.found);
  CHECK((scan.center - b).norm() < 2e-2);
  REQUIRE(scan.classification.ok);
  // the extraction center plus the classifier's recentering recovers b
  const Vec6 total = scan.center + scan.delta * scan.classification.fit.translation;
  CHECK((total - b).norm() < 1e-4);
  CHECK(scan.classification.fit.model == ModelId::L1);
  CHECK(scan.classification.fit.residual < 1e-2);
}

TEST_CASE("full scan: scale detection, extraction, classification") {
  const double t = 0.05;
  const double eps = link_area() / 30.0;
  const DiscreteVarifold v = scaled_model_ball(t, 0.5, 150, 32);
  const BubbleScan scan = run_bubble_scan(v, 0.5, eps);
  REQUIRE(scan.found);
  CHECK(scan.center.norm() < 0.01);
  CHECK(scan.delta / t == doctest::Approx(2.28).epsilon(0.05));
  REQUIRE(scan.classification.ok);
  CHECK(scan.classification.fit.model == ModelId::L1);
  // the recovered scale matches the extraction scale: s = t / delta*
  CHECK(scan.classification.fit.scale * scan.delta / t ==
        doctest::Approx(1.0).epsilon(0.02));
  CHECK(scan.classification.fit.residual < 1e-2);
}
