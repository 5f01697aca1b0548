#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "slcone/asymptotics.hpp"

using namespace slcone;

namespace {

Vec6 small_b() {
  Vec6 b;
  b << 0.01, 0.0, 0.02, 0.0, 0.0, -0.01;
  return b;
}

}  // namespace

TEST_CASE("graphing the cone over itself gives the zero field") {
  const NormalGraphField f = graph_over_cone(cone_target(), 2.0, 4.0, 6, 12, 12);
  CHECK(f.values.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(f.solve_residuals.maxCoeff() < 1e-11);
}

TEST_CASE("a small translation appears as the normal part of b, constant in r") {
  const Vec6 b = small_b();
  const NormalGraphField f =
      graph_over_cone(cone_target(1.0, b), 4.0, 8.0, 8, 16, 16);
  double worst = 0.0;
  for (int ir = 0; ir < f.n_r(); ++ir)
    for (int i1 = 0; i1 < f.n1; ++i1)
      for (int i2 = 0; i2 < f.n2; ++i2) {
        const Mat63 n = cone_normal_frame(f.radii[ir], f.theta1(i1), f.theta2(i2));
        const Eigen::Vector3d expected = n.transpose() * b;
        worst = std::max(
            worst, (f.values.col(f.node(ir, i1, i2)) - expected).norm());
      }
  // agreement to O(|b|^2 / r)
  CHECK(worst < 2.0 * b.squaredNorm() / 4.0);
}

TEST_CASE("the model over the cone: decaying displacement with exponent -1") {
  const GraphTarget t = model_target(ModelId::L1);
  const NormalGraphField far = graph_over_cone(t, 4.0, 16.0, 12, 16, 16);
  CHECK(far.values.cwiseAbs().maxCoeff() > 0.0);

  // sup norms per annulus decay (hl_cone cylindrical norms)
  const NormalGraphField inner = graph_over_cone(t, 2.0, 4.0, 8, 16, 16);
  const NormalGraphField outer = graph_over_cone(t, 4.0, 8.0, 8, 16, 16);
  CHECK(cyl_norm(outer, 0) < cyl_norm(inner, 0));

  const AsymptoticReport rep = decay_report(far);
  CHECK(std::abs(rep.leading_exponent + 1.0) <= 0.1);

  // sup-norm profile over shells fits the same exponent
  std::vector<std::pair<double, double>> prof;
  for (int ir = 0; ir < far.n_r(); ++ir) {
    double sup = 0.0;
    for (int i1 = 0; i1 < far.n1; ++i1)
      for (int i2 = 0; i2 < far.n2; ++i2)
        sup = std::max(sup, far.values.col(far.node(ir, i1, i2)).norm());
    prof.emplace_back(far.radii[ir], sup);
  }
  CHECK(std::abs(fit_decay_exponent(prof).exponent + 1.0) <= 0.1);
}

TEST_CASE("decay report on an exactly translated cone: exponent 0, b recovered") {
  const Vec6 b = small_b();
  const NormalGraphField f =
      graph_over_cone(cone_target(1.0, b), 4.0, 8.0, 8, 16, 16);
  const AsymptoticReport rep = decay_report(f);
  CHECK(std::abs(rep.leading_exponent) < 0.05);
  CHECK((rep.lambda_one_block - b).norm() < 1e-3);
}

TEST_CASE("a synthesized pure mode comes back with its exponent and nothing else") {
  // gamma = 6 mode times r^{-3} = r^{beta(6)}
  const auto field = make_normal_field(
      2.0, 8.0, 10, 16, 16, [](double r, double t1, double t2) -> Eigen::Vector3d {
        return {std::pow(r, -3.0) * std::cos(t1 - t2), 0.0, 0.0};
      });
  const AsymptoticReport rep = decay_report(field);
  double main_amp = 0.0;
  for (const ModeDecay& md : rep.modes) {
    if (md.component == 0 && md.n1 == 1 && md.n2 == -1 && !md.sine) {
      CHECK(md.on_grid);
      CHECK(md.snapped == doctest::Approx(-3.0));
      main_amp = std::abs(md.amplitude);
    } else {
      CHECK(std::abs(md.amplitude) < 1e-10);
    }
  }
  CHECK(main_amp == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.leading_exponent == doctest::Approx(-3.0));
  CHECK(rep.tail_norm < 1e-8);
}

TEST_CASE("round trip: graph_cyl of a synthetic field, then graph it back") {
  const auto comps = [](double r, double t1, double t2) -> Eigen::Vector3d {
    return {0.03 * std::cos(t1) / r, -0.02 * std::sin(t2), 0.01 * std::cos(t1 + t2) / r};
  };
  const auto u = make_normal_field(2.0, 6.0, 10, 20, 20, comps);
  REQUIRE(cyl_norm(u, 1) < 0.1);
  const NormalGraphField back =
      graph_over_cone(field_target(comps), 2.0, 6.0, 10, 20, 20);
  CHECK((back.values - u.values).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("recenter: exact translations are recovered and removed") {
  // pure cone: |b| <= 0.05 recovered within 1e-3
  Vec6 b;
  b << 0.01, 0.0, 0.02, 0.0, 0.0, -0.01;
  const RecenterResult rc = recenter(cone_target(1.0, b), 4.0, 8.0, 8, 16, 16);
  CHECK((rc.b_hat - b).norm() < 1e-3);
  CHECK(!rc.already_centered);

  // the centered cone reports (numerically) zero with the flag
  const RecenterResult rc0 = recenter(cone_target(), 4.0, 8.0, 8, 16, 16);
  CHECK(rc0.b_hat.norm() < 1e-9);
  CHECK(rc0.already_centered);

  // after removing b_hat the degree-one block collapses by 10x or more
  const NormalGraphField before =
      graph_over_cone(cone_target(1.0, b), 4.0, 8.0, 8, 16, 16);
  const NormalGraphField after = graph_over_cone(
      translated(cone_target(1.0, b), -rc.b_hat), 4.0, 8.0, 8, 16, 16);
  CHECK(lambda_one_block(after).norm() < 0.1 * lambda_one_block(before).norm());
}

TEST_CASE("recenter on the translated model tolerates the model's own tail") {
  Vec6 b;
  b << 0.03, -0.01, 0.0, 0.02, -0.04, 0.01;
  const RecenterResult rc =
      recenter(model_target(ModelId::L1, 1.0, b), 8.0, 16.0, 8, 16, 16);
  CHECK((rc.b_hat - b).norm() < 5e-3);
}

TEST_CASE("recenter is equivariant and idempotent") {
  Vec6 b1, b2;
  b1 << 0.02, 0.01, -0.01, 0.0, 0.03, 0.0;
  b2 << -0.01, 0.02, 0.0, 0.01, 0.0, -0.02;
  const RecenterResult r1 = recenter(model_target(ModelId::L2, 1.0, b1), 8.0, 16.0, 8, 16, 16);
  const RecenterResult r2 =
      recenter(model_target(ModelId::L2, 1.0, b1 + b2), 8.0, 16.0, 8, 16, 16);
  CHECK((r2.b_hat - r1.b_hat - b2).norm() < 1e-3);

  // a second application moves the estimate below the solver floor
  const GraphTarget centered = translated(model_target(ModelId::L2, 1.0, b1), -r1.b_hat);
  const RecenterResult again = recenter(centered, 8.0, 16.0, 8, 16, 16);
  CHECK(again.b_hat.norm() < 1e-6);
}

TEST_CASE("graphing a raw sampled varifold reproduces the chart route") {
  const DiscreteVarifold samples = sample_model_annulus(ModelId::L1, 3.0, 20.0, 64, 64, 64);
  const NormalGraphField from_samples = graph_over_cone(samples, 4.0, 16.0, 8, 12, 12);
  const NormalGraphField from_chart =
      graph_over_cone(model_target(ModelId::L1), 4.0, 16.0, 8, 12, 12);
  CHECK((from_samples.values - from_chart.values).cwiseAbs().maxCoeff() < 2e-2);
  const AsymptoticReport rep = decay_report(from_samples);
  CHECK(std::abs(rep.leading_exponent + 1.0) <= 0.15);
}

TEST_CASE("non-graphical inputs are refused") {
  // the cone annulus [4, 8] holds no sample of 40 L1 (its core starts at 40)
  const DiscreteVarifold far = rescale(sample_model(ModelId::L1, 2.0, 10), 40.0);
  CHECK_THROWS_AS(graph_over_cone(far, 4.0, 8.0, 4, 8, 8), std::runtime_error);
}

TEST_CASE("decay reports need enough shells to fit") {
  const NormalGraphField thin = graph_over_cone(cone_target(), 2.0, 4.0, 3, 8, 8);
  CHECK_THROWS_AS(decay_report(thin), std::invalid_argument);
}
