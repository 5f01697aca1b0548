#pragma once

// Blow-up scale detection: annulus-energy profiles, the threshold scale
// delta(y), center selection over a grid, rescaled extraction, and model
// classification of the extracted limit.

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slcone/asymptotics.hpp"
#include "slcone/models.hpp"
#include "slcone/varifold.hpp"

namespace slcone {

struct EnergyProfile {
  std::vector<double> deltas;
  std::vector<double> energies;  // energy of (V - y) over A_{delta, rho}
  int excluded_samples = 0;      // samples sitting exactly at y
};

EnergyProfile energy_profile(const DiscreteVarifold& v, const Vec6& y, double rho,
                             std::span<const double> delta_grid);

// Smallest delta with annulus energy <= eps/2 (bisection on the nonincreasing
// profile, tolerance bisect_tol * rho); nullopt when the profile never
// reaches eps/2.
std::optional<double> bubble_scale(const DiscreteVarifold& v, const Vec6& y, double rho,
                                   double eps, double bisect_tol = 1e-3);

struct CenterPick {
  Vec6 center = Vec6::Zero();
  double delta = 0.0;
  int plateau_count = 0;  // grid centers with delta within 5% of the best
};

std::optional<CenterPick> bubble_center(const DiscreteVarifold& v,
                                        std::span<const Vec6> centers, double rho,
                                        double eps);

// rescale(translate(V, -y), 1/delta).
DiscreteVarifold extract_bubble(const DiscreteVarifold& v, const Vec6& y, double delta);

struct ModelFit {
  ModelId model = ModelId::Cone;
  double scale = 1.0;
  Vec6 translation = Vec6::Zero();
  double residual = 0.0;  // relative weak distance over the test balls
};

struct ClassifyOutcome {
  bool ok = false;
  ModelFit fit;
  std::string failure;              // honest failure reason when !ok
  Eigen::Vector3d fiber_label = Eigen::Vector3d::Zero();  // recentered F median
  double label_spread = 0.0;        // 90th percentile |F - median|
  FiberClass fiber_class;
};

struct ClassifyOptions {
  double annulus_lo_frac = 0.45;  // graph annulus as fractions of the extent
  double annulus_hi_frac = 0.90;
  int n_r = 8, n_link = 24;
  double label_tol_scale = 0.05;  // ray tolerance = scale * max(1, |d|)
  int reference_n = 48;           // resolution of the comparison samples
};

// recenter -> fiber label median -> ray classification -> scale from the ray
// parameter -> relative weak distance against freshly sampled s L + b.
ClassifyOutcome classify_bubble(const DiscreteVarifold& w, const ClassifyOptions& opts = {});

struct BubbleScan {
  double rho = 0.0, eps = 0.0;
  Vec6 center = Vec6::Zero();
  double delta = 0.0;
  int plateau_count = 0;
  bool found = false;
  ClassifyOutcome classification;
};

// Multi-pass center search over B_{rho * eps} followed by extraction and
// classification.
BubbleScan run_bubble_scan(const DiscreteVarifold& v, double rho, double eps,
                           int nodes_per_axis = 3, int passes = 4);

}  // namespace slcone
