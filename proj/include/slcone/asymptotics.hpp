#pragma once

// Graph-over-cone extraction, per-mode decay fitting against the indicial
// grid, and translational recentering from the degree-one coefficient block.

#include <Eigen/Dense>

#include <functional>
#include <string>

#include "slcone/cone.hpp"
#include "slcone/models.hpp"
#include "slcone/spectral.hpp"

namespace slcone {

// A target surface given by a chart, with a parameter guess per cone node;
// graph_over_cone runs Newton in the chart parameters.
struct GraphTarget {
  std::function<Vec6(const Eigen::Vector3d&)> point;
  std::function<Eigen::Vector3d(double r, double t1, double t2)> guess;
  std::string name;
};

GraphTarget cone_target(double s = 1.0, const Vec6& b = Vec6::Zero());
GraphTarget model_target(ModelId id, double s = 1.0, const Vec6& b = Vec6::Zero());
GraphTarget fiber_target(const Eigen::Vector3d& c_moment);
// Closed-form normal graph over the cone (components in the normal frame).
GraphTarget field_target(
    const std::function<Eigen::Vector3d(double r, double t1, double t2)>& components);
GraphTarget translated(const GraphTarget& t, const Vec6& b);

inline constexpr double kTubeFraction = 0.35;  // |u| < frac * r or not graphical

// For each grid node over C intersect A_{sigma,rho}, the displacement along
// the cone's normal space to the unique nearby target point. Throws
// "not graphical on annulus" when the solve fails or leaves the tube.
NormalGraphField graph_over_cone(const GraphTarget& target, double sigma, double rho,
                                 int n_r, int n1, int n2);

// Nearest-sample variant for raw varifolds: the sample plane is used to
// interpolate onto the node's normal line; residuals report the in-plane
// correction distance (no fixed tolerance).
NormalGraphField graph_over_cone(const DiscreteVarifold& target, double sigma, double rho,
                                 int n_r, int n1, int n2);

struct ModeDecay {
  int n1 = 0, n2 = 0;
  bool sine = false;
  int component = 0;     // normal-frame component
  double amplitude = 0.0;  // signed prefactor at r = 1
  double exponent = 0.0;   // free log-log fit
  bool on_grid = false;    // within 0.15 of an indicial exponent
  double snapped = 0.0;    // the matched grid exponent when on_grid
  double fit_residual = 0.0;
};

struct AsymptoticReport {
  std::vector<ModeDecay> modes;     // significant modes only
  double leading_exponent = 0.0;    // largest exponent among them
  Vec6 lambda_one_block = Vec6::Zero();  // best-fit translation pattern
  double lambda_one_misfit = 0.0;
  double tail_norm = 0.0;  // sup |field - fitted synthesis|
};

AsymptoticReport decay_report(const NormalGraphField& field, double gamma_max = 12.0);

// Weighted least-squares fit of the field against the normal pattern of a
// constant translation; the building block of recenter.
Vec6 lambda_one_block(const NormalGraphField& field);

struct RecenterResult {
  Vec6 b_hat = Vec6::Zero();
  int passes = 0;
  bool already_centered = false;
};

RecenterResult recenter(const GraphTarget& target, double sigma, double rho, int n_r,
                        int n1, int n2);
RecenterResult recenter(const DiscreteVarifold& target, double sigma, double rho, int n_r,
                        int n1, int n2);

}  // namespace slcone
