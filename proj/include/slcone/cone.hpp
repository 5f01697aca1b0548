#pragma once

// The Harvey-Lawson T^2-cone in C^3: chart, exact tangent/normal frames, the
// flat link metric, quadrature sampling, cylindrical norms and normal graphs.
//
// Chart: (r, t1, t2) -> (r/sqrt3) (e^{i t1}, e^{i t2}, e^{-i(t1+t2)}), r > 0.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <functional>

#include "slcone/varifold.hpp"

namespace slcone {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat63 = Eigen::Matrix<double, 6, 3>;

// Real components of the chart, templated on the angle scalar so the same
// expressions serve double evaluation and complex-step differentiation.
template <typename T>
std::array<T, 6> cone_chart_components(double r, const T& t1, const T& t2) {
  using std::cos;
  using std::sin;
  const double a = r / std::sqrt(3.0);
  const T s = t1 + t2;
  return {a * cos(t1), a * sin(t1), a * cos(t2), a * sin(t2), a * cos(s), -a * sin(s)};
}

Vec6 cone_point(double r, double t1, double t2);

// Orthonormal tangent frame {unit radial, e1, e2} from the analytic chart
// derivatives; exact up to rounding.
Mat63 cone_tangent_frame(double r, double t1, double t2);

// J times the tangent frame; for a Lagrangian cone this is an orthonormal
// frame of the normal bundle.
Mat63 cone_normal_frame(double r, double t1, double t2);

// Induced metric on the T^2 link in (t1, t2) coordinates: (1/3)[[2,1],[1,2]].
Eigen::Matrix2d link_metric();
Eigen::Matrix2d link_metric_inverse();

// Recomputed by complex-step differentiation of the chart at (t1, t2);
// machine-precision oracle for the closed form.
Eigen::Matrix2d link_metric_numeric(double t1, double t2);

// sqrt(det g) (2 pi)^2 = 4 pi^2 / sqrt 3; the cone's unit-ball mass is a third
// of it.
double link_area();

// Midpoint-rule samples of the cone over the annulus sigma <= |y| < rho,
// log-spaced in radius, n_theta^2 link cells, exact frames and Jacobian
// weights.
DiscreteVarifold sample_cone(double sigma, double rho, int n_r, int n_theta);

// A normal vector field sampled on a shells x link product grid over
// C intersect A_{sigma,rho}. Values are components in the normal frame
// {J r-hat, J e1, J e2}; radii are log-midpoints, angles are midpoints.
struct NormalGraphField {
  double sigma = 0.0, rho = 0.0;
  Eigen::VectorXd radii;  // n_r shell radii
  int n1 = 0, n2 = 0;     // link grid
  Mat values;             // 3 x (n_r * n1 * n2), normal components per node
  Vec solve_residuals;    // per-node nearest-point residual (empty if synthetic)

  int n_r() const { return static_cast<int>(radii.size()); }
  int node(int ir, int i1, int i2) const { return (ir * n1 + i1) * n2 + i2; }
  double theta1(int i1) const { return (i1 + 0.5) * 2.0 * M_PI / n1; }
  double theta2(int i2) const { return (i2 + 0.5) * 2.0 * M_PI / n2; }
};

NormalGraphField make_normal_field(
    double sigma, double rho, int n_r, int n1, int n2,
    const std::function<Eigen::Vector3d(double r, double t1, double t2)>& components);

// Ambient displacement vector at a grid node.
Vec6 field_ambient(const NormalGraphField& f, int ir, int i1, int i2);

// Cylindrical k-norm, k in {0, 1}: sup over the grid of
// sum_{i+j<=k} |d_t^i grad_Sigma^j u|_{g0} / r, with t = log r and
// derivatives of the ambient-valued field by centered differences.
double cyl_norm(const NormalGraphField& f, int k);

inline constexpr double kGraphChartBound = 0.2;

// Normal-exponential graph of the field (flat ambient: node + offset);
// frames and weights from finite-difference tangents. Throws if
// cyl_norm(u, 1) >= kGraphChartBound.
DiscreteVarifold graph_cyl(const NormalGraphField& f);

}  // namespace slcone
