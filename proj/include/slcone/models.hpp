#pragma once

// The explicit smoothing models L1-L3, the moment maps and the fibration
// F = (mu2, mu3, Im f) of C^3, the discriminant rays Y, and the smooth-fiber
// charts with their positive cubic solver.
//
// Two label charts coexist: the fibration value c = (mu2, mu3, Im f) and the
// fiber-chart label d = (|z1|^2-|z3|^2, |z2|^2-|z3|^2, Im z1 z2 z3). They are
// related by the fixed linear map d = (2 mu3, 2 mu3 - 2 mu2, Im f), which the
// fiber round-trip tests pin down. Y's three rays are the d-directions
// (1,0,0), (0,1,0), (-1,-1,0); the unit models sit at d = those directions.

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <string>

#include "slcone/cone.hpp"
#include "slcone/varifold.hpp"

namespace slcone {

enum class ModelId { Cone, L1, L2, L3 };

const char* model_name(ModelId id);
ModelId model_from_name(const std::string& name);

using C3 = Eigen::Vector3cd;

C3 to_complex3(const Vec6& y);
Vec6 to_real6(const C3& z);

// 2 mu_j = |z1|^2 - |zj|^2, j in {2, 3}.
double moment_mu(int j, const C3& z);
// i^{m+1} z1 ... zm; for m = 3 this is z1 z2 z3.
std::complex<double> f_holo(const C3& z);
// (mu2, mu3, Im f).
Eigen::Vector3d fibration_F(const C3& z);

Eigen::Vector3d chart_label_from_moment(const Eigen::Vector3d& c);
Eigen::Vector3d moment_label_from_chart(const Eigen::Vector3d& d);

// Chart of a smoothing model: |angle input| = 1 is represented by the real
// angle theta; plane_coord ranges over C. Throws for ModelId::Cone.
C3 model_point(ModelId id, double theta, std::complex<double> plane_coord);
Mat63 model_tangent_frame(ModelId id, double theta, std::complex<double> plane_coord);

// Residual of the model's defining equations at z (0 iff z lies on the model).
double model_residual(ModelId id, const C3& z);

// Quadrature samples of the model portion with |plane_coord| <= R.
DiscreteVarifold sample_model(ModelId id, double R, int n);
DiscreteVarifold sample_model(ModelId id, double R, int n_theta, int n_s, int n_phi);

// Samples with shell boundaries aligned to ambient radii in [sigma, rho]
// (log-spaced); empty when the annulus misses the model.
DiscreteVarifold sample_model_annulus(ModelId id, double sigma, double rho, int n_r,
                                      int n_theta, int n_phi);

// Streaming form of the annulus sampler: the callback sees every (point,
// orthonormal frame, weight) without anything being stored. Heavy reductions
// (mass/energy at high resolution) run in constant memory through this.
void for_each_model_annulus_sample(
    ModelId id, double sigma, double rho, int n_r, int n_theta, int n_phi,
    const std::function<void(const Vec6&, const Mat63&, double)>& fn);

// s L + b acting on samples: rescale then translate.
DiscreteVarifold make_model_varifold(ModelId id, double s, const Vec6& b, double R, int n);

// The unique nonnegative root of (phi + c1)(phi + c2) phi = t^2 + c3^2;
// c1, c2 are symmetric and must be >= 0 after sorting. Monotone bisection
// plus Newton polish, relative accuracy 1e-14.
double solve_phi(double c1, double c2, double t, double c3);

inline constexpr double kDiscriminantTol = 1e-9;

// Distance (in the d-chart) from the label to the discriminant rays; the
// nearest ray index (0..2) is written through `ray` when given.
double discriminant_distance(const Eigen::Vector3d& c_moment, int* ray = nullptr,
                             double* ray_param = nullptr);

bool in_Y(const Eigen::Vector3d& c_moment, double tol = kDiscriminantTol);

enum class FiberKind { ConeFiber, SingularRay, SmoothCylinder };

struct FiberClass {
  FiberKind kind = FiberKind::SmoothCylinder;
  ModelId ray_model = ModelId::Cone;  // which L_i when kind == SingularRay
  double ray_param = 0.0;             // a with the ray point a*(unit direction)
  double ray_distance = 0.0;
  bool near_discriminant = false;     // within tol but not numerically on it
};

FiberClass classify_fiber(const Eigen::Vector3d& c_moment, double tol = kDiscriminantTol);

// Smooth-fiber chart (c off the discriminant; throws otherwise).
C3 fiber_point(const Eigen::Vector3d& c_moment, double t, std::complex<double> u,
               std::complex<double> v);

struct FiberCoords {
  double t = 0.0;
  std::complex<double> u, v;
};

FiberCoords fiber_coords(const Eigen::Vector3d& c_moment, const C3& z);

Mat63 fiber_tangent_frame(const Eigen::Vector3d& c_moment, double t, double angle_u,
                          double angle_v);

DiscreteVarifold sample_fiber(const Eigen::Vector3d& c_moment, double t_min, double t_max,
                              int n_t, int n_angle);

}  // namespace slcone
