#pragma once

// Flat Calabi-Yau linear algebra on R^{2m} = C^m: calibration forms, the
// conformal factor, and per-plane special Lagrangian defect measurement.
//
// Coordinates are interleaved (x_1, y_1, ..., x_m, y_m) with z_k = x_k + i y_k.

#include <Eigen/Dense>

#include "slcone/forms.hpp"

namespace slcone {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct CyStructure {
  int m = 0;                                // complex dimension, 2m ambient
  Mat omega;                                // symplectic bilinear form, 2m x 2m
  Mat complex_structure;                    // J, 2m x 2m
  AlternatingForm<Complex> holomorphic_form;  // degree-m complex volume form
  Mat metric;                               // psi^2 * omega(., J.)
  double conformal_factor = 1.0;            // psi

  AlternatingForm<double> omega_form() const;
  AlternatingForm<double> re_holomorphic() const { return real_part(holomorphic_form); }
  AlternatingForm<double> im_holomorphic() const { return imag_part(holomorphic_form); }

  // Residuals of the structure equations; all zero (to rounding) for a valid
  // structure.
  double j_square_residual() const;
  double metric_residual() const;
  double factor_residual() const;
};

// The standard flat structure on C^m, m in [1, 4]: omega_0, J_0, Omega_0,
// Euclidean metric, conformal factor 1.
CyStructure flat_structure(int m);

// The unique psi > 0 with psi^{2m}/m! omega^m = (-1)^s (i/2)^m Omega ^ conj(Omega),
// s = m(m-1)/2. Throws if omega^m = 0 or the right side is not a positive
// multiple of omega^m.
double psi_factor(const AlternatingForm<double>& omega,
                  const AlternatingForm<Complex>& Omega, int m);
double psi_factor(const CyStructure& cy);

struct TangentPlane {
  Vec base_point;            // R^{2m}
  Mat frame;                 // 2m x m, orthonormal columns
  double ingest_correction = 0.0;  // size of the Gram-Schmidt adjustment
};

inline constexpr double kOrthonormalTol = 1e-10;

double orthonormality_residual(const Mat& frame);

// Re-orthonormalizes the given spanning vectors (modified Gram-Schmidt) and
// records the correction size. Throws on a degenerate frame.
TangentPlane make_plane(const Vec& base_point, const Mat& raw_frame);

struct CalibrationDefect {
  double lagrangian = 0.0;  // Frobenius norm of omega restricted to the plane
  double im_part = 0.0;     // |Im Omega(frame)|
  double angle = 0.0;       // 1 - |Re Omega(frame)|, orientation-optimal
  double sum() const { return lagrangian + im_part + angle; }
};

// Throws if the frame is not orthonormal within kOrthonormalTol.
CalibrationDefect calibration_defect(const CyStructure& cy, const TangentPlane& plane);

// Oriented unit simple m-vector of a calibrated plane: wedge of the frame,
// sign fixed so the pairing with Re Omega is +1. Throws "not a calibrated
// plane" if angle defect >= tol.
AlternatingForm<double> oriented_unit(const CyStructure& cy, const TangentPlane& plane,
                                      double tol = 1e-6);

// Real 2m x 2m matrix of a complex-linear map on C^m (column-major complex
// entries, interleaved real coordinates).
Mat real_matrix(const Eigen::MatrixXcd& u);

// Haar-ish random special unitary (det = 1) on C^m, for invariance sampling.
Eigen::MatrixXcd random_special_unitary(int m, std::uint64_t seed);

}  // namespace slcone
