#include "slcone/calib.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace slcone {

AlternatingForm<double> CyStructure::omega_form() const {
  const int n = 2 * m;
  AlternatingForm<double> f(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      f.set_coefficient((1u << i) | (1u << j), omega(i, j));
  return f;
}

double CyStructure::j_square_residual() const {
  const int n = 2 * m;
  return (complex_structure * complex_structure + Mat::Identity(n, n)).norm();
}

double CyStructure::metric_residual() const {
  const double p2 = conformal_factor * conformal_factor;
  return (metric - p2 * omega * complex_structure).norm();
}

double CyStructure::factor_residual() const {
  return std::abs(conformal_factor - psi_factor(*this));
}

CyStructure flat_structure(int m) {
  if (m < 1 || m > 4)
    throw std::invalid_argument("flat_structure: complex dimension must be in [1, 4]");
  const int n = 2 * m;
  CyStructure cy;
  cy.m = m;
  cy.omega = Mat::Zero(n, n);
  cy.complex_structure = Mat::Zero(n, n);
  for (int k = 0; k < m; ++k) {
    const int x = 2 * k, y = 2 * k + 1;
    cy.omega(x, y) = 1.0;
    cy.omega(y, x) = -1.0;
    cy.complex_structure(y, x) = 1.0;   // J e_x = e_y
    cy.complex_structure(x, y) = -1.0;  // J e_y = -e_x
  }
  AlternatingForm<Complex> Omega(n, 1);
  Omega.set_coefficient(1u << 0, Complex(1, 0));
  Omega.set_coefficient(1u << 1, Complex(0, 1));
  for (int k = 1; k < m; ++k) {
    AlternatingForm<Complex> dz(n, 1);
    dz.set_coefficient(1u << (2 * k), Complex(1, 0));
    dz.set_coefficient(1u << (2 * k + 1), Complex(0, 1));
    Omega = wedge(Omega, dz);
  }
  cy.holomorphic_form = Omega;
  cy.metric = Mat::Identity(n, n);
  cy.conformal_factor = 1.0;
  return cy;
}

double psi_factor(const AlternatingForm<double>& omega,
                  const AlternatingForm<Complex>& Omega, int m) {
  if (omega.degree() != 2 || Omega.degree() != m || omega.dim() != 2 * m)
    throw std::invalid_argument("psi_factor: omega must be a 2-form and Omega an m-form on R^{2m}");
  double fact = 1.0;
  for (int k = 2; k <= m; ++k) fact *= k;
  const AlternatingForm<double> top = wedge_power(omega, m);
  const double lhs = top[0] / fact;  // single top-degree coefficient
  if (std::abs(lhs) < 1e-300)
    throw std::invalid_argument("psi_factor: omega^m vanishes (degenerate symplectic form)");

  const int s = (m * (m - 1)) / 2;
  Complex pref = std::pow(Complex(0, 1) / 2.0, m);
  if (s % 2 != 0) pref = -pref;
  const AlternatingForm<Complex> rhs_form = wedge(Omega, conjugate(Omega)) * pref;
  const Complex rhs = rhs_form[0];
  if (std::abs(rhs.imag()) > 1e-10 * (1.0 + std::abs(rhs.real())))
    throw std::invalid_argument("psi_factor: Omega ^ conj(Omega) side is not real");
  const double ratio = rhs.real() / lhs;
  if (!(ratio > 0.0))
    throw std::invalid_argument("psi_factor: not an almost Calabi-Yau pair (nonpositive ratio)");
  return std::pow(ratio, 1.0 / (2.0 * m));
}

double psi_factor(const CyStructure& cy) {
  return psi_factor(cy.omega_form(), cy.holomorphic_form, cy.m);
}

double orthonormality_residual(const Mat& frame) {
  return (frame.transpose() * frame - Mat::Identity(frame.cols(), frame.cols()))
      .cwiseAbs()
      .maxCoeff();
}

TangentPlane make_plane(const Vec& base_point, const Mat& raw_frame) {
  if (raw_frame.rows() != base_point.size())
    throw std::invalid_argument("make_plane: frame rows must match ambient dimension");
  Mat q = raw_frame;
  for (int j = 0; j < q.cols(); ++j) {
    for (int i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    const double nrm = q.col(j).norm();
    if (nrm < 1e-12 * (1.0 + raw_frame.col(j).norm()))
      throw std::invalid_argument("make_plane: degenerate frame");
    q.col(j) /= nrm;
  }
  TangentPlane plane;
  plane.base_point = base_point;
  plane.frame = q;
  plane.ingest_correction = (q - raw_frame).norm();
  return plane;
}

CalibrationDefect calibration_defect(const CyStructure& cy, const TangentPlane& plane) {
  if (orthonormality_residual(plane.frame) > kOrthonormalTol)
    throw std::invalid_argument("calibration_defect: frame not orthonormal");
  CalibrationDefect d;
  const Mat restricted = plane.frame.transpose() * cy.omega * plane.frame;
  d.lagrangian = restricted.norm() / std::sqrt(2.0);
  const Complex val = cy.holomorphic_form.evaluate(plane.frame);
  d.im_part = std::abs(val.imag());
  d.angle = 1.0 - std::abs(val.real());
  return d;
}

AlternatingForm<double> oriented_unit(const CyStructure& cy, const TangentPlane& plane,
                                      double tol) {
  const CalibrationDefect d = calibration_defect(cy, plane);
  if (d.angle >= tol)
    throw std::invalid_argument("oriented_unit: not a calibrated plane");
  AlternatingForm<double> mv = frame_wedge(plane.frame);
  const double re = pairing(cy.re_holomorphic(), mv);
  if (re < 0.0) mv *= -1.0;
  return mv;
}

Mat real_matrix(const Eigen::MatrixXcd& u) {
  const int m = static_cast<int>(u.rows());
  Mat r = Mat::Zero(2 * m, 2 * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double a = u(i, j).real(), b = u(i, j).imag();
      r(2 * i, 2 * j) = a;
      r(2 * i, 2 * j + 1) = -b;
      r(2 * i + 1, 2 * j) = b;
      r(2 * i + 1, 2 * j + 1) = a;
    }
  return r;
}

Eigen::MatrixXcd random_special_unitary(int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd g(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < m; ++j) {
    Complex d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  const Complex det = q.determinant();
  q.col(0) /= det;  // rotate one column to land in SU(m)
  return q;
}

}  // namespace slcone
