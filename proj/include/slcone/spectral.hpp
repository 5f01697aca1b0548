#pragma once

// Laplace spectrum of the flat T^2 link, indicial roots of the cone operator,
// the stability window, and harmonic-expansion / decay-exponent fitting on
// cone annuli. Convention: t = log r throughout.

#include <Eigen/Dense>

#include <functional>
#include <utility>
#include <vector>

#include "slcone/cone.hpp"

namespace slcone {

// gamma(n) = n^T g_Sigma^{-1} n = 2 (n1^2 - n1 n2 + n2^2).
double mode_gamma(int n1, int n2);

// Value of the real eigenfunction cos(n.theta) or sin(n.theta).
double mode_value(int n1, int n2, bool sine, double t1, double t2);

struct IndicialPair {
  double gamma = 0.0;
  double alpha = 0.0, beta = 0.0;  // roots of x^2 + (m-2)x - gamma, alpha >= beta
};

IndicialPair indicial_roots(double gamma, int m);

struct SpectralLevel {
  double gamma = 0.0;
  int multiplicity = 0;
  std::vector<Eigen::Vector2i> modes;  // all lattice vectors at this level
  double alpha = 0.0, beta = 0.0;
};

struct SpectralTable {
  int m = 3;
  double gamma_max = 0.0;
  std::vector<SpectralLevel> levels;  // ascending gamma

  // All indicial exponents in (lo, hi), ascending.
  std::vector<double> exponents_in(double lo, double hi) const;
};

SpectralTable link_spectrum(double gamma_max, int m = 3);

struct StabilityVerdict {
  bool stable = false;
  double window_lo = 1.0, window_hi = 2.0;
  std::vector<double> exponents_in_window;
  double first_exponent_at_two = 0.0;   // smallest exponent >= window_hi
  double next_exponent_above = 0.0;     // the one after it
  int lambda_one_multiplicity = 0;
  double coordinate_span_residual = 0.0;
  double gamma_cutoff = 0.0;
};

// Certifies the spectral gap (no indicial exponent in (1,2)) up to the cutoff
// and that the degree-one eigenspace is exactly the span of the six ambient
// coordinates restricted to the link. Throws if the cutoff cannot certify
// the window.
StabilityVerdict stability_check(double gamma_cutoff = 12.0);

// -- discrete Laplace-Beltrami cross-check --------------------------------
// Finite-difference operator on an n x n periodic grid, stencil built from
// the numerically differentiated link metric.

// Smallest `count` eigenvalues via the operator's Fourier symbol (exact for a
// constant-stencil circulant).
std::vector<double> discrete_link_eigenvalues(int n_grid, int count);

// The same operator assembled densely (n^2 x n^2); for validating the symbol
// route at small n.
Eigen::MatrixXd discrete_link_laplacian_dense(int n_grid);

// -- scalar fields on cone annuli ------------------------------------------

struct ConeScalarField {
  Eigen::VectorXd radii;  // log-spaced shell midpoints
  int n1 = 0, n2 = 0;
  Eigen::MatrixXd values;  // n_r rows x (n1*n2) cols

  int n_r() const { return static_cast<int>(radii.size()); }
  int link_index(int i1, int i2) const { return i1 * n2 + i2; }
  double theta1(int i1) const { return (i1 + 0.5) * 2.0 * M_PI / n1; }
  double theta2(int i2) const { return (i2 + 0.5) * 2.0 * M_PI / n2; }
};

ConeScalarField make_cone_scalar_field(
    double sigma, double rho, int n_r, int n1, int n2,
    const std::function<double(double r, double t1, double t2)>& fn);

struct ModeCoefficient {
  int n1 = 0, n2 = 0;
  bool sine = false;
  double alpha = 0.0, beta = 0.0;
  double a = 0.0, b = 0.0;  // u_mode(r) ~ a r^alpha + b r^beta
  double residual = 0.0;    // weighted rms misfit of the radial profile
};

struct ModeExpansion {
  double gamma_max = 0.0;
  std::vector<ModeCoefficient> coefficients;
};

// Fourier-projects each shell onto the real eigenbasis, then fits each mode's
// radial profile to a r^alpha + b r^beta (linear least squares, weights
// proportional to shell measure). Needs >= 3 shells and a cutoff below the
// grid Nyquist.
ModeExpansion harmonic_expand(const ConeScalarField& field, double gamma_max, int m = 3);

ConeScalarField synthesize_modes(const ModeExpansion& exp, const Eigen::VectorXd& radii,
                                 int n1, int n2);

struct DecayFit {
  double exponent = 0.0;
  double amplitude = 0.0;      // prefactor at r = 1
  double stderr_exponent = 0.0;
  double max_log_residual = 0.0;
};

// Log-log least-squares slope of a positive radial profile; >= 4 shells.
DecayFit fit_decay_exponent(const std::vector<std::pair<double, double>>& profile);

// Numerical [d_t^2 + (m-2) d_t - Delta_Sigma] u by 6th-order finite
// differences (periodic in the link, one-sided-free in t: only shells
// 3 .. n_r-4 of the result are populated; the rest are zero).
ConeScalarField apply_cone_operator(const ConeScalarField& u, int m = 3);

// Sup of |field| over the shells where apply_cone_operator is valid.
double interior_sup(const ConeScalarField& f);

}  // namespace slcone
