#pragma once

// Discrete integral varifolds: weighted (point, oriented tangent plane)
// samples, with the mass/energy/monotonicity functionals acting on them.

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "slcone/calib.hpp"

namespace slcone {

class DiscreteVarifold {
 public:
  DiscreteVarifold() = default;
  DiscreteVarifold(int ambient_dim, int dim, std::string provenance = {});

  void reserve(Eigen::Index n);
  // Validates dimensions and w > 0; the frame is trusted (generators produce
  // orthonormal frames; readers re-validate).
  void add_sample(const Vec& point, const Mat& frame, double w);

  int ambient_dim() const { return ambient_dim_; }
  int dim() const { return dim_; }
  Eigen::Index size() const { return size_; }
  const std::string& provenance() const { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }

  auto point(Eigen::Index i) const { return points_.col(i); }
  auto frame(Eigen::Index i) const { return frames_.middleCols(i * dim_, dim_); }
  double weight(Eigen::Index i) const { return weights_[i]; }

  auto points() const { return points_.leftCols(size_); }
  auto frames() const { return frames_.leftCols(size_ * dim_); }
  auto weights() const { return weights_.head(size_); }

  TangentPlane plane(Eigen::Index i) const;

  // Total mass must be finite and positive once samples exist.
  void validate() const;

 private:
  int ambient_dim_ = 0, dim_ = 0;
  Eigen::Index size_ = 0;
  Mat points_;   // ambient_dim x capacity
  Mat frames_;   // ambient_dim x (dim * capacity)
  Vec weights_;  // capacity
  std::string provenance_;
};

double total_mass(const DiscreteVarifold& v);

// Sum of weights of samples with |y - center| < rho.
double mass_in_ball(const DiscreteVarifold& v, const Vec& center, double rho);
double mass_in_ball(const DiscreteVarifold& v, double rho);  // center 0

// sum_i w_i |P_{S_i^perp}(y_i)|^2 / |y_i|^{m+2}. Throws if a sample sits at
// the origin (singular integrand).
double energy(const DiscreteVarifold& v);

// Energy integrand of one sample about the origin; shared by energy() and the
// bubble-scale machinery.
double energy_integrand(const Eigen::Ref<const Vec>& y, const Eigen::Ref<const Mat>& frame,
                        int dim);

// Pairing of the varifold's oriented unit planes against an m-form field.
// Every sample plane must be calibrated within `tol` (angle defect), else
// throws: orientation is undefined off the calibrated locus.
double current_pair(const DiscreteVarifold& v, const CyStructure& cy,
                    const AlternatingForm<double>& chi, double tol = 1e-6);
double current_pair(const DiscreteVarifold& v, const CyStructure& cy,
                    const std::function<AlternatingForm<double>(const Vec&)>& chi,
                    double tol = 1e-6);

// mass(B_rho)/rho^m - mass(B_sigma)/sigma^m - energy(annulus restriction):
// zero (up to quadrature) exactly when the varifold is stationary.
double monotonicity_residual(const DiscreteVarifold& v, double sigma, double rho);

DiscreteVarifold restrict_annulus(const DiscreteVarifold& v, double sigma, double rho,
                                  const Vec& center);
DiscreteVarifold rescale(const DiscreteVarifold& v, double t);       // y->ty, w->t^m w
DiscreteVarifold translate(const DiscreteVarifold& v, const Vec& b); // y->y+b
DiscreteVarifold apply_linear(const DiscreteVarifold& v, const Mat& a);  // isometries

// Tangential divergence of the position field on an m-plane; equals the plane
// dimension identically. Exposed as a self-check primitive.
double divergence_radial(const TangentPlane& plane);

struct TestBall {
  Vec center;
  double radius = 1.0;
};

// max over test balls of |mass(v1) - mass(v2)|; proxy for the weak topology.
double weak_distance(const DiscreteVarifold& v1, const DiscreteVarifold& v2,
                     std::span<const TestBall> balls);

// --- io (varifold_io.cpp) ---

// JSON-lines, one sample per line: {"y":[...2m], "frame":[[...]x m], "w": w}.
// An optional leading {"_meta": ...} record carries the emitting config.
void write_jsonl(std::ostream& os, const DiscreteVarifold& v, const std::string& meta_json = {});
void write_jsonl_file(const std::string& path, const DiscreteVarifold& v,
                      const std::string& meta_json = {});
DiscreteVarifold read_jsonl(std::istream& is);
DiscreteVarifold read_jsonl_file(const std::string& path);

// CSV rows (rho, mass, density_ratio, annulus_energy) about `center`; the
// annulus energy on row k covers (rho_{k-1}, rho_k].
void write_density_table(std::ostream& os, const DiscreteVarifold& v, const Vec& center,
                         std::span<const double> radii, const std::string& config_echo = {});

}  // namespace slcone
