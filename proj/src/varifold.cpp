#include "slcone/varifold.hpp"

#include <cmath>
#include <stdexcept>

namespace slcone {

DiscreteVarifold::DiscreteVarifold(int ambient_dim, int dim, std::string provenance)
    : ambient_dim_(ambient_dim), dim_(dim), provenance_(std::move(provenance)) {
  if (ambient_dim < 1 || dim < 1 || dim > ambient_dim)
    throw std::invalid_argument("DiscreteVarifold: need 1 <= dim <= ambient_dim");
  points_.resize(ambient_dim_, 0);
  frames_.resize(ambient_dim_, 0);
  weights_.resize(0);
}

void DiscreteVarifold::reserve(Eigen::Index n) {
  if (n <= points_.cols()) return;
  points_.conservativeResize(Eigen::NoChange, n);
  frames_.conservativeResize(Eigen::NoChange, n * dim_);
  weights_.conservativeResize(n);
}

void DiscreteVarifold::add_sample(const Vec& point, const Mat& frame, double w) {
  if (point.size() != ambient_dim_ || frame.rows() != ambient_dim_ || frame.cols() != dim_)
    throw std::invalid_argument("add_sample: dimension mismatch");
  if (!(w > 0.0)) throw std::invalid_argument("add_sample: weight must be positive");
  if (points_.cols() <= size_) reserve(std::max<Eigen::Index>(16, 2 * points_.cols()));
  points_.col(size_) = point;
  frames_.middleCols(size_ * dim_, dim_) = frame;
  weights_[size_] = w;
  ++size_;
}

TangentPlane DiscreteVarifold::plane(Eigen::Index i) const {
  TangentPlane p;
  p.base_point = point(i);
  p.frame = frame(i);
  return p;
}

void DiscreteVarifold::validate() const {
  if (size() == 0) throw std::invalid_argument("varifold: no samples");
  const double m = weights_.head(size()).sum();
  if (!std::isfinite(m) || !(m > 0.0))
    throw std::invalid_argument("varifold: total mass must be finite and positive");
}

double total_mass(const DiscreteVarifold& v) { return v.weights().sum(); }

double mass_in_ball(const DiscreteVarifold& v, const Vec& center, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("mass_in_ball: rho must be positive");
  const double r2 = rho * rho;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if ((v.point(i) - center).squaredNorm() < r2) acc += v.weight(i);
  return acc;
}

double mass_in_ball(const DiscreteVarifold& v, double rho) {
  return mass_in_ball(v, Vec::Zero(v.ambient_dim()), rho);
}

double energy_integrand(const Eigen::Ref<const Vec>& y, const Eigen::Ref<const Mat>& frame,
                        int dim) {
  const double r2 = y.squaredNorm();
  const double perp2 = r2 - (frame.transpose() * y).squaredNorm();
  const double denom =
      dim == 3 ? r2 * r2 * std::sqrt(r2) : std::pow(r2, 0.5 * (dim + 2));
  return std::max(perp2, 0.0) / denom;
}

double energy(const DiscreteVarifold& v) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const auto y = v.point(i);
    if (y.norm() < 1e-12)
      throw std::invalid_argument("energy: sample at the origin, integrand singular");
    acc += v.weight(i) * energy_integrand(y, v.frame(i), v.dim());
  }
  return acc;
}

namespace {

double oriented_pairing(const DiscreteVarifold& v, const CyStructure& cy, Eigen::Index i,
                        const AlternatingForm<double>& re_omega,
                        const AlternatingForm<double>& chi, double tol) {
  const AlternatingForm<double> mv = frame_wedge(v.frame(i));
  const Complex val = cy.holomorphic_form.evaluate(v.frame(i));
  if (1.0 - std::abs(val.real()) >= tol)
    throw std::invalid_argument("current_pair: sample plane is not calibrated");
  const double sign = pairing(re_omega, mv) >= 0.0 ? 1.0 : -1.0;
  return sign * pairing(chi, mv);
}

}  // namespace

double current_pair(const DiscreteVarifold& v, const CyStructure& cy,
                    const AlternatingForm<double>& chi, double tol) {
  const AlternatingForm<double> re_omega = cy.re_holomorphic();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    acc += v.weight(i) * oriented_pairing(v, cy, i, re_omega, chi, tol);
  return acc;
}

double current_pair(const DiscreteVarifold& v, const CyStructure& cy,
                    const std::function<AlternatingForm<double>(const Vec&)>& chi,
                    double tol) {
  const AlternatingForm<double> re_omega = cy.re_holomorphic();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    acc += v.weight(i) * oriented_pairing(v, cy, i, re_omega, chi(v.point(i)), tol);
  return acc;
}

double monotonicity_residual(const DiscreteVarifold& v, double sigma, double rho) {
  if (!(0.0 < sigma && sigma < rho))
    throw std::invalid_argument("monotonicity_residual: need 0 < sigma < rho");
  const Vec origin = Vec::Zero(v.ambient_dim());
  const double m = static_cast<double>(v.dim());
  const double lhs = mass_in_ball(v, origin, rho) / std::pow(rho, m) -
                     mass_in_ball(v, origin, sigma) / std::pow(sigma, m);
  const DiscreteVarifold ann = restrict_annulus(v, sigma, rho, origin);
  const double rhs = ann.size() == 0 ? 0.0 : energy(ann);
  return lhs - rhs;
}

DiscreteVarifold restrict_annulus(const DiscreteVarifold& v, double sigma, double rho,
                                  const Vec& center) {
  if (!(sigma >= 0.0 && sigma < rho))
    throw std::invalid_argument("restrict_annulus: need 0 <= sigma < rho");
  DiscreteVarifold out(v.ambient_dim(), v.dim(), v.provenance() + "|annulus");
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double d = (v.point(i) - center).norm();
    if (d >= sigma && d < rho) out.add_sample(v.point(i), v.frame(i), v.weight(i));
  }
  return out;
}

DiscreteVarifold rescale(const DiscreteVarifold& v, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("rescale: t must be positive");
  DiscreteVarifold out(v.ambient_dim(), v.dim(), v.provenance() + "|rescale");
  const double wf = std::pow(t, v.dim());
  out.reserve(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.add_sample(t * v.point(i), v.frame(i), wf * v.weight(i));
  return out;
}

DiscreteVarifold translate(const DiscreteVarifold& v, const Vec& b) {
  if (b.size() != v.ambient_dim())
    throw std::invalid_argument("translate: offset dimension mismatch");
  DiscreteVarifold out(v.ambient_dim(), v.dim(), v.provenance() + "|translate");
  out.reserve(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.add_sample(v.point(i) + b, v.frame(i), v.weight(i));
  return out;
}

DiscreteVarifold apply_linear(const DiscreteVarifold& v, const Mat& a) {
  if (a.rows() != v.ambient_dim() || a.cols() != v.ambient_dim())
    throw std::invalid_argument("apply_linear: matrix dimension mismatch");
  DiscreteVarifold out(v.ambient_dim(), v.dim(), v.provenance() + "|linear");
  out.reserve(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.add_sample(a * v.point(i), a * v.frame(i), v.weight(i));
  return out;
}

double divergence_radial(const TangentPlane& plane) {
  if (orthonormality_residual(plane.frame) > kOrthonormalTol)
    throw std::invalid_argument("divergence_radial: frame not orthonormal");
  // The position field y has identity Jacobian: sum_j <e_j, D_{e_j} y>.
  double acc = 0.0;
  for (int j = 0; j < plane.frame.cols(); ++j) acc += plane.frame.col(j).squaredNorm();
  return acc;
}

double weak_distance(const DiscreteVarifold& v1, const DiscreteVarifold& v2,
                     std::span<const TestBall> balls) {
  if (v1.ambient_dim() != v2.ambient_dim())
    throw std::invalid_argument("weak_distance: ambient dimension mismatch");
  if (balls.empty()) throw std::invalid_argument("weak_distance: empty test set");
  double d = 0.0;
  for (const TestBall& b : balls)
    d = std::max(d, std::abs(mass_in_ball(v1, b.center, b.radius) -
                             mass_in_ball(v2, b.center, b.radius)));
  return d;
}

}  // namespace slcone
