#include "slcone/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace slcone {

namespace {

using std::complex;
const complex<double> kI(0.0, 1.0);

}  // namespace

const char* model_name(ModelId id) {
  switch (id) {
    case ModelId::Cone: return "C";
    case ModelId::L1: return "L1";
    case ModelId::L2: return "L2";
    case ModelId::L3: return "L3";
  }
  return "?";
}

ModelId model_from_name(const std::string& name) {
  if (name == "C" || name == "cone" || name == "Cone") return ModelId::Cone;
  if (name == "L1") return ModelId::L1;
  if (name == "L2") return ModelId::L2;
  if (name == "L3") return ModelId::L3;
  throw std::invalid_argument("unknown model id: " + name);
}

C3 to_complex3(const Vec6& y) {
  return C3(complex<double>(y[0], y[1]), complex<double>(y[2], y[3]),
            complex<double>(y[4], y[5]));
}

Vec6 to_real6(const C3& z) {
  Vec6 y;
  for (int k = 0; k < 3; ++k) {
    y[2 * k] = z[k].real();
    y[2 * k + 1] = z[k].imag();
  }
  return y;
}

double moment_mu(int j, const C3& z) {
  if (j < 2 || j > 3) throw std::invalid_argument("moment_mu: j in {2, 3}");
  return 0.5 * (std::norm(z[0]) - std::norm(z[j - 1]));
}

std::complex<double> f_holo(const C3& z) { return z[0] * z[1] * z[2]; }

Eigen::Vector3d fibration_F(const C3& z) {
  return {moment_mu(2, z), moment_mu(3, z), f_holo(z).imag()};
}

Eigen::Vector3d chart_label_from_moment(const Eigen::Vector3d& c) {
  return {2.0 * c[1], 2.0 * c[1] - 2.0 * c[0], c[2]};
}

Eigen::Vector3d moment_label_from_chart(const Eigen::Vector3d& d) {
  return {0.5 * (d[0] - d[1]), 0.5 * d[0], d[2]};
}

namespace {

// Base chart of L1 and slot permutations carrying it to L2/L3. The slot order
// is (sqrt(|z|^2+1) e^{i theta}, z, e^{-i theta} conj z); permuting slots
// preserves the triple product, so the positivity constraint survives.
struct SlotOrder {
  int big, plain, conj;  // destination slots of the three chart entries
};

SlotOrder slot_order(ModelId id) {
  switch (id) {
    case ModelId::L1: return {0, 1, 2};
    case ModelId::L2: return {1, 0, 2};
    case ModelId::L3: return {2, 0, 1};
    case ModelId::Cone: break;
  }
  throw std::invalid_argument("model chart: use the cone chart for the cone");
}

}  // namespace

C3 model_point(ModelId id, double theta, complex<double> zp) {
  const SlotOrder so = slot_order(id);
  const double q = std::sqrt(std::norm(zp) + 1.0);
  const complex<double> e = std::polar(1.0, theta);
  C3 z;
  z[so.big] = q * e;
  z[so.plain] = zp;
  z[so.conj] = std::conj(zp) * std::conj(e);
  return z;
}

double model_residual(ModelId id, const C3& z) {
  const double a1 = std::norm(z[0]), a2 = std::norm(z[1]), a3 = std::norm(z[2]);
  const complex<double> prod = z[0] * z[1] * z[2];
  double eq = 0.0;
  switch (id) {
    case ModelId::Cone:
      eq = std::abs(a1 - a2) + std::abs(a2 - a3);
      break;
    case ModelId::L1:
      eq = std::abs(a1 - 1.0 - a2) + std::abs(a2 - a3);
      break;
    case ModelId::L2:
      eq = std::abs(a2 - 1.0 - a1) + std::abs(a1 - a3);
      break;
    case ModelId::L3:
      eq = std::abs(a3 - 1.0 - a1) + std::abs(a1 - a2);
      break;
  }
  return eq + std::abs(prod.imag()) + std::max(0.0, -prod.real());
}

namespace {

struct ModelTangents {
  Vec6 d_theta, d_x, d_y;
};

ModelTangents model_partials(ModelId id, double theta, complex<double> zp) {
  const SlotOrder so = slot_order(id);
  const double q = std::sqrt(std::norm(zp) + 1.0);
  const complex<double> e = std::polar(1.0, theta);
  C3 dt = C3::Zero(), dx = C3::Zero(), dy = C3::Zero();
  dt[so.big] = kI * q * e;
  dt[so.conj] = -kI * std::conj(zp) * std::conj(e);
  dx[so.big] = (zp.real() / q) * e;
  dx[so.plain] = 1.0;
  dx[so.conj] = std::conj(e);
  dy[so.big] = (zp.imag() / q) * e;
  dy[so.plain] = kI;
  dy[so.conj] = -kI * std::conj(e);
  return {to_real6(dt), to_real6(dx), to_real6(dy)};
}

}  // namespace

Mat63 model_tangent_frame(ModelId id, double theta, complex<double> zp) {
  const ModelTangents g = model_partials(id, theta, zp);
  Mat63 raw;
  raw.col(0) = g.d_theta;
  raw.col(1) = g.d_x;
  raw.col(2) = g.d_y;
  const Vec6 p = to_real6(model_point(id, theta, zp));
  return make_plane(p, raw).frame;
}

namespace {

template <typename Sink>
void emit_model_sample(const Sink& sink, ModelId id, double theta, double s, double phi,
                       double cell_tsp) {
  const complex<double> zp = std::polar(s, phi);
  const ModelTangents g = model_partials(id, theta, zp);
  const Vec6 d_s = std::cos(phi) * g.d_x + std::sin(phi) * g.d_y;
  const Vec6 d_phi = s * (-std::sin(phi) * g.d_x + std::cos(phi) * g.d_y);
  Eigen::Matrix3d gram;
  gram << g.d_theta.squaredNorm(), g.d_theta.dot(d_s), g.d_theta.dot(d_phi),
      g.d_theta.dot(d_s), d_s.squaredNorm(), d_s.dot(d_phi),
      g.d_theta.dot(d_phi), d_s.dot(d_phi), d_phi.squaredNorm();
  const double w = std::sqrt(std::max(gram.determinant(), 0.0)) * cell_tsp;
  const Vec6 p = to_real6(model_point(id, theta, zp));
  Mat63 raw;
  raw.col(0) = g.d_theta;
  raw.col(1) = g.d_x;
  raw.col(2) = g.d_y;
  sink(p, make_plane(p, raw).frame, w);
}

void add_model_sample(DiscreteVarifold& v, ModelId id, double theta, double s, double phi,
                      double cell_tsp) {
  emit_model_sample(
      [&v](const Vec6& p, const Mat63& frame, double w) { v.add_sample(p, frame, w); },
      id, theta, s, phi, cell_tsp);
}

}  // namespace

DiscreteVarifold sample_model(ModelId id, double R, int n) {
  return sample_model(id, R, n, n, n);
}

DiscreteVarifold sample_model(ModelId id, double R, int n_theta, int n_s, int n_phi) {
  if (!(R > 0.0)) throw std::invalid_argument("sample_model: R must be positive");
  if (n_theta < 2 || n_s < 2 || n_phi < 2)
    throw std::invalid_argument("sample_model: resolutions >= 2");
  DiscreteVarifold v(6, 3, std::string("model:") + model_name(id));
  v.reserve(static_cast<Eigen::Index>(n_theta) * n_s * n_phi);
  const double h_t = 2.0 * M_PI / n_theta, h_s = R / n_s, h_p = 2.0 * M_PI / n_phi;
  for (int it = 0; it < n_theta; ++it)
    for (int is = 0; is < n_s; ++is)
      for (int ip = 0; ip < n_phi; ++ip)
        add_model_sample(v, id, (it + 0.5) * h_t, (is + 0.5) * h_s, (ip + 0.5) * h_p,
                         h_t * h_s * h_p);
  return v;
}

DiscreteVarifold sample_model_annulus(ModelId id, double sigma, double rho, int n_r,
                                      int n_theta, int n_phi) {
  if (n_r < 2 || n_theta < 2 || n_phi < 2)
    throw std::invalid_argument("sample_model_annulus: resolutions >= 2");
  DiscreteVarifold v(6, 3, std::string("model:") + model_name(id) + "|annulus");
  v.reserve(static_cast<Eigen::Index>(n_r) * n_theta * n_phi);
  for_each_model_annulus_sample(
      id, sigma, rho, n_r, n_theta, n_phi,
      [&v](const Vec6& p, const Mat63& frame, double w) { v.add_sample(p, frame, w); });
  return v;
}

void for_each_model_annulus_sample(
    ModelId id, double sigma, double rho, int n_r, int n_theta, int n_phi,
    const std::function<void(const Vec6&, const Mat63&, double)>& fn) {
  if (!(0.0 < sigma && sigma < rho))
    throw std::invalid_argument("for_each_model_annulus_sample: need 0 < sigma < rho");
  const double r_lo = std::max(sigma, 1.0);
  if (rho <= r_lo) return;
  const double ht = std::log(rho / r_lo) / n_r;
  auto s_of_r = [](double r) { return std::sqrt(std::max(r * r - 1.0, 0.0) / 3.0); };
  const double h_t = 2.0 * M_PI / n_theta, h_p = 2.0 * M_PI / n_phi;
  for (int ir = 0; ir < n_r; ++ir) {
    const double s0 = s_of_r(r_lo * std::exp(ir * ht));
    const double s1 = s_of_r(r_lo * std::exp((ir + 1) * ht));
    const double s_mid = 0.5 * (s0 + s1), ds = s1 - s0;
    for (int it = 0; it < n_theta; ++it)
      for (int ip = 0; ip < n_phi; ++ip)
        emit_model_sample(fn, id, (it + 0.5) * h_t, s_mid, (ip + 0.5) * h_p,
                          h_t * ds * h_p);
  }
}

DiscreteVarifold make_model_varifold(ModelId id, double s, const Vec6& b, double R, int n) {
  if (id == ModelId::Cone) {
    DiscreteVarifold cone = sample_cone(1e-3, R, n, n);
    return translate(rescale(cone, s), b);
  }
  return translate(rescale(sample_model(id, R, n), s), b);
}

double solve_phi(double c1, double c2, double t, double c3) {
  double a = std::max(c1, c2), b = std::min(c1, c2);
  if (b < 0.0)
    throw std::invalid_argument("solve_phi: offsets must be nonnegative after sorting");
  const double rhs = t * t + c3 * c3;
  if (rhs == 0.0) return 0.0;
  auto g = [&](double p) { return (p + a) * (p + b) * p - rhs; };
  double hi = std::max(1.0, std::cbrt(rhs));
  while (g(hi) < 0.0) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  double p = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it) {  // Newton polish; derivative > 0 off the origin
    const double gp = (p + a) * (p + b) + p * (p + b) + p * (p + a);
    if (gp <= 0.0) break;
    p = std::max(0.0, p - g(p) / gp);
  }
  return p;
}

namespace {

const std::array<Eigen::Vector3d, 3> kRayDirs = {
    Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0),
    Eigen::Vector3d(-1, -1, 0).normalized()};
const std::array<ModelId, 3> kRayModels = {ModelId::L1, ModelId::L2, ModelId::L3};

// Fiber chart data after sorting the modulus offsets.
struct FiberChart {
  Eigen::Vector3d d;      // chart label
  std::array<int, 3> slot;  // slot[k] = ambient index receiving chart entry k
  double b1 = 0.0, b2 = 0.0;  // sorted nonnegative offsets, b1 >= b2 >= 0
};

FiberChart fiber_chart(const Eigen::Vector3d& c_moment) {
  FiberChart fc;
  fc.d = chart_label_from_moment(c_moment);
  // modulus offsets (relative shifts of |z_i|^2): a = (d1, d2, 0)
  std::array<std::pair<double, int>, 3> off = {
      std::make_pair(fc.d[0], 0), std::make_pair(fc.d[1], 1), std::make_pair(0.0, 2)};
  std::stable_sort(off.begin(), off.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  fc.slot = {off[0].second, off[1].second, off[2].second};
  fc.b1 = off[0].first - off[2].first;
  fc.b2 = off[1].first - off[2].first;
  return fc;
}

}  // namespace

double discriminant_distance(const Eigen::Vector3d& c_moment, int* ray, double* ray_param) {
  const Eigen::Vector3d d = chart_label_from_moment(c_moment);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const double coef = std::max(0.0, d.dot(kRayDirs[k]));
    const double dist = (d - coef * kRayDirs[k]).norm();
    if (dist < best) {
      best = dist;
      if (ray) *ray = k;
      if (ray_param) *ray_param = k == 2 ? coef / std::sqrt(2.0) : coef;
    }
  }
  return best;
}

bool in_Y(const Eigen::Vector3d& c_moment, double tol) {
  return discriminant_distance(c_moment) <= tol;
}

FiberClass classify_fiber(const Eigen::Vector3d& c_moment, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("classify_fiber: tol must be positive");
  FiberClass out;
  int ray = 0;
  double param = 0.0;
  out.ray_distance = discriminant_distance(c_moment, &ray, &param);
  const Eigen::Vector3d d = chart_label_from_moment(c_moment);
  if (d.norm() <= tol) {
    out.kind = FiberKind::ConeFiber;
    out.near_discriminant = d.norm() > 1e-12;
    return out;
  }
  if (out.ray_distance <= tol) {
    out.kind = FiberKind::SingularRay;
    out.ray_model = kRayModels[ray];
    out.ray_param = param;
    out.near_discriminant = out.ray_distance > 1e-12 * std::max(1.0, d.norm());
    return out;
  }
  out.kind = FiberKind::SmoothCylinder;
  return out;
}

C3 fiber_point(const Eigen::Vector3d& c_moment, double t, complex<double> u,
               complex<double> v) {
  if (in_Y(c_moment)) throw std::runtime_error("fiber_point: singular fiber; use L_c");
  const FiberChart fc = fiber_chart(c_moment);
  const double phi = solve_phi(fc.b1, fc.b2, t, fc.d[2]);
  const double m1 = std::sqrt(phi + fc.b1), m2 = std::sqrt(phi + fc.b2);
  const complex<double> third = complex<double>(t, fc.d[2]) / (m1 * m2 * u * v);
  C3 z;
  z[fc.slot[0]] = m1 * u;
  z[fc.slot[1]] = m2 * v;
  z[fc.slot[2]] = third;
  return z;
}

FiberCoords fiber_coords(const Eigen::Vector3d& c_moment, const C3& z) {
  if (in_Y(c_moment)) throw std::runtime_error("fiber_coords: singular fiber; use L_c");
  const FiberChart fc = fiber_chart(c_moment);
  FiberCoords out;
  out.t = (z[0] * z[1] * z[2]).real();
  const double phi = solve_phi(fc.b1, fc.b2, out.t, fc.d[2]);
  out.u = z[fc.slot[0]] / std::sqrt(phi + fc.b1);
  out.v = z[fc.slot[1]] / std::sqrt(phi + fc.b2);
  return out;
}

namespace {

struct FiberTangents {
  Vec6 d_t, d_u, d_v;
};

FiberTangents fiber_partials(const FiberChart& fc, double t, double au, double av) {
  const double phi = solve_phi(fc.b1, fc.b2, t, fc.d[2]);
  const double gp = (phi + fc.b1) * (phi + fc.b2) + phi * (phi + fc.b2) +
                    phi * (phi + fc.b1);
  const double dphi = gp > 0.0 ? 2.0 * t / gp : 0.0;
  const double m1 = std::sqrt(phi + fc.b1), m2 = std::sqrt(phi + fc.b2);
  const complex<double> u = std::polar(1.0, au), v = std::polar(1.0, av);
  const complex<double> num(t, fc.d[2]);
  const complex<double> third = num / (m1 * m2 * u * v);
  // d/dt of the moduli and of the third entry (quotient rule on m1 m2)
  const double dm1 = 0.5 * dphi / m1, dm2 = 0.5 * dphi / m2;
  C3 dt = C3::Zero(), du = C3::Zero(), dv = C3::Zero();
  dt[fc.slot[0]] = dm1 * u;
  dt[fc.slot[1]] = dm2 * v;
  dt[fc.slot[2]] = (complex<double>(1.0, 0.0) * (m1 * m2) - num * (dm1 * m2 + m1 * dm2)) /
                   (m1 * m2 * m1 * m2 * u * v);
  du[fc.slot[0]] = kI * m1 * u;
  du[fc.slot[2]] = -kI * third;
  dv[fc.slot[1]] = kI * m2 * v;
  dv[fc.slot[2]] = -kI * third;
  return {to_real6(dt), to_real6(du), to_real6(dv)};
}

}  // namespace

Mat63 fiber_tangent_frame(const Eigen::Vector3d& c_moment, double t, double au, double av) {
  const FiberChart fc = fiber_chart(c_moment);
  const FiberTangents g = fiber_partials(fc, t, au, av);
  Mat63 raw;
  raw.col(0) = g.d_t;
  raw.col(1) = g.d_u;
  raw.col(2) = g.d_v;
  const Vec6 p = to_real6(fiber_point(c_moment, t, std::polar(1.0, au), std::polar(1.0, av)));
  return make_plane(p, raw).frame;
}

DiscreteVarifold sample_fiber(const Eigen::Vector3d& c_moment, double t_min, double t_max,
                              int n_t, int n_angle) {
  if (!(t_min < t_max)) throw std::invalid_argument("sample_fiber: need t_min < t_max");
  if (n_t < 2 || n_angle < 2) throw std::invalid_argument("sample_fiber: resolutions >= 2");
  if (in_Y(c_moment)) throw std::runtime_error("sample_fiber: singular fiber; use L_c");
  const FiberChart fc = fiber_chart(c_moment);
  DiscreteVarifold v(6, 3, "fiber");
  v.reserve(static_cast<Eigen::Index>(n_t) * n_angle * n_angle);
  const double ht = (t_max - t_min) / n_t, ha = 2.0 * M_PI / n_angle;
  for (int it = 0; it < n_t; ++it) {
    const double t = t_min + (it + 0.5) * ht;
    for (int iu = 0; iu < n_angle; ++iu)
      for (int iv = 0; iv < n_angle; ++iv) {
        const double au = (iu + 0.5) * ha, av = (iv + 0.5) * ha;
        const FiberTangents g = fiber_partials(fc, t, au, av);
        Eigen::Matrix3d gram;
        gram << g.d_t.squaredNorm(), g.d_t.dot(g.d_u), g.d_t.dot(g.d_v),
            g.d_t.dot(g.d_u), g.d_u.squaredNorm(), g.d_u.dot(g.d_v),
            g.d_t.dot(g.d_v), g.d_u.dot(g.d_v), g.d_v.squaredNorm();
        const double w = std::sqrt(std::max(gram.determinant(), 0.0)) * ht * ha * ha;
        const Vec6 p =
            to_real6(fiber_point(c_moment, t, std::polar(1.0, au), std::polar(1.0, av)));
        Mat63 raw;
        raw.col(0) = g.d_t;
        raw.col(1) = g.d_u;
        raw.col(2) = g.d_v;
        v.add_sample(p, make_plane(p, raw).frame, w);
      }
  }
  return v;
}

}  // namespace slcone
