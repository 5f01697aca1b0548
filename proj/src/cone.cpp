#include "slcone/cone.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace slcone {

namespace {

Vec6 to_vec(const std::array<double, 6>& a) {
  Vec6 v;
  for (int i = 0; i < 6; ++i) v[i] = a[i];
  return v;
}

// Multiplication by i on interleaved coordinates: (x, y) -> (-y, x).
Vec6 apply_j(const Vec6& v) {
  Vec6 out;
  for (int k = 0; k < 3; ++k) {
    out[2 * k] = -v[2 * k + 1];
    out[2 * k + 1] = v[2 * k];
  }
  return out;
}

struct ConeTangents {
  Vec6 d_r, d_t1, d_t2;  // chart partials
};

ConeTangents cone_partials(double r, double t1, double t2) {
  const double a = r / std::sqrt(3.0);
  const double s = t1 + t2;
  ConeTangents g;
  g.d_r = to_vec(cone_chart_components(1.0, t1, t2));
  g.d_t1 << -a * std::sin(t1), a * std::cos(t1), 0, 0, -a * std::sin(s), -a * std::cos(s);
  g.d_t2 << 0, 0, -a * std::sin(t2), a * std::cos(t2), -a * std::sin(s), -a * std::cos(s);
  return g;
}

}  // namespace

Vec6 cone_point(double r, double t1, double t2) {
  if (!(r > 0.0)) throw std::invalid_argument("cone_point: r must be positive");
  return to_vec(cone_chart_components(r, t1, t2));
}

Mat63 cone_tangent_frame(double r, double t1, double t2) {
  if (!(r > 0.0)) throw std::invalid_argument("cone_tangent_frame: r must be positive");
  const ConeTangents g = cone_partials(r, t1, t2);
  Mat63 frame;
  frame.col(0) = g.d_r;  // already unit
  frame.col(1) = g.d_t1 / (r * std::sqrt(2.0 / 3.0));
  frame.col(2) = (g.d_t2 - 0.5 * g.d_t1) / (r / std::sqrt(2.0));
  return frame;
}

Mat63 cone_normal_frame(double r, double t1, double t2) {
  const Mat63 t = cone_tangent_frame(r, t1, t2);
  Mat63 n;
  for (int j = 0; j < 3; ++j) n.col(j) = apply_j(t.col(j));
  return n;
}

Eigen::Matrix2d link_metric() {
  Eigen::Matrix2d g;
  g << 2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0;
  return g;
}

Eigen::Matrix2d link_metric_inverse() {
  Eigen::Matrix2d g;
  g << 2.0, -1.0, -1.0, 2.0;
  return g;
}

Eigen::Matrix2d link_metric_numeric(double t1, double t2) {
  using C = std::complex<double>;
  const double h = 1e-100;
  auto deriv = [&](int which) {
    const C c1(t1, which == 0 ? h : 0.0);
    const C c2(t2, which == 1 ? h : 0.0);
    const auto comps = cone_chart_components<C>(1.0, c1, c2);
    Vec6 d;
    for (int i = 0; i < 6; ++i) d[i] = comps[i].imag() / h;
    return d;
  };
  const Vec6 d1 = deriv(0), d2 = deriv(1);
  Eigen::Matrix2d g;
  g(0, 0) = d1.dot(d1);
  g(0, 1) = g(1, 0) = d1.dot(d2);
  g(1, 1) = d2.dot(d2);
  return g;
}

double link_area() { return 4.0 * M_PI * M_PI / std::sqrt(3.0); }

DiscreteVarifold sample_cone(double sigma, double rho, int n_r, int n_theta) {
  if (!(0.0 < sigma && sigma < rho))
    throw std::invalid_argument("sample_cone: need 0 < sigma < rho");
  if (n_r < 2 || n_theta < 2) throw std::invalid_argument("sample_cone: resolutions >= 2");
  DiscreteVarifold v(6, 3, "cone");
  v.reserve(static_cast<Eigen::Index>(n_r) * n_theta * n_theta);
  const double ht = std::log(rho / sigma) / n_r;
  const double ha = 2.0 * M_PI / n_theta;
  const double cell = ht * ha * ha;
  for (int ir = 0; ir < n_r; ++ir) {
    const double r = sigma * std::exp((ir + 0.5) * ht);
    const double w = r * r * r / std::sqrt(3.0) * cell;
    for (int i1 = 0; i1 < n_theta; ++i1) {
      const double t1 = (i1 + 0.5) * ha;
      for (int i2 = 0; i2 < n_theta; ++i2) {
        const double t2 = (i2 + 0.5) * ha;
        v.add_sample(cone_point(r, t1, t2), cone_tangent_frame(r, t1, t2), w);
      }
    }
  }
  return v;
}

NormalGraphField make_normal_field(
    double sigma, double rho, int n_r, int n1, int n2,
    const std::function<Eigen::Vector3d(double, double, double)>& components) {
  if (!(0.0 < sigma && sigma < rho))
    throw std::invalid_argument("make_normal_field: need 0 < sigma < rho");
  if (n_r < 1 || n1 < 2 || n2 < 2)
    throw std::invalid_argument("make_normal_field: bad grid");
  NormalGraphField f;
  f.sigma = sigma;
  f.rho = rho;
  f.n1 = n1;
  f.n2 = n2;
  f.radii.resize(n_r);
  const double ht = std::log(rho / sigma) / n_r;
  for (int ir = 0; ir < n_r; ++ir) f.radii[ir] = sigma * std::exp((ir + 0.5) * ht);
  f.values.resize(3, static_cast<Eigen::Index>(n_r) * n1 * n2);
  for (int ir = 0; ir < n_r; ++ir)
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i2 = 0; i2 < n2; ++i2)
        f.values.col(f.node(ir, i1, i2)) =
            components(f.radii[ir], f.theta1(i1), f.theta2(i2));
  return f;
}

Vec6 field_ambient(const NormalGraphField& f, int ir, int i1, int i2) {
  const Mat63 n = cone_normal_frame(f.radii[ir], f.theta1(i1), f.theta2(i2));
  return n * f.values.col(f.node(ir, i1, i2));
}

namespace {

// Ambient-valued grid of the field plus FD derivative helpers.
struct AmbientGrid {
  const NormalGraphField* f;
  std::vector<Vec6> u;
  double ht;

  explicit AmbientGrid(const NormalGraphField& field) : f(&field) {
    const int nr = field.n_r();
    u.resize(static_cast<std::size_t>(nr) * field.n1 * field.n2);
    for (int ir = 0; ir < nr; ++ir)
      for (int i1 = 0; i1 < field.n1; ++i1)
        for (int i2 = 0; i2 < field.n2; ++i2)
          u[f->node(ir, i1, i2)] = field_ambient(field, ir, i1, i2);
    ht = std::log(field.rho / field.sigma) / nr;
  }

  const Vec6& at(int ir, int i1, int i2) const {
    return u[f->node(ir, ((i1 % f->n1) + f->n1) % f->n1, ((i2 % f->n2) + f->n2) % f->n2)];
  }

  Vec6 d_t(int ir, int i1, int i2) const {
    const int nr = f->n_r();
    if (nr < 2) return Vec6::Zero();
    if (ir == 0)
      return (-1.5 * at(0, i1, i2) + 2.0 * at(1, i1, i2) -
              0.5 * at(std::min(2, nr - 1), i1, i2)) / ht;
    if (ir == nr - 1)
      return (1.5 * at(nr - 1, i1, i2) - 2.0 * at(nr - 2, i1, i2) +
              0.5 * at(std::max(nr - 3, 0), i1, i2)) / ht;
    return (at(ir + 1, i1, i2) - at(ir - 1, i1, i2)) / (2.0 * ht);
  }

  Vec6 d_theta(int axis, int ir, int i1, int i2) const {
    const double h = 2.0 * M_PI / (axis == 0 ? f->n1 : f->n2);
    const int d1 = axis == 0 ? 1 : 0, d2 = axis == 0 ? 0 : 1;
    return (at(ir, i1 + d1, i2 + d2) - at(ir, i1 - d1, i2 - d2)) / (2.0 * h);
  }
};

}  // namespace

double cyl_norm(const NormalGraphField& f, int k) {
  if (k < 0 || k > 1) throw std::invalid_argument("cyl_norm: k in {0, 1}");
  if (f.n_r() < 1 || f.n1 < 2 || f.n2 < 2)
    throw std::invalid_argument("cyl_norm: field is not a product grid");
  if (k == 1 && f.n_r() < 3)
    throw std::invalid_argument("cyl_norm: k = 1 needs >= 3 shells");
  const AmbientGrid g(f);
  const Eigen::Matrix2d ginv = link_metric_inverse();
  double sup = 0.0;
  for (int ir = 0; ir < f.n_r(); ++ir) {
    const double r = f.radii[ir];
    for (int i1 = 0; i1 < f.n1; ++i1)
      for (int i2 = 0; i2 < f.n2; ++i2) {
        double val = g.at(ir, i1, i2).norm() / r;
        if (k >= 1) {
          val += g.d_t(ir, i1, i2).norm() / r;
          const Vec6 da = g.d_theta(0, ir, i1, i2);
          const Vec6 db = g.d_theta(1, ir, i1, i2);
          const double grad2 = ginv(0, 0) * da.squaredNorm() +
                               2.0 * ginv(0, 1) * da.dot(db) +
                               ginv(1, 1) * db.squaredNorm();
          val += std::sqrt(std::max(grad2, 0.0)) / r;
        }
        sup = std::max(sup, val);
      }
  }
  return sup;
}

DiscreteVarifold graph_cyl(const NormalGraphField& f) {
  const double norm1 = cyl_norm(f, 1);
  if (norm1 >= kGraphChartBound)
    throw std::runtime_error("graph_cyl: field leaves the tubular neighborhood");
  const AmbientGrid g(f);
  DiscreteVarifold v(6, 3, "graph_cyl");
  v.reserve(static_cast<Eigen::Index>(f.n_r()) * f.n1 * f.n2);
  const double h1 = 2.0 * M_PI / f.n1, h2 = 2.0 * M_PI / f.n2;
  const double cell = g.ht * h1 * h2;
  for (int ir = 0; ir < f.n_r(); ++ir) {
    const double r = f.radii[ir];
    for (int i1 = 0; i1 < f.n1; ++i1)
      for (int i2 = 0; i2 < f.n2; ++i2) {
        const double t1 = f.theta1(i1), t2 = f.theta2(i2);
        const Vec6 base = cone_point(r, t1, t2);
        const Vec6 p = base + g.at(ir, i1, i2);
        // cone partials are analytic; only the displacement is differenced
        const ConeTangents ct = cone_partials(r, t1, t2);
        Mat63 tangents;
        tangents.col(0) = base + g.d_t(ir, i1, i2);  // d/dt of r e^t sigma-hat
        tangents.col(1) = ct.d_t1 + g.d_theta(0, ir, i1, i2);
        tangents.col(2) = ct.d_t2 + g.d_theta(1, ir, i1, i2);
        const double w = std::sqrt((tangents.transpose() * tangents).determinant()) * cell;
        const TangentPlane plane = make_plane(p, tangents);
        v.add_sample(p, plane.frame, w);
      }
  }
  return v;
}

}  // namespace slcone
