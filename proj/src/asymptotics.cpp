#include "slcone/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace slcone {

GraphTarget cone_target(double s, const Vec6& b) {
  GraphTarget t;
  t.name = "cone";
  t.point = [s, b](const Eigen::Vector3d& p) -> Vec6 {
    return s * cone_point(p[0], p[1], p[2]) + b;
  };
  t.guess = [s](double r, double t1, double t2) {
    return Eigen::Vector3d(r / s, t1, t2);
  };
  return t;
}

GraphTarget model_target(ModelId id, double s, const Vec6& b) {
  if (id == ModelId::Cone) return cone_target(s, b);
  GraphTarget t;
  t.name = model_name(id);
  t.point = [id, s, b](const Eigen::Vector3d& p) -> Vec6 {
    const std::complex<double> zp(p[1], p[2]);
    return s * to_real6(model_point(id, p[0], zp)) + b;
  };
  t.guess = [id, s](double r, double t1, double t2) {
    const double ru = r / s;  // radius on the unit model
    const double sp = std::sqrt(std::max(ru * ru - 1.0, 0.0) / 3.0);
    double theta = 0.0, phase = 0.0;
    switch (id) {
      case ModelId::L1: theta = t1; phase = t2; break;
      case ModelId::L2: theta = t2; phase = t1; break;
      case ModelId::L3: theta = -t1 - t2; phase = t1; break;
      case ModelId::Cone: break;
    }
    return Eigen::Vector3d(theta, sp * std::cos(phase), sp * std::sin(phase));
  };
  return t;
}

GraphTarget fiber_target(const Eigen::Vector3d& c_moment) {
  GraphTarget t;
  t.name = "fiber";
  t.point = [c_moment](const Eigen::Vector3d& p) -> Vec6 {
    return to_real6(
        fiber_point(c_moment, p[0], std::polar(1.0, p[1]), std::polar(1.0, p[2])));
  };
  t.guess = [](double r, double t1, double t2) {
    return Eigen::Vector3d(std::pow(r, 3) / std::pow(3.0, 1.5), t1, t2);
  };
  return t;
}

GraphTarget field_target(
    const std::function<Eigen::Vector3d(double, double, double)>& components) {
  GraphTarget t;
  t.name = "field";
  t.point = [components](const Eigen::Vector3d& p) -> Vec6 {
    const Mat63 n = cone_normal_frame(p[0], p[1], p[2]);
    return cone_point(p[0], p[1], p[2]) + n * components(p[0], p[1], p[2]);
  };
  t.guess = [](double r, double t1, double t2) { return Eigen::Vector3d(r, t1, t2); };
  return t;
}

GraphTarget translated(const GraphTarget& t, const Vec6& b) {
  GraphTarget out = t;
  const auto inner = t.point;
  out.point = [inner, b](const Eigen::Vector3d& p) -> Vec6 { return inner(p) + b; };
  return out;
}

namespace {

struct GridSpec {
  double sigma, rho;
  int n_r, n1, n2;
};

NormalGraphField empty_field(const GridSpec& g) {
  return make_normal_field(g.sigma, g.rho, g.n_r, g.n1, g.n2,
                           [](double, double, double) { return Eigen::Vector3d::Zero(); });
}

}  // namespace

NormalGraphField graph_over_cone(const GraphTarget& target, double sigma, double rho,
                                 int n_r, int n1, int n2) {
  GridSpec gs{sigma, rho, n_r, n1, n2};
  NormalGraphField f = empty_field(gs);
  f.solve_residuals.resize(f.values.cols());
  for (int ir = 0; ir < f.n_r(); ++ir) {
    const double r = f.radii[ir];
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i2 = 0; i2 < n2; ++i2) {
        const double t1 = f.theta1(i1), t2 = f.theta2(i2);
        const Vec6 node = cone_point(r, t1, t2);
        const Mat63 tang = cone_tangent_frame(r, t1, t2);
        Eigen::Vector3d p = target.guess(r, t1, t2);
        const double tol = 1e-12 * std::max(1.0, r);
        bool converged = false;
        Eigen::Vector3d g;
        for (int it = 0; it < 40; ++it) {
          g = tang.transpose() * (target.point(p) - node);
          if (g.norm() <= tol) {
            converged = true;
            break;
          }
          Eigen::Matrix3d jac;
          for (int k = 0; k < 3; ++k) {
            const double h = 1e-6 * (1.0 + std::abs(p[k]));
            Eigen::Vector3d pp = p, pm = p;
            pp[k] += h;
            pm[k] -= h;
            jac.col(k) =
                tang.transpose() * (target.point(pp) - target.point(pm)) / (2.0 * h);
          }
          const Eigen::Vector3d step = jac.fullPivLu().solve(g);
          if (!step.allFinite()) break;
          p -= step;
        }
        if (!converged)
          throw std::runtime_error("graph_over_cone: not graphical on annulus (" +
                                   target.name + ")");
        const Vec6 off = target.point(p) - node;
        if (off.norm() >= kTubeFraction * r)
          throw std::runtime_error("graph_over_cone: not graphical on annulus (" +
                                   target.name + ": outside tube)");
        const Mat63 normal = cone_normal_frame(r, t1, t2);
        const int idx = f.node(ir, i1, i2);
        f.values.col(idx) = normal.transpose() * off;
        f.solve_residuals[idx] = g.norm();
      }
  }
  return f;
}

NormalGraphField graph_over_cone(const DiscreteVarifold& target, double sigma, double rho,
                                 int n_r, int n1, int n2) {
  if (target.ambient_dim() != 6 || target.dim() != 3)
    throw std::invalid_argument("graph_over_cone: target must be 3-d in R^6");
  GridSpec gs{sigma, rho, n_r, n1, n2};
  NormalGraphField f = empty_field(gs);
  f.solve_residuals.resize(f.values.cols());

  // Bin samples by the phases of z1, z2 (the cone chart angles of any
  // near-cone point) for O(1) candidate lookup.
  const int nb = 48;
  std::vector<std::vector<Eigen::Index>> bins(static_cast<std::size_t>(nb) * nb);
  auto bin_of = [nb](double a1, double a2) {
    auto wrap = [nb](double a) {
      int i = static_cast<int>(std::floor(a / (2.0 * M_PI) * nb));
      return ((i % nb) + nb) % nb;
    };
    return wrap(a1) * nb + wrap(a2);
  };
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    const auto y = target.point(i);
    bins[bin_of(std::atan2(y[1], y[0]), std::atan2(y[3], y[2]))].push_back(i);
  }

  for (int ir = 0; ir < f.n_r(); ++ir) {
    const double r = f.radii[ir];
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i2 = 0; i2 < n2; ++i2) {
        const double t1 = f.theta1(i1), t2 = f.theta2(i2);
        const Vec6 node = cone_point(r, t1, t2);
        Eigen::Index best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        const int b1 = static_cast<int>(std::floor(t1 / (2.0 * M_PI) * nb));
        const int b2 = static_cast<int>(std::floor(t2 / (2.0 * M_PI) * nb));
        for (int d1 = -1; d1 <= 1; ++d1)
          for (int d2 = -1; d2 <= 1; ++d2) {
            const int bb = (((b1 + d1) % nb + nb) % nb) * nb + (((b2 + d2) % nb + nb) % nb);
            for (Eigen::Index i : bins[bb]) {
              const double dist2 = (target.point(i) - node).squaredNorm();
              if (dist2 < best_d2) {
                best_d2 = dist2;
                best = i;
              }
            }
          }
        if (best < 0 || std::sqrt(best_d2) >= kTubeFraction * r)
          throw std::runtime_error("graph_over_cone: not graphical on annulus (samples)");
        // Slide within the sample's tangent plane onto the node's normal line.
        const Mat63 tang = cone_tangent_frame(r, t1, t2);
        const Mat63 splane = target.frame(best);
        const Eigen::Matrix3d a = tang.transpose() * splane;
        const Eigen::Vector3d rhs = tang.transpose() * (target.point(best) - node);
        const Eigen::Vector3d coef = a.fullPivLu().solve(-rhs);
        const Vec6 q = target.point(best) + splane * coef;
        const Vec6 off = q - node;
        if (off.norm() >= kTubeFraction * r)
          throw std::runtime_error("graph_over_cone: not graphical on annulus (samples)");
        const int idx = f.node(ir, i1, i2);
        f.values.col(idx) = cone_normal_frame(r, t1, t2).transpose() * off;
        f.solve_residuals[idx] = coef.norm();
      }
  }
  return f;
}

Vec6 lambda_one_block(const NormalGraphField& field) {
  Eigen::Matrix<double, 6, 6> ata = Eigen::Matrix<double, 6, 6>::Zero();
  Vec6 atb = Vec6::Zero();
  for (int ir = 0; ir < field.n_r(); ++ir) {
    const double w = std::pow(field.radii[ir], 3);
    for (int i1 = 0; i1 < field.n1; ++i1)
      for (int i2 = 0; i2 < field.n2; ++i2) {
        const Mat63 normal =
            cone_normal_frame(field.radii[ir], field.theta1(i1), field.theta2(i2));
        const Eigen::Vector3d u = field.values.col(field.node(ir, i1, i2));
        // u_c ~ normal.col(c) . b
        ata += w * normal * normal.transpose();
        atb += w * normal * u;
      }
  }
  return ata.ldlt().solve(atb);
}

AsymptoticReport decay_report(const NormalGraphField& field, double gamma_max) {
  const int n_r = field.n_r();
  if (n_r < 4) throw std::invalid_argument("decay_report: need >= 4 shells");
  AsymptoticReport rep;

  // Per-shell Fourier amplitudes per normal component.
  struct Series {
    int n1, n2;
    bool sine;
    int comp;
    Eigen::VectorXd amp;
  };
  std::vector<Series> series;
  const SpectralTable table = link_spectrum(std::max(gamma_max, 8.0), 3);
  std::vector<Eigen::Vector2i> reps;
  reps.emplace_back(0, 0);
  for (const SpectralLevel& lv : table.levels)
    for (const auto& n : lv.modes)
      if (n[0] > 0 || (n[0] == 0 && n[1] > 0)) reps.push_back(n);

  double global_max = 0.0;
  for (const auto& n : reps) {
    const bool constant = n[0] == 0 && n[1] == 0;
    for (int sine = 0; sine < (constant ? 1 : 2); ++sine)
      for (int comp = 0; comp < 3; ++comp) {
        Series s{n[0], n[1], static_cast<bool>(sine), comp, Eigen::VectorXd(n_r)};
        for (int ir = 0; ir < n_r; ++ir) {
          double acc = 0.0;
          for (int i1 = 0; i1 < field.n1; ++i1)
            for (int i2 = 0; i2 < field.n2; ++i2)
              acc += field.values(comp, field.node(ir, i1, i2)) *
                     mode_value(n[0], n[1], sine, field.theta1(i1), field.theta2(i2));
          s.amp[ir] = acc * (constant ? 1.0 : 2.0) / (field.n1 * field.n2);
        }
        global_max = std::max(global_max, s.amp.cwiseAbs().maxCoeff());
        series.push_back(std::move(s));
      }
  }

  std::vector<double> grid;  // indicial exponents for snapping
  for (const SpectralLevel& lv : table.levels) {
    grid.push_back(lv.alpha);
    grid.push_back(lv.beta);
  }

  // The leading behaviour is read off the outermost shell: modes are ranked
  // by |outer amplitude|, which is where noise from discrete targets is
  // weakest relative to the surviving decay.
  double outer_max = 0.0;
  for (const Series& s : series)
    outer_max = std::max(outer_max, std::abs(s.amp[n_r - 1]));

  rep.leading_exponent = -std::numeric_limits<double>::infinity();
  for (const Series& s : series) {
    const double m = s.amp.cwiseAbs().maxCoeff();
    if (!(m > 1e-6 * global_max) || global_max == 0.0) continue;
    std::vector<std::pair<double, double>> prof;
    for (int ir = 0; ir < n_r; ++ir)
      if (std::abs(s.amp[ir]) > 1e-13 * global_max)
        prof.emplace_back(field.radii[ir], std::abs(s.amp[ir]));
    if (prof.size() < 4) continue;
    const DecayFit fit = fit_decay_exponent(prof);
    ModeDecay md;
    md.n1 = s.n1;
    md.n2 = s.n2;
    md.sine = s.sine;
    md.component = s.comp;
    md.exponent = fit.exponent;
    md.amplitude = (s.amp[n_r - 1] >= 0.0 ? 1.0 : -1.0) * fit.amplitude;
    md.fit_residual = fit.max_log_residual;
    double best = std::numeric_limits<double>::infinity();
    for (double g : grid)
      if (std::abs(fit.exponent - g) < best) {
        best = std::abs(fit.exponent - g);
        md.snapped = g;
      }
    md.on_grid = best <= 0.15;
    rep.modes.push_back(md);
    if (std::abs(s.amp[n_r - 1]) >= 0.03 * outer_max) {
      const double effective = md.on_grid ? md.snapped : md.exponent;
      rep.leading_exponent = std::max(rep.leading_exponent, effective);
    }
  }
  if (rep.modes.empty() || !std::isfinite(rep.leading_exponent))
    rep.leading_exponent = 0.0;

  rep.lambda_one_block = lambda_one_block(field);

  // Misfit of the degree-one pattern and the residual after removing all
  // fitted modes.
  double num = 0.0, den = 0.0, tail = 0.0;
  for (int ir = 0; ir < n_r; ++ir)
    for (int i1 = 0; i1 < field.n1; ++i1)
      for (int i2 = 0; i2 < field.n2; ++i2) {
        const double r = field.radii[ir];
        const double t1 = field.theta1(i1), t2 = field.theta2(i2);
        const Eigen::Vector3d u = field.values.col(field.node(ir, i1, i2));
        const Mat63 normal = cone_normal_frame(r, t1, t2);
        const Eigen::Vector3d fit1 = normal.transpose() * rep.lambda_one_block;
        num += (u - fit1).squaredNorm();
        den += u.squaredNorm();
        Eigen::Vector3d synth = Eigen::Vector3d::Zero();
        for (const ModeDecay& md : rep.modes)
          synth[md.component] += md.amplitude *
                                 std::pow(r, md.on_grid ? md.snapped : md.exponent) *
                                 mode_value(md.n1, md.n2, md.sine, t1, t2);
        tail = std::max(tail, (u - synth).norm());
      }
  rep.lambda_one_misfit = den > 0.0 ? std::sqrt(num / den) : 0.0;
  rep.tail_norm = tail;
  return rep;
}

namespace {

template <typename FieldFn>
RecenterResult recenter_loop(const FieldFn& make_field, double rho) {
  RecenterResult out;
  Vec6 accum = Vec6::Zero();
  const double floor = 1e-9 * rho;
  for (int pass = 0; pass < 5; ++pass) {
    const NormalGraphField f = make_field(accum);
    const Vec6 step = lambda_one_block(f);
    ++out.passes;
    if (step.norm() < floor) {
      out.already_centered = pass == 0;
      break;
    }
    accum += step;
  }
  out.b_hat = accum;
  return out;
}

}  // namespace

RecenterResult recenter(const GraphTarget& target, double sigma, double rho, int n_r,
                        int n1, int n2) {
  return recenter_loop(
      [&](const Vec6& accum) {
        return graph_over_cone(translated(target, -accum), sigma, rho, n_r, n1, n2);
      },
      rho);
}

RecenterResult recenter(const DiscreteVarifold& target, double sigma, double rho, int n_r,
                        int n1, int n2) {
  return recenter_loop(
      [&](const Vec6& accum) {
        const DiscreteVarifold shifted = translate(target, -accum);
        return graph_over_cone(shifted, sigma, rho, n_r, n1, n2);
      },
      rho);
}

}  // namespace slcone
