#include "slcone/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

namespace slcone {

double mode_gamma(int n1, int n2) {
  return 2.0 * (static_cast<double>(n1) * n1 - static_cast<double>(n1) * n2 +
                static_cast<double>(n2) * n2);
}

double mode_value(int n1, int n2, bool sine, double t1, double t2) {
  const double phase = n1 * t1 + n2 * t2;
  return sine ? std::sin(phase) : std::cos(phase);
}

IndicialPair indicial_roots(double gamma, int m) {
  if (gamma < 0.0 || m < 2)
    throw std::invalid_argument("indicial_roots: need gamma >= 0 and m >= 2");
  IndicialPair p;
  p.gamma = gamma;
  const double mm = static_cast<double>(m - 2);
  const double disc = std::sqrt(mm * mm + 4.0 * gamma);
  p.alpha = 0.5 * (-mm + disc);
  p.beta = 0.5 * (-mm - disc);
  return p;
}

SpectralTable link_spectrum(double gamma_max, int m) {
  if (!(gamma_max > 0.0)) throw std::invalid_argument("link_spectrum: gamma_max > 0");
  SpectralTable table;
  table.m = m;
  table.gamma_max = gamma_max;
  // Q(n) >= |n|^2 / 2, so |n_i| <= sqrt(gamma_max) suffices.
  const int bound = static_cast<int>(std::floor(std::sqrt(gamma_max))) + 1;
  std::map<long, SpectralLevel> levels;  // key 2*Q(n), exact integer
  for (int n1 = -bound; n1 <= bound; ++n1)
    for (int n2 = -bound; n2 <= bound; ++n2) {
      const long q2 = 2L * (static_cast<long>(n1) * n1 - static_cast<long>(n1) * n2 +
                            static_cast<long>(n2) * n2);
      if (q2 > static_cast<long>(gamma_max)) continue;
      SpectralLevel& lv = levels[q2];
      lv.gamma = static_cast<double>(q2);
      lv.modes.emplace_back(n1, n2);
      ++lv.multiplicity;
    }
  for (auto& [key, lv] : levels) {
    const IndicialPair ip = indicial_roots(lv.gamma, m);
    lv.alpha = ip.alpha;
    lv.beta = ip.beta;
    std::sort(lv.modes.begin(), lv.modes.end(), [](const auto& a, const auto& b) {
      return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1];
    });
    table.levels.push_back(lv);
  }
  return table;
}

std::vector<double> SpectralTable::exponents_in(double lo, double hi) const {
  std::vector<double> out;
  for (const SpectralLevel& lv : levels) {
    if (lv.alpha > lo && lv.alpha < hi) out.push_back(lv.alpha);
    if (lv.beta > lo && lv.beta < hi) out.push_back(lv.beta);
  }
  std::sort(out.begin(), out.end());
  return out;
}

StabilityVerdict stability_check(double gamma_cutoff) {
  // alpha passes 2 at gamma = 6; certifying the (1,2) window and exhibiting
  // the next exponent needs the gamma = 8 level enumerated.
  if (gamma_cutoff < 8.0)
    throw std::invalid_argument("stability_check: cutoff too small to certify the window");
  const SpectralTable table = link_spectrum(gamma_cutoff, 3);
  StabilityVerdict v;
  v.gamma_cutoff = gamma_cutoff;
  v.exponents_in_window = table.exponents_in(v.window_lo, v.window_hi);
  std::vector<double> above;
  for (const SpectralLevel& lv : table.levels)
    if (lv.alpha >= v.window_hi) above.push_back(lv.alpha);
  std::sort(above.begin(), above.end());
  v.first_exponent_at_two = above.empty() ? 0.0 : above[0];
  v.next_exponent_above = above.size() > 1 ? above[1] : 0.0;

  for (const SpectralLevel& lv : table.levels)
    if (lv.gamma == 2.0) v.lambda_one_multiplicity = lv.multiplicity;

  // Project the restricted ambient coordinates onto the gamma = 2 modes on a
  // grid; the leftover must vanish.
  const int ng = 64;
  const double h = 2.0 * M_PI / ng;
  const std::array<Eigen::Vector2i, 3> reps = {Eigen::Vector2i(1, 0), Eigen::Vector2i(0, 1),
                                               Eigen::Vector2i(1, 1)};
  double worst = 0.0;
  for (int coord = 0; coord < 6; ++coord) {
    Eigen::MatrixXd f(ng, ng);
    for (int i = 0; i < ng; ++i)
      for (int j = 0; j < ng; ++j) {
        const double t1 = (i + 0.5) * h, t2 = (j + 0.5) * h;
        f(i, j) = cone_point(1.0, t1, t2)[coord];
      }
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(ng, ng);
    for (const auto& n : reps)
      for (int sine = 0; sine < 2; ++sine) {
        double c = 0.0;
        for (int i = 0; i < ng; ++i)
          for (int j = 0; j < ng; ++j)
            c += f(i, j) * mode_value(n[0], n[1], sine, (i + 0.5) * h, (j + 0.5) * h);
        c *= 2.0 / (ng * ng);
        for (int i = 0; i < ng; ++i)
          for (int j = 0; j < ng; ++j)
            proj(i, j) += c * mode_value(n[0], n[1], sine, (i + 0.5) * h, (j + 0.5) * h);
      }
    worst = std::max(worst, (f - proj).norm() / f.norm());
  }
  v.coordinate_span_residual = worst;

  v.stable = v.exponents_in_window.empty() && v.lambda_one_multiplicity == 6 &&
             v.coordinate_span_residual < 1e-10;
  return v;
}

namespace {

Eigen::Matrix2d numeric_inverse_metric() {
  return link_metric_numeric(0.37, 1.21).inverse();
}

}  // namespace

std::vector<double> discrete_link_eigenvalues(int n_grid, int count) {
  if (n_grid < 4) throw std::invalid_argument("discrete_link_eigenvalues: grid too small");
  const Eigen::Matrix2d gi = numeric_inverse_metric();
  const double h = 2.0 * M_PI / n_grid;
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(n_grid) * n_grid);
  for (int k1 = 0; k1 < n_grid; ++k1)
    for (int k2 = 0; k2 < n_grid; ++k2) {
      const double w1 = k1 * h, w2 = k2 * h;
      const double lam = gi(0, 0) * (2.0 - 2.0 * std::cos(w1)) / (h * h) +
                         gi(1, 1) * (2.0 - 2.0 * std::cos(w2)) / (h * h) +
                         2.0 * gi(0, 1) * std::sin(w1) * std::sin(w2) / (h * h);
      vals.push_back(lam);
    }
  std::sort(vals.begin(), vals.end());
  if (count < static_cast<int>(vals.size())) vals.resize(count);
  return vals;
}

Eigen::MatrixXd discrete_link_laplacian_dense(int n_grid) {
  if (n_grid < 4 || n_grid > 64)
    throw std::invalid_argument("discrete_link_laplacian_dense: n in [4, 64]");
  const Eigen::Matrix2d gi = numeric_inverse_metric();
  const double h = 2.0 * M_PI / n_grid;
  const int n2 = n_grid * n_grid;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n2, n2);
  auto idx = [n_grid](int i, int j) {
    return ((i % n_grid + n_grid) % n_grid) * n_grid + ((j % n_grid + n_grid) % n_grid);
  };
  for (int i = 0; i < n_grid; ++i)
    for (int j = 0; j < n_grid; ++j) {
      const int row = idx(i, j);
      a(row, row) += 2.0 * (gi(0, 0) + gi(1, 1)) / (h * h);
      a(row, idx(i + 1, j)) += -gi(0, 0) / (h * h);
      a(row, idx(i - 1, j)) += -gi(0, 0) / (h * h);
      a(row, idx(i, j + 1)) += -gi(1, 1) / (h * h);
      a(row, idx(i, j - 1)) += -gi(1, 1) / (h * h);
      const double c = -2.0 * gi(0, 1) / (4.0 * h * h);
      a(row, idx(i + 1, j + 1)) += c;
      a(row, idx(i - 1, j - 1)) += c;
      a(row, idx(i + 1, j - 1)) += -c;
      a(row, idx(i - 1, j + 1)) += -c;
    }
  return a;
}

ConeScalarField make_cone_scalar_field(
    double sigma, double rho, int n_r, int n1, int n2,
    const std::function<double(double, double, double)>& fn) {
  if (!(0.0 < sigma && sigma < rho))
    throw std::invalid_argument("make_cone_scalar_field: need 0 < sigma < rho");
  ConeScalarField f;
  f.n1 = n1;
  f.n2 = n2;
  f.radii.resize(n_r);
  const double ht = std::log(rho / sigma) / n_r;
  for (int ir = 0; ir < n_r; ++ir) f.radii[ir] = sigma * std::exp((ir + 0.5) * ht);
  f.values.resize(n_r, n1 * n2);
  for (int ir = 0; ir < n_r; ++ir)
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i2 = 0; i2 < n2; ++i2)
        f.values(ir, f.link_index(i1, i2)) = fn(f.radii[ir], f.theta1(i1), f.theta2(i2));
  return f;
}

namespace {

struct ModeBasis {
  std::vector<Eigen::Vector2i> reps;  // one per +/- orbit (and (0,0))
};

ModeBasis mode_reps(double gamma_max) {
  ModeBasis b;
  const int bound = static_cast<int>(std::floor(std::sqrt(gamma_max))) + 1;
  b.reps.emplace_back(0, 0);
  for (int n1 = -bound; n1 <= bound; ++n1)
    for (int n2 = -bound; n2 <= bound; ++n2) {
      if (n1 == 0 && n2 == 0) continue;
      if (!(n1 > 0 || (n1 == 0 && n2 > 0))) continue;  // lex orbit representative
      if (mode_gamma(n1, n2) > gamma_max) continue;
      b.reps.emplace_back(n1, n2);
    }
  std::sort(b.reps.begin() + 1, b.reps.end(), [](const auto& a, const auto& c) {
    const double ga = mode_gamma(a[0], a[1]), gc = mode_gamma(c[0], c[1]);
    if (ga != gc) return ga < gc;
    return a[0] != c[0] ? a[0] < c[0] : a[1] < c[1];
  });
  return b;
}

}  // namespace

ModeExpansion harmonic_expand(const ConeScalarField& field, double gamma_max, int m) {
  const int n_r = field.n_r();
  if (n_r < 3) throw std::invalid_argument("harmonic_expand: need >= 3 radial shells");
  const ModeBasis basis = mode_reps(gamma_max);
  for (const auto& n : basis.reps)
    if (2 * std::max(std::abs(n[0]), std::abs(n[1])) >= std::min(field.n1, field.n2))
      throw std::invalid_argument("harmonic_expand: cutoff above the grid Nyquist");

  ModeExpansion out;
  out.gamma_max = gamma_max;
  Eigen::VectorXd wts(n_r);
  for (int ir = 0; ir < n_r; ++ir) wts[ir] = std::pow(field.radii[ir], m);

  for (const auto& n : basis.reps) {
    const bool constant = n[0] == 0 && n[1] == 0;
    const IndicialPair ip = indicial_roots(mode_gamma(n[0], n[1]), m);
    for (int sine = 0; sine < (constant ? 1 : 2); ++sine) {
      // Per-shell Fourier coefficient.
      Eigen::VectorXd c(n_r);
      for (int ir = 0; ir < n_r; ++ir) {
        double acc = 0.0;
        for (int i1 = 0; i1 < field.n1; ++i1)
          for (int i2 = 0; i2 < field.n2; ++i2)
            acc += field.values(ir, field.link_index(i1, i2)) *
                   mode_value(n[0], n[1], sine, field.theta1(i1), field.theta2(i2));
        c[ir] = acc * (constant ? 1.0 : 2.0) / (field.n1 * field.n2);
      }
      // Weighted linear fit c(r) ~ a r^alpha + b r^beta.
      ModeCoefficient mc;
      mc.n1 = n[0];
      mc.n2 = n[1];
      mc.sine = sine;
      mc.alpha = ip.alpha;
      mc.beta = ip.beta;
      Eigen::MatrixXd X(n_r, 2);
      for (int ir = 0; ir < n_r; ++ir) {
        X(ir, 0) = std::pow(field.radii[ir], ip.alpha);
        X(ir, 1) = std::pow(field.radii[ir], ip.beta);
      }
      const Eigen::MatrixXd Xw = wts.asDiagonal() * X;
      const Eigen::Vector2d ab =
          (X.transpose() * Xw).ldlt().solve(X.transpose() * (wts.asDiagonal() * c));
      mc.a = ab[0];
      mc.b = ab[1];
      const Eigen::VectorXd res = c - X * ab;
      mc.residual = std::sqrt((wts.asDiagonal() * res).dot(res) / wts.sum());
      out.coefficients.push_back(mc);
    }
  }
  return out;
}

ConeScalarField synthesize_modes(const ModeExpansion& exp, const Eigen::VectorXd& radii,
                                 int n1, int n2) {
  ConeScalarField f;
  f.radii = radii;
  f.n1 = n1;
  f.n2 = n2;
  f.values = Eigen::MatrixXd::Zero(radii.size(), n1 * n2);
  for (const ModeCoefficient& mc : exp.coefficients)
    for (int ir = 0; ir < radii.size(); ++ir) {
      const double radial =
          mc.a * std::pow(radii[ir], mc.alpha) + mc.b * std::pow(radii[ir], mc.beta);
      if (radial == 0.0) continue;
      for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n2; ++i2)
          f.values(ir, f.link_index(i1, i2)) +=
              radial * mode_value(mc.n1, mc.n2, mc.sine, f.theta1(i1), f.theta2(i2));
    }
  return f;
}

DecayFit fit_decay_exponent(const std::vector<std::pair<double, double>>& profile) {
  if (profile.size() < 4)
    throw std::invalid_argument("fit_decay_exponent: need >= 4 shells");
  const int n = static_cast<int>(profile.size());
  Eigen::VectorXd x(n), y(n);
  for (int i = 0; i < n; ++i) {
    if (!(profile[i].second > 0.0))
      throw std::invalid_argument("fit_decay_exponent: profile values must be positive");
    x[i] = std::log(profile[i].first);
    y[i] = std::log(profile[i].second);
  }
  const double xm = x.mean(), ym = y.mean();
  const Eigen::VectorXd xc = x.array() - xm, yc = y.array() - ym;
  const double sxx = xc.squaredNorm();
  if (sxx <= 0.0) throw std::invalid_argument("fit_decay_exponent: degenerate radii");
  DecayFit fit;
  fit.exponent = xc.dot(yc) / sxx;
  const double intercept = ym - fit.exponent * xm;
  fit.amplitude = std::exp(intercept);
  const Eigen::VectorXd res = y - (fit.exponent * x.array() + intercept).matrix();
  fit.max_log_residual = res.cwiseAbs().maxCoeff();
  if (n > 2) fit.stderr_exponent = std::sqrt(res.squaredNorm() / (n - 2) / sxx);
  return fit;
}

namespace {

constexpr double kD2[7] = {1.0 / 90, -3.0 / 20, 1.5, -49.0 / 18, 1.5, -3.0 / 20, 1.0 / 90};
constexpr double kD1[7] = {-1.0 / 60, 3.0 / 20, -0.75, 0.0, 0.75, -3.0 / 20, 1.0 / 60};

}  // namespace

ConeScalarField apply_cone_operator(const ConeScalarField& u, int m) {
  const int n_r = u.n_r();
  if (n_r < 7 || u.n1 < 7 || u.n2 < 7)
    throw std::invalid_argument("apply_cone_operator: need >= 7 nodes per direction");
  const double ht = std::log(u.radii[1] / u.radii[0]);
  const double h1 = 2.0 * M_PI / u.n1, h2 = 2.0 * M_PI / u.n2;
  const Eigen::Matrix2d gi = numeric_inverse_metric();

  ConeScalarField out = u;
  out.values.setZero();
  auto val = [&](int ir, int i1, int i2) {
    return u.values(ir, u.link_index((i1 % u.n1 + u.n1) % u.n1, (i2 % u.n2 + u.n2) % u.n2));
  };
  for (int ir = 3; ir < n_r - 3; ++ir)
    for (int i1 = 0; i1 < u.n1; ++i1)
      for (int i2 = 0; i2 < u.n2; ++i2) {
        double dtt = 0.0, dt = 0.0, d11 = 0.0, d22 = 0.0;
        for (int k = -3; k <= 3; ++k) {
          dtt += kD2[k + 3] * val(ir + k, i1, i2);
          dt += kD1[k + 3] * val(ir + k, i1, i2);
          d11 += kD2[k + 3] * val(ir, i1 + k, i2);
          d22 += kD2[k + 3] * val(ir, i1, i2 + k);
        }
        double d12 = 0.0;
        for (int k = -3; k <= 3; ++k) {
          if (kD1[k + 3] == 0.0) continue;
          double row = 0.0;
          for (int l = -3; l <= 3; ++l) row += kD1[l + 3] * val(ir, i1 + k, i2 + l);
          d12 += kD1[k + 3] * row;
        }
        dtt /= ht * ht;
        dt /= ht;
        d11 /= h1 * h1;
        d22 /= h2 * h2;
        d12 /= h1 * h2;
        const double lap_sigma =
            -(gi(0, 0) * d11 + 2.0 * gi(0, 1) * d12 + gi(1, 1) * d22);
        out.values(ir, u.link_index(i1, i2)) = dtt + (m - 2) * dt - lap_sigma;
      }
  return out;
}

double interior_sup(const ConeScalarField& f) {
  const int n_r = f.n_r();
  if (n_r < 7) throw std::invalid_argument("interior_sup: too few shells");
  double sup = 0.0;
  for (int ir = 3; ir < n_r - 3; ++ir)
    sup = std::max(sup, f.values.row(ir).cwiseAbs().maxCoeff());
  return sup;
}

}  // namespace slcone
