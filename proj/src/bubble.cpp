#include "slcone/bubble.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace slcone {

namespace {

// Annulus energies of V - y, accumulated into fine radial bins; E(delta) is
// a suffix sum. Bin width rho / 4096 sits well under the bisection tolerance.
struct CenteredEnergies {
  double rho = 0.0;
  Eigen::VectorXd suffix;  // suffix[k] = energy with distance >= k * rho / bins
  int excluded = 0;

  int bins() const { return static_cast<int>(suffix.size()); }
  double annulus_energy(double delta) const {
    const int k = std::clamp(static_cast<int>(std::ceil(delta / rho * bins())), 0,
                             bins() - 1);
    return suffix[k];
  }
  double total() const { return suffix.size() ? suffix[0] : 0.0; }
};

CenteredEnergies centered_energies(const DiscreteVarifold& v, const Vec6& y, double rho,
                                   int stride = 1) {
  constexpr int kBins = 4096;
  CenteredEnergies ce;
  ce.rho = rho;
  Eigen::VectorXd bin = Eigen::VectorXd::Zero(kBins);
  const double scale = kBins / rho;
  const int dim = v.dim();
  for (Eigen::Index i = 0; i < v.size(); i += stride) {
    const Vec6 p = v.point(i) - y;
    const double d2 = p.squaredNorm();
    if (d2 >= rho * rho) continue;
    const double d = std::sqrt(d2);
    if (d < 1e-12) {
      ++ce.excluded;
      continue;
    }
    const int k = std::min(static_cast<int>(d * scale), kBins - 1);
    bin[k] += stride * v.weight(i) * energy_integrand(p, v.frame(i), dim);
  }
  ce.suffix.resize(kBins);
  double acc = 0.0;
  for (int k = kBins; k-- > 0;) {
    acc += bin[k];
    ce.suffix[k] = acc;
  }
  return ce;
}

}  // namespace

EnergyProfile energy_profile(const DiscreteVarifold& v, const Vec6& y, double rho,
                             std::span<const double> delta_grid) {
  if (delta_grid.empty()) throw std::invalid_argument("energy_profile: empty delta grid");
  for (std::size_t i = 0; i + 1 < delta_grid.size(); ++i)
    if (!(delta_grid[i] < delta_grid[i + 1]))
      throw std::invalid_argument("energy_profile: delta grid must increase");
  if (!(delta_grid.back() < rho))
    throw std::invalid_argument("energy_profile: max delta must stay below rho");
  const CenteredEnergies ce = centered_energies(v, y, rho);
  EnergyProfile out;
  out.excluded_samples = ce.excluded;
  for (double d : delta_grid) {
    out.deltas.push_back(d);
    out.energies.push_back(ce.annulus_energy(d));
  }
  return out;
}

namespace {

std::optional<double> scale_from_profile(const CenteredEnergies& ce, double rho,
                                         double eps, double bisect_tol) {
  const double threshold = 0.5 * eps;
  if (ce.total() < threshold) return std::nullopt;
  double lo = 0.0, hi = rho;  // E(lo) >= threshold > E(hi) = 0
  while (hi - lo > bisect_tol * rho) {
    const double mid = 0.5 * (lo + hi);
    (ce.annulus_energy(mid) >= threshold ? lo : hi) = mid;
  }
  return hi;
}

std::optional<CenterPick> center_search(const DiscreteVarifold& v,
                                        std::span<const Vec6> centers, double rho,
                                        double eps, int stride) {
  if (centers.empty()) throw std::invalid_argument("bubble_center: empty center grid");
  std::optional<CenterPick> best;
  std::vector<double> deltas;
  deltas.reserve(centers.size());
  for (const Vec6& y : centers) {
    const CenteredEnergies ce = centered_energies(v, y, rho, stride);
    // Bubbling presumes energy >= eps about every candidate center; a center
    // below that sits at a cone-like point, so there is no bubble to extract.
    if (ce.total() < eps) return std::nullopt;
    const std::optional<double> d = scale_from_profile(ce, rho, eps, 1e-3);
    deltas.push_back(d.value_or(-1.0));
    if (!d) continue;
    const bool better = !best || *d < best->delta ||
                        (*d == best->delta && y.norm() < best->center.norm());
    if (better) best = CenterPick{y, *d, 0};
  }
  if (best)
    for (double d : deltas)
      if (d >= 0.0 && d <= 1.05 * best->delta) ++best->plateau_count;
  return best;
}

}  // namespace

std::optional<double> bubble_scale(const DiscreteVarifold& v, const Vec6& y, double rho,
                                   double eps, double bisect_tol) {
  if (!(eps > 0.0)) throw std::invalid_argument("bubble_scale: eps must be positive");
  return scale_from_profile(centered_energies(v, y, rho), rho, eps, bisect_tol);
}

std::optional<CenterPick> bubble_center(const DiscreteVarifold& v,
                                        std::span<const Vec6> centers, double rho,
                                        double eps) {
  return center_search(v, centers, rho, eps, 1);
}

DiscreteVarifold extract_bubble(const DiscreteVarifold& v, const Vec6& y, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("extract_bubble: delta must be positive");
  return rescale(translate(v, -y), 1.0 / delta);
}

ClassifyOutcome classify_bubble(const DiscreteVarifold& w, const ClassifyOptions& opts) {
  ClassifyOutcome out;
  if (w.size() == 0) {
    out.failure = "no samples";
    return out;
  }

  // Extent of the sampled portion; the graph annulus sits inside it.
  std::vector<double> radii(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) radii[i] = w.point(i).norm();
  std::vector<double> sorted = radii;
  std::sort(sorted.begin(), sorted.end());
  const double r_hi = sorted[static_cast<std::size_t>(0.999 * (sorted.size() - 1))];
  const double sigma = opts.annulus_lo_frac * r_hi;
  const double rho = opts.annulus_hi_frac * r_hi;

  RecenterResult rc;
  try {
    rc = recenter(w, sigma, rho, opts.n_r, opts.n_link, opts.n_link);
  } catch (const std::exception& e) {
    out.failure = std::string("not in the classified family: ") + e.what();
    return out;
  }

  // Fiber label: median of F over the recentered inner-half samples (the
  // moment maps amplify recentering error linearly in radius).
  const double r_med = sorted[sorted.size() / 2];
  std::array<std::vector<double>, 3> comps;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (radii[i] > r_med) continue;
    const Eigen::Vector3d f = fibration_F(to_complex3(w.point(i) - rc.b_hat));
    for (int k = 0; k < 3; ++k) comps[k].push_back(f[k]);
  }
  Eigen::Vector3d label;
  for (int k = 0; k < 3; ++k) {
    auto& c = comps[k];
    std::nth_element(c.begin(), c.begin() + c.size() / 2, c.end());
    label[k] = c[c.size() / 2];
  }
  out.fiber_label = label;

  std::vector<double> dev;
  dev.reserve(comps[0].size());
  for (std::size_t i = 0; i < comps[0].size(); ++i)
    dev.push_back(std::sqrt(std::pow(comps[0][i] - label[0], 2) +
                            std::pow(comps[1][i] - label[1], 2) +
                            std::pow(comps[2][i] - label[2], 2)));
  std::nth_element(dev.begin(), dev.begin() + static_cast<std::ptrdiff_t>(0.9 * dev.size()),
                   dev.end());
  out.label_spread = dev[static_cast<std::size_t>(0.9 * dev.size())];

  const Eigen::Vector3d d = chart_label_from_moment(label);
  const double tol = opts.label_tol_scale * std::max(1.0, d.norm());
  if (out.label_spread > tol) {
    out.failure = "not in the classified family: fibration value not constant";
    return out;
  }
  out.fiber_class = classify_fiber(label, tol);

  if (out.fiber_class.kind == FiberKind::SmoothCylinder) {
    out.failure = "not in the classified family: label off the discriminant rays";
    return out;
  }

  ModelFit fit;
  fit.translation = rc.b_hat;
  if (out.fiber_class.kind == FiberKind::ConeFiber) {
    fit.model = ModelId::Cone;
    fit.scale = 1.0;
  } else {
    fit.model = out.fiber_class.ray_model;
    fit.scale = std::sqrt(std::max(out.fiber_class.ray_param, 0.0));
  }

  // Relative weak distance against freshly sampled s L + b on balls tied to
  // the sampled extent. Ball radii snap to gaps between the sample shells so
  // that the cut through w is exact and only the reference quadrature counts.
  const double ball_scale = 0.9 * rho;
  std::vector<double> shifted(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i)
    shifted[i] = (w.point(i) - fit.translation).norm();
  std::sort(shifted.begin(), shifted.end());
  auto snap_to_gap = [&shifted](double r) {
    auto it = std::lower_bound(shifted.begin(), shifted.end(), r);
    if (it == shifted.begin() || it == shifted.end()) return r;
    return 0.5 * (*(it - 1) + *it);
  };
  std::vector<TestBall> balls;
  for (double frac : {0.45, 0.7, 1.0})
    balls.push_back({fit.translation, snap_to_gap(frac * ball_scale)});

  // Reference sampled in radial segments whose edges are the ball radii, so
  // both sides of the comparison cut exactly on shell boundaries.
  DiscreteVarifold ref(6, 3, "reference");
  {
    double lo = 1e-4 * ball_scale;
    for (const TestBall& b : balls) {
      const double hi = b.radius;
      const int n_r = std::max(
          8, static_cast<int>(2 * opts.reference_n * std::log(hi / std::max(lo, 0.05 * hi))));
      DiscreteVarifold piece =
          fit.model == ModelId::Cone
              ? sample_cone(lo, hi, n_r, opts.reference_n)
              : rescale(sample_model_annulus(fit.model, lo / fit.scale, hi / fit.scale,
                                             n_r, opts.reference_n, opts.reference_n),
                        fit.scale);
      for (Eigen::Index i = 0; i < piece.size(); ++i)
        ref.add_sample(piece.point(i) + fit.translation, piece.frame(i), piece.weight(i));
      lo = hi;
    }
  }
  double rel = 0.0;
  for (const TestBall& b : balls) {
    const double mw = mass_in_ball(w, b.center, b.radius);
    const double mr = mass_in_ball(ref, b.center, b.radius);
    rel = std::max(rel, std::abs(mw - mr) / std::max(mr, 1e-12));
  }
  fit.residual = rel;
  out.fit = fit;
  out.ok = true;
  return out;
}

BubbleScan run_bubble_scan(const DiscreteVarifold& v, double rho, double eps,
                           int nodes_per_axis, int passes) {
  BubbleScan scan;
  scan.rho = rho;
  scan.eps = eps;
  double radius = rho * eps;  // the proof's search ball
  Vec6 middle = Vec6::Zero();
  std::optional<CenterPick> pick;
  for (int pass = 0; pass < passes; ++pass) {
    std::vector<Vec6> centers;
    const int n = nodes_per_axis;
    const double h = 2.0 * radius / n;
    std::array<int, 6> ix{};
    // full n^6 grid in the cube, clipped to the ball on the first pass
    std::function<void(int)> rec = [&](int axis) {
      if (axis == 6) {
        Vec6 y;
        for (int k = 0; k < 6; ++k) y[k] = middle[k] + (ix[k] - (n - 1) * 0.5) * h;
        if (pass == 0 && (y - middle).norm() > radius) return;
        centers.push_back(y);
        return;
      }
      for (ix[axis] = 0; ix[axis] < n; ++ix[axis]) rec(axis + 1);
    };
    rec(0);
    // the coarse location pass runs on a subsampled measure
    const int stride =
        pass == 0 ? std::max<int>(1, static_cast<int>(v.size() / 30000)) : 1;
    const std::optional<CenterPick> p = center_search(v, centers, rho, eps, stride);
    if (!p) break;
    if (pass == 0) scan.plateau_count = p->plateau_count;
    pick = p;
    middle = p->center;
    radius = 0.75 * h;  // shrink to the current spacing
  }
  if (!pick) return scan;

  // polish: the annulus-energy integrand concentrates on the bubble, so its
  // centroid re-centers the pick without further grid work
  for (int it = 0; it < 2; ++it) {
    const double reach = 3.0 * pick->delta;
    Vec6 num = Vec6::Zero();
    double den = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const Vec6 p = v.point(i) - pick->center;
      const double d = p.norm();
      if (d < 1e-12 || d > reach) continue;
      const double e = v.weight(i) * energy_integrand(p, v.frame(i), v.dim());
      num += e * v.point(i);
      den += e;
    }
    if (den <= 0.0) break;
    const Vec6 polished = num / den;
    const std::optional<double> d = bubble_scale(v, polished, rho, eps);
    if (!d) break;
    if (*d <= pick->delta * 1.02) {
      pick->center = polished;
      pick->delta = *d;
    }
  }

  scan.found = true;
  scan.center = pick->center;
  scan.delta = pick->delta;
  scan.plateau_count = std::max(scan.plateau_count, pick->plateau_count);
  const DiscreteVarifold w = extract_bubble(v, pick->center, pick->delta);
  scan.classification = classify_bubble(w);
  return scan;
}

}  // namespace slcone
