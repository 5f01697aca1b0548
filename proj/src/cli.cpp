#include "slcone/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "slcone/bubble.hpp"
#include "slcone/io_util.hpp"

namespace slcone {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitPrecondition = 2;
constexpr int kExitClassification = 3;
constexpr int kExitUsage = 64;

Vec6 parse_vec6(const std::string& s) {
  Vec6 v = Vec6::Zero();
  std::stringstream ss(s);
  std::string tok;
  int k = 0;
  while (std::getline(ss, tok, ',') && k < 6) v[k++] = std::stod(tok);
  if (k != 6) throw std::invalid_argument("expected 6 comma-separated numbers: " + s);
  return v;
}

Eigen::Vector3d parse_vec3(const std::string& s) {
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  std::stringstream ss(s);
  std::string tok;
  int k = 0;
  while (std::getline(ss, tok, ',') && k < 3) v[k++] = std::stod(tok);
  if (k != 3) throw std::invalid_argument("expected 3 comma-separated numbers: " + s);
  return v;
}

std::ostream& open_or_stdout(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open output file " + path);
  return file;
}

// Pre-scan for --config and use its values as option defaults; explicit flags
// still win because CLI11 parses them on top.
json load_config(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") {
      std::ifstream is(args[i + 1]);
      if (!is) throw std::runtime_error("cannot open config " + args[i + 1]);
      return json::parse(is);
    }
  return json::object();
}

struct Defaults {
  const json* cfg;
  double num(const char* key, double fallback) const {
    return cfg->contains(key) ? (*cfg)[key].get<double>() : fallback;
  }
  int integer(const char* key, int fallback) const {
    return cfg->contains(key) ? (*cfg)[key].get<int>() : fallback;
  }
  std::string str(const char* key, std::string fallback) const {
    return cfg->contains(key) ? (*cfg)[key].get<std::string>() : fallback;
  }
};

DiscreteVarifold generate_target(const std::string& id, double scale, const Vec6& b,
                                 double sigma, double rho, int n_r, int n_theta,
                                 int n_phi) {
  const ModelId mid = model_from_name(id);
  DiscreteVarifold unit =
      mid == ModelId::Cone
          ? sample_cone(std::max(sigma, 1e-6 * rho) / scale, rho / scale, n_r, n_theta)
          : sample_model_annulus(mid, std::min(sigma / scale, 0.5), rho / scale, n_r,
                                 n_theta, n_phi);
  DiscreteVarifold v = scale == 1.0 ? std::move(unit) : rescale(unit, scale);
  if (b.norm() > 0.0) v = translate(v, b);
  return v;
}

int cmd_spectrum(double gamma_max, const std::string& out, const std::string& echo) {
  const SpectralTable table = link_spectrum(gamma_max);
  std::ofstream file;
  std::ostream& os = open_or_stdout(file, out);
  if (!echo.empty()) os << "# config: " << echo << "\n";
  os << "n1,n2,gamma[dimensionless],multiplicity,alpha[radial exponent],"
     << "beta[radial exponent]\n";
  for (const SpectralLevel& lv : table.levels)
    for (const auto& n : lv.modes)
      os << n[0] << ',' << n[1] << ',' << fmt_g17(lv.gamma) << ',' << lv.multiplicity
         << ',' << fmt_g17(lv.alpha) << ',' << fmt_g17(lv.beta) << "\n";
  return kExitOk;
}

int cmd_stability() {
  const StabilityVerdict v = stability_check();
  std::cout << "stable: " << (v.stable ? "true" : "false")
            << "; Lambda∩(1,2)=∅ certified to γ≤" << v.gamma_cutoff << "\n";
  std::cout << "first exponent at 2: " << fmt_g17(v.first_exponent_at_two)
            << "; next: " << fmt_g17(v.next_exponent_above) << "\n";
  std::cout << "lambda=1 multiplicity: " << v.lambda_one_multiplicity
            << " (coordinate span residual " << fmt_g17(v.coordinate_span_residual)
            << ")\n";
  return v.stable ? kExitOk : kExitPrecondition;
}

int cli_selfcheck(std::uint64_t seed) {
  int failures = 0;
  auto check = [&failures](bool ok, const std::string& name) {
    std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);

  const CyStructure cy = flat_structure(3);
  check(cy.factor_residual() < 1e-12 && cy.j_square_residual() < 1e-12 &&
            cy.metric_residual() < 1e-12,
        "flat structure identities");
  check(std::abs(psi_factor(cy.omega_form(), cy.holomorphic_form * Complex(2.0, 0.0), 3) -
                 std::pow(2.0, 1.0 / 3.0)) < 1e-12,
        "conformal factor scaling in the volume form");
  check(std::abs(psi_factor(cy.omega_form() * 4.0, cy.holomorphic_form, 3) - 0.5) < 1e-12,
        "conformal factor scaling in the symplectic form");

  bool comass_ok = true;
  for (int it = 0; it < 300; ++it) {
    Mat raw(6, 3);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 3; ++j) raw(i, j) = gauss(rng);
    const TangentPlane p = make_plane(Vec::Zero(6), raw);
    const double v = pairing(cy.re_holomorphic(), frame_wedge(p.frame));
    if (std::abs(v) > 1.0 + 1e-12) comass_ok = false;
  }
  check(comass_ok, "calibration comass bound on random planes");

  bool cone_ok = true;
  for (int it = 0; it < 50; ++it) {
    const double r = 0.25 + 4.0 * std::abs(gauss(rng));
    const double t1 = angle(rng), t2 = angle(rng);
    TangentPlane p;
    p.base_point = cone_point(r, t1, t2);
    p.frame = cone_tangent_frame(r, t1, t2);
    if (calibration_defect(cy, p).sum() > 1e-10) cone_ok = false;
    if (std::abs(divergence_radial(p) - 3.0) > 1e-12) cone_ok = false;
  }
  check(cone_ok, "cone tangent planes calibrated, radial divergence 3");
  check((link_metric_numeric(angle(rng), angle(rng)) - link_metric()).norm() < 1e-12,
        "link metric recomputation");

  const SpectralTable tab = link_spectrum(7.0);
  check(tab.levels.size() == 3 && tab.levels[0].multiplicity == 1 &&
            tab.levels[1].multiplicity == 6 && tab.levels[2].multiplicity == 6,
        "spectrum multiplicities 1, 6, 6");
  const IndicialPair i2 = indicial_roots(2.0, 3), i6 = indicial_roots(6.0, 3);
  check(i2.alpha == 1.0 && i2.beta == -2.0 && i6.alpha == 2.0 && i6.beta == -3.0,
        "indicial roots at gamma 2 and 6");
  check(stability_check().stable, "stability certificate");

  {  // independent bisection for the cubic
    auto oracle = [](double rhs) {
      double lo = 0.0, hi = 2.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((mid + 1.0) * (mid + 1.0) * mid < rhs ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    };
    check(std::abs(solve_phi(1, 1, 0, 1) - oracle(1.0)) < 1e-12 &&
              solve_phi(0, 0, 1, 0) == 1.0 && solve_phi(2, 0, 0, 0) == 0.0,
          "positive cubic root vs bisection");
  }

  {
    const Eigen::Vector3d c(0.7, -0.3, 0.4);
    bool ok = !in_Y(c);
    for (int it = 0; it < 20 && ok; ++it) {
      const double t = 4.0 * gauss(rng);
      const std::complex<double> u = std::polar(1.0, angle(rng));
      const std::complex<double> v = std::polar(1.0, angle(rng));
      const C3 z = fiber_point(c, t, u, v);
      if ((fibration_F(z) - c).norm() > 1e-12) ok = false;
      const FiberCoords fc = fiber_coords(c, z);
      if (std::abs(fc.t - t) > 1e-10 || std::abs(fc.u - u) > 1e-10 ||
          std::abs(fc.v - v) > 1e-10)
        ok = false;
    }
    check(ok, "fiber chart round trips and label constancy");
  }

  bool model_ok = true;
  for (ModelId id : {ModelId::L1, ModelId::L2, ModelId::L3})
    for (int it = 0; it < 20; ++it) {
      const std::complex<double> zp(2.0 * gauss(rng), 2.0 * gauss(rng));
      const C3 z = model_point(id, angle(rng), zp);
      if (model_residual(id, z) > 1e-12) model_ok = false;
    }
  check(model_ok, "model charts satisfy the defining equations");

  const DiscreteVarifold cone_s = sample_cone(1.0, 2.0, 24, 24);
  check(energy(cone_s) < 1e-12, "cone energy vanishes");
  // radial edges at powers of 2^{1/32}, so the unit sphere is grid-aligned
  const DiscreteVarifold big = sample_cone(1.0 / 128.0, 2.0, 256, 24);
  check(std::abs(mass_in_ball(big, 1.0) - link_area() / 3.0) <
            0.005 * link_area() / 3.0,
        "cone unit-ball mass");
  const DiscreteVarifold scaled = rescale(cone_s, 2.0);
  check(std::abs(mass_in_ball(scaled, 4.0) - 8.0 * mass_in_ball(cone_s, 2.0)) < 1e-12,
        "mass scaling covariance");
  check(std::abs(energy(rescale(sample_model(ModelId::L1, 3.0, 12), 2.0)) -
                 energy(sample_model(ModelId::L1, 3.0, 12))) < 1e-14,
        "energy scale invariance");
  const TestBall unit_ball{Vec::Zero(6), 1.0};
  check(weak_distance(cone_s, cone_s, std::span<const TestBall>(&unit_ball, 1)) == 0.0,
        "weak distance reflexivity");

  std::cout << (failures == 0 ? "selfcheck passed" : "selfcheck FAILED") << "\n";
  return failures;
}

}  // namespace

int cli_run(const std::vector<std::string>& args) {
  CLI::App app{"slcone: special Lagrangian cone geometry toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with default parameter values");
  json cfg;
  try {
    cfg = load_config(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  }
  const Defaults dv{&cfg};

  // spectrum
  auto* sp = app.add_subcommand("spectrum", "link Laplace spectrum with indicial roots");
  double sp_gamma = dv.num("gamma_max", 12.0);
  std::string sp_out = dv.str("out", "");
  sp->add_option("--gamma-max", sp_gamma, "eigenvalue cutoff");
  sp->add_option("--out", sp_out, "CSV path (default stdout)");

  // stability
  app.add_subcommand("stability", "certify the spectral gap and the degree-one space");

  // model
  auto* mo = app.add_subcommand("model", "sample a smoothing model (or the cone) to JSONL");
  std::string mo_id = dv.str("id", "L1");
  double mo_R = dv.num("R", 8.0);
  int mo_n = dv.integer("n", 48);
  double mo_scale = dv.num("scale", 1.0);
  std::string mo_b = dv.str("b", "0,0,0,0,0,0");
  std::string mo_out = dv.str("out", "");
  mo->add_option("--id", mo_id, "C, L1, L2 or L3");
  mo->add_option("--R", mo_R, "plane-coordinate bound (cone: outer radius)");
  mo->add_option("--n", mo_n, "grid nodes per parameter");
  mo->add_option("--scale", mo_scale, "scale s of s L + b");
  mo->add_option("--b", mo_b, "translation, 6 comma-separated");
  mo->add_option("--out", mo_out, "JSONL path (default stdout)");

  // fiber
  auto* fi = app.add_subcommand("fiber", "sample a smooth fibration fiber to JSONL");
  std::string fi_c = dv.str("c", "1,1,1");
  double fi_t = dv.num("t_range", 8.0);
  int fi_n = dv.integer("n", 32);
  std::string fi_out = dv.str("out", "");
  fi->add_option("--c", fi_c, "fiber label mu2,mu3,imf");
  fi->add_option("--t-range", fi_t, "sample t in [-T, T]");
  fi->add_option("--n", fi_n, "grid nodes per parameter");
  fi->add_option("--out", fi_out, "JSONL path (default stdout)");

  // energy
  auto* en = app.add_subcommand("energy", "mass/energy functionals of a varifold");
  std::string en_input = dv.str("input", "");
  std::string en_target = dv.str("target", "");
  double en_sigma = dv.num("sigma", 1.0), en_rho = dv.num("rho", 8.0);
  int en_nr = dv.integer("n_r", 200), en_nt = dv.integer("n_theta", 48),
      en_np = dv.integer("n_phi", 48);
  std::string en_table = dv.str("table", "");
  std::string en_radii = dv.str("radii", "");
  en->add_option("--input", en_input, "JSONL varifold");
  en->add_option("--target", en_target, "generate C/L1/L2/L3 instead of reading");
  en->add_option("--sigma", en_sigma, "annulus inner radius");
  en->add_option("--rho", en_rho, "annulus outer radius");
  en->add_option("--n-r", en_nr);
  en->add_option("--n-theta", en_nt);
  en->add_option("--n-phi", en_np);
  en->add_option("--table", en_table, "write a density CSV here");
  en->add_option("--radii", en_radii, "CSV table radii, comma-separated");

  // monotonicity
  auto* mn = app.add_subcommand("monotonicity", "density-ratio identity residual");
  std::string mn_target = dv.str("target", "L1");
  double mn_sigma = dv.num("sigma", 0.5), mn_rho = dv.num("rho", 8.0);
  int mn_nr = dv.integer("n_r", 400), mn_nt = dv.integer("n_theta", 64),
      mn_np = dv.integer("n_phi", 64);
  double mn_tol = dv.num("tol", 1e-3);
  mn->add_option("--target", mn_target, "C, L1, L2 or L3");
  mn->add_option("--sigma", mn_sigma);
  mn->add_option("--rho", mn_rho);
  mn->add_option("--n-r", mn_nr);
  mn->add_option("--n-theta", mn_nt);
  mn->add_option("--n-phi", mn_np);
  mn->add_option("--tol", mn_tol, "pass bound, relative to the cone density");

  // decay
  auto* de = app.add_subcommand("decay", "graph a target over the cone and fit decay");
  std::string de_target = dv.str("target", "L1");
  double de_scale = dv.num("scale", 1.0);
  std::string de_b = dv.str("b", "0,0,0,0,0,0");
  std::string de_ann = dv.str("annulus", "4,16");
  int de_nr = dv.integer("n_r", 16), de_nl = dv.integer("n_link", 32);
  std::string de_out = dv.str("out", "");
  de->add_option("--target", de_target, "C, L1, L2 or L3");
  de->add_option("--scale", de_scale);
  de->add_option("--b", de_b);
  de->add_option("--annulus", de_ann, "inner,outer radii");
  de->add_option("--n-r", de_nr);
  de->add_option("--n-link", de_nl);
  de->add_option("--out", de_out, "CSV path (default stdout)");

  // recenter
  auto* rc = app.add_subcommand("recenter", "estimate the translation of a target");
  std::string rc_target = dv.str("target", "C");
  double rc_scale = dv.num("scale", 1.0);
  std::string rc_b = dv.str("b", "0,0,0,0,0,0");
  std::string rc_input = dv.str("input", "");
  std::string rc_ann = dv.str("annulus", "4,16");
  int rc_nr = dv.integer("n_r", 12), rc_nl = dv.integer("n_link", 24);
  rc->add_option("--target", rc_target);
  rc->add_option("--scale", rc_scale);
  rc->add_option("--b", rc_b, "translation injected into the generated target");
  rc->add_option("--input", rc_input, "JSONL varifold instead of a chart target");
  rc->add_option("--annulus", rc_ann);
  rc->add_option("--n-r", rc_nr);
  rc->add_option("--n-link", rc_nl);

  // bubble-scan
  auto* bs = app.add_subcommand("bubble-scan", "scale detection + extraction + classification");
  std::string bs_input = dv.str("input", "");
  std::string bs_target = dv.str("target", "");
  double bs_t = dv.num("t", 0.05);
  std::string bs_b = dv.str("b", "0,0,0,0,0,0");
  double bs_rho = dv.num("rho", 0.5);
  std::string bs_eps = dv.str("eps", "auto");
  int bs_nr = dv.integer("n_r", 180), bs_nt = dv.integer("n_theta", 40),
      bs_np = dv.integer("n_phi", 40);
  std::string bs_out = dv.str("out", "");
  bs->add_option("--input", bs_input, "JSONL varifold");
  bs->add_option("--target", bs_target, "generate t*model instead of reading");
  bs->add_option("--t", bs_t, "model scale for --target");
  bs->add_option("--b", bs_b, "translation for --target");
  bs->add_option("--rho", bs_rho, "outer radius of the scan");
  bs->add_option("--eps", bs_eps, "energy threshold, or 'auto' (cone B1 mass / 10)");
  bs->add_option("--n-r", bs_nr);
  bs->add_option("--n-theta", bs_nt);
  bs->add_option("--n-phi", bs_np);
  bs->add_option("--out", bs_out, "JSON report path (default stdout)");

  // classify
  auto* cl = app.add_subcommand("classify", "match a varifold against s L + b");
  std::string cl_input = dv.str("input", "");
  std::string cl_out = dv.str("out", "");
  cl->add_option("--input", cl_input, "JSONL varifold")->required();
  cl->add_option("--out", cl_out, "JSON report path (default stdout)");

  // selfcheck
  auto* sc = app.add_subcommand("selfcheck", "run the invariant battery");
  std::uint64_t sc_seed = static_cast<std::uint64_t>(dv.num("seed", 1234));
  sc->add_option("--seed", sc_seed, "seed for the randomized checks");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << "\n";
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  json echo;  // effective config, echoed into outputs

  try {
    if (sp->parsed()) {
      echo = {{"command", "spectrum"}, {"gamma_max", sp_gamma}};
      return cmd_spectrum(sp_gamma, sp_out, echo.dump());
    }
    if (app.get_subcommand("stability")->parsed()) return cmd_stability();

    if (mo->parsed()) {
      echo = {{"command", "model"}, {"id", mo_id}, {"R", mo_R},
              {"n", mo_n},          {"scale", mo_scale}, {"b", mo_b}};
      const ModelId id = model_from_name(mo_id);
      DiscreteVarifold v = id == ModelId::Cone
                               ? sample_cone(1e-3 * mo_R, mo_R, mo_n, mo_n)
                               : sample_model(id, mo_R, mo_n);
      if (mo_scale != 1.0) v = rescale(v, mo_scale);
      const Vec6 b = parse_vec6(mo_b);
      if (b.norm() > 0.0) v = translate(v, b);
      std::ofstream file;
      write_jsonl(open_or_stdout(file, mo_out), v, echo.dump());
      return kExitOk;
    }

    if (fi->parsed()) {
      echo = {{"command", "fiber"}, {"c", fi_c}, {"t_range", fi_t}, {"n", fi_n}};
      const Eigen::Vector3d c = parse_vec3(fi_c);
      if (in_Y(c)) {
        std::cerr << "error: singular fiber; use `model` for the cone or L1-L3\n";
        return kExitPrecondition;
      }
      const DiscreteVarifold v = sample_fiber(c, -fi_t, fi_t, 2 * fi_n, fi_n);
      std::ofstream file;
      write_jsonl(open_or_stdout(file, fi_out), v, echo.dump());
      return kExitOk;
    }

    if (en->parsed()) {
      echo = {{"command", "energy"},  {"input", en_input},  {"target", en_target},
              {"sigma", en_sigma},    {"rho", en_rho},      {"n_r", en_nr},
              {"n_theta", en_nt},     {"n_phi", en_np}};
      DiscreteVarifold v =
          !en_input.empty()
              ? read_jsonl_file(en_input)
              : generate_target(en_target.empty() ? "L1" : en_target, 1.0, Vec6::Zero(),
                                en_sigma, en_rho, en_nr, en_nt, en_np);
      const double mass = total_mass(v);
      const double e = energy(v);
      std::cout << "samples: " << v.size() << "\n";
      std::cout << "mass: " << fmt_g17(mass) << "\n";
      std::cout << "energy: " << fmt_g17(e) << "\n";
      if (!en_table.empty()) {
        std::vector<double> radii;
        if (en_radii.empty()) {
          for (double r = en_rho / 8; r <= en_rho * 1.0001; r *= 2) radii.push_back(r);
        } else {
          std::stringstream ss(en_radii);
          std::string tok;
          while (std::getline(ss, tok, ',')) radii.push_back(std::stod(tok));
        }
        std::ofstream file(en_table);
        if (!file) throw std::runtime_error("cannot open " + en_table);
        write_density_table(file, v, Vec::Zero(6), radii, echo.dump());
      }
      return kExitOk;
    }

    if (mn->parsed()) {
      echo = {{"command", "monotonicity"}, {"target", mn_target}, {"sigma", mn_sigma},
              {"rho", mn_rho},             {"n_r", mn_nr},        {"n_theta", mn_nt},
              {"n_phi", mn_np},            {"tol", mn_tol}};
      const DiscreteVarifold v = generate_target(mn_target, 1.0, Vec6::Zero(), mn_sigma,
                                                 mn_rho, mn_nr, mn_nt, mn_np);
      const double res = monotonicity_residual(v, mn_sigma, mn_rho);
      const double scale = link_area() / 3.0;
      std::cout << "monotonicity residual: " << fmt_g17(res) << " (density scale "
                << fmt_g17(scale) << ", relative " << fmt_g17(res / scale) << ")\n";
      return std::abs(res) < mn_tol * scale ? kExitOk : kExitPrecondition;
    }

    if (de->parsed()) {
      echo = {{"command", "decay"}, {"target", de_target}, {"scale", de_scale},
              {"b", de_b},          {"annulus", de_ann},   {"n_r", de_nr},
              {"n_link", de_nl}};
      const auto comma = de_ann.find(',');
      if (comma == std::string::npos)
        throw std::invalid_argument("--annulus wants inner,outer");
      const double a1 = std::stod(de_ann.substr(0, comma));
      const double a2 = std::stod(de_ann.substr(comma + 1));
      const GraphTarget target =
          model_target(model_from_name(de_target), de_scale, parse_vec6(de_b));
      const NormalGraphField f = graph_over_cone(target, a1, a2, de_nr, de_nl, de_nl);
      const AsymptoticReport rep = decay_report(f);
      std::ofstream file;
      std::ostream& os = open_or_stdout(file, de_out);
      os << "# config: " << echo.dump() << "\n";
      os << "n1,n2,parity,component,exponent[radial power],snapped,on_grid,"
         << "amplitude[length],fit_residual[log]\n";
      for (const ModeDecay& md : rep.modes)
        os << md.n1 << ',' << md.n2 << ',' << (md.sine ? "sin" : "cos") << ','
           << md.component << ',' << fmt_g17(md.exponent) << ',' << fmt_g17(md.snapped)
           << ',' << (md.on_grid ? 1 : 0) << ',' << fmt_g17(md.amplitude) << ','
           << fmt_g17(md.fit_residual) << "\n";
      std::cout << "leading exponent: " << fmt_g17(rep.leading_exponent) << "\n";
      std::cout << "lambda=1 block: ";
      for (int k = 0; k < 6; ++k)
        std::cout << fmt_g17(rep.lambda_one_block[k]) << (k < 5 ? "," : "\n");
      return kExitOk;
    }

    if (rc->parsed()) {
      const auto comma = rc_ann.find(',');
      if (comma == std::string::npos)
        throw std::invalid_argument("--annulus wants inner,outer");
      const double a1 = std::stod(rc_ann.substr(0, comma));
      const double a2 = std::stod(rc_ann.substr(comma + 1));
      RecenterResult res;
      if (!rc_input.empty()) {
        res = recenter(read_jsonl_file(rc_input), a1, a2, rc_nr, rc_nl, rc_nl);
      } else {
        const GraphTarget target =
            model_target(model_from_name(rc_target), rc_scale, parse_vec6(rc_b));
        res = recenter(target, a1, a2, rc_nr, rc_nl, rc_nl);
      }
      std::cout << "b_hat: ";
      for (int k = 0; k < 6; ++k)
        std::cout << fmt_g17(res.b_hat[k]) << (k < 5 ? "," : "\n");
      std::cout << "passes: " << res.passes
                << (res.already_centered ? " (already centered)" : "") << "\n";
      return kExitOk;
    }

    if (bs->parsed()) {
      const double eps =
          bs_eps == "auto" ? link_area() / 30.0 : std::stod(bs_eps);  // B1 mass / 10
      echo = {{"command", "bubble-scan"}, {"input", bs_input}, {"target", bs_target},
              {"t", bs_t},                {"rho", bs_rho},     {"eps", eps},
              {"n_r", bs_nr},             {"n_theta", bs_nt},  {"n_phi", bs_np}};
      DiscreteVarifold v =
          !bs_input.empty()
              ? read_jsonl_file(bs_input)
              : generate_target(bs_target.empty() ? "L1" : bs_target, bs_t,
                                parse_vec6(bs_b), bs_t, bs_rho, bs_nr, bs_nt, bs_np);
      const BubbleScan scan = run_bubble_scan(v, bs_rho, eps);
      json rep;
      rep["config"] = echo;
      rep["found"] = scan.found;
      if (scan.found) {
        rep["y_star"] = std::vector<double>(scan.center.data(), scan.center.data() + 6);
        rep["delta_star"] = scan.delta;
        rep["plateau_count"] = scan.plateau_count;
        rep["classified"] = scan.classification.ok;
        if (scan.classification.ok) {
          rep["model"] = model_name(scan.classification.fit.model);
          rep["s"] = scan.classification.fit.scale;
          rep["b"] = std::vector<double>(scan.classification.fit.translation.data(),
                                         scan.classification.fit.translation.data() + 6);
          rep["residual"] = scan.classification.fit.residual;
        } else {
          rep["failure"] = scan.classification.failure;
        }
      }
      std::ofstream file;
      open_or_stdout(file, bs_out) << rep.dump(2) << "\n";
      if (!scan.found) return kExitOk;  // "no bubble" is a valid outcome
      return scan.classification.ok ? kExitOk : kExitClassification;
    }

    if (cl->parsed()) {
      echo = {{"command", "classify"}, {"input", cl_input}};
      const DiscreteVarifold w = read_jsonl_file(cl_input);
      const ClassifyOutcome out = classify_bubble(w);
      json rep;
      rep["config"] = echo;
      rep["classified"] = out.ok;
      rep["fiber_label"] =
          std::vector<double>(out.fiber_label.data(), out.fiber_label.data() + 3);
      rep["label_spread"] = out.label_spread;
      if (out.ok) {
        rep["model"] = model_name(out.fit.model);
        rep["s"] = out.fit.scale;
        rep["b"] = std::vector<double>(out.fit.translation.data(),
                                       out.fit.translation.data() + 6);
        rep["residual"] = out.fit.residual;
      } else {
        rep["failure"] = out.failure;
      }
      std::ofstream file;
      open_or_stdout(file, cl_out) << rep.dump(2) << "\n";
      return out.ok ? kExitOk : kExitClassification;
    }

    if (sc->parsed()) return cli_selfcheck(sc_seed);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  }
  std::cerr << app.help() << "\n";
  return kExitUsage;
}

int cli_run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_run(args);
}

}  // namespace slcone
