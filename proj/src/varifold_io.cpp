#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "slcone/io_util.hpp"
#include "slcone/varifold.hpp"

namespace slcone {

namespace {

const auto& fmt = fmt_g17;

}  // namespace

void write_jsonl(std::ostream& os, const DiscreteVarifold& v, const std::string& meta_json) {
  if (!meta_json.empty()) os << "{\"_meta\":" << meta_json << "}\n";
  const int m = v.dim();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    os << "{\"y\":[";
    for (int k = 0; k < v.ambient_dim(); ++k) {
      if (k) os << ',';
      os << fmt(v.point(i)[k]);
    }
    os << "],\"frame\":[";
    for (int j = 0; j < m; ++j) {
      if (j) os << ',';
      os << '[';
      for (int k = 0; k < v.ambient_dim(); ++k) {
        if (k) os << ',';
        os << fmt(v.frame(i)(k, j));
      }
      os << ']';
    }
    os << "],\"w\":" << fmt(v.weight(i)) << "}\n";
  }
}

void write_jsonl_file(const std::string& path, const DiscreteVarifold& v,
                      const std::string& meta_json) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_jsonl_file: cannot open " + path);
  write_jsonl(os, v, meta_json);
}

DiscreteVarifold read_jsonl(std::istream& is) {
  std::string line;
  DiscreteVarifold v;
  bool initialized = false;
  Eigen::Index lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    if (j.contains("_meta")) continue;
    if (!j.contains("y") || !j.contains("frame") || !j.contains("w"))
      throw std::invalid_argument("read_jsonl: line " + std::to_string(lineno) +
                                  ": sample needs y, frame, w");
    const auto& jy = j["y"];
    const auto& jf = j["frame"];
    const int n = static_cast<int>(jy.size());
    const int m = static_cast<int>(jf.size());
    if (!initialized) {
      v = DiscreteVarifold(n, m, "jsonl");
      initialized = true;
    }
    if (n != v.ambient_dim() || m != v.dim())
      throw std::invalid_argument("read_jsonl: inconsistent dimensions at line " +
                                  std::to_string(lineno));
    Vec y(n);
    for (int k = 0; k < n; ++k) y[k] = jy[k].get<double>();
    Mat frame(n, m);
    for (int c = 0; c < m; ++c) {
      if (static_cast<int>(jf[c].size()) != n)
        throw std::invalid_argument("read_jsonl: frame vector length mismatch at line " +
                                    std::to_string(lineno));
      for (int k = 0; k < n; ++k) frame(k, c) = jf[c][k].get<double>();
    }
    const double w = j["w"].get<double>();
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("read_jsonl: nonpositive weight at line " +
                                  std::to_string(lineno));
    if (orthonormality_residual(frame) > 1e-8)
      throw std::invalid_argument("read_jsonl: frame not orthonormal at line " +
                                  std::to_string(lineno));
    v.add_sample(y, frame, w);
  }
  if (!initialized) throw std::invalid_argument("read_jsonl: no samples");
  v.validate();
  return v;
}

DiscreteVarifold read_jsonl_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_jsonl_file: cannot open " + path);
  return read_jsonl(is);
}

void write_density_table(std::ostream& os, const DiscreteVarifold& v, const Vec& center,
                         std::span<const double> radii, const std::string& config_echo) {
  if (!config_echo.empty()) os << "# config: " << config_echo << "\n";
  os << "rho[length],mass[length^" << v.dim() << "],density_ratio[dimensionless],"
     << "annulus_energy[dimensionless]\n";
  double prev = 0.0;
  for (double rho : radii) {
    const double mass = mass_in_ball(v, center, rho);
    const double dens = mass / std::pow(rho, v.dim());
    double ann = 0.0;
    if (prev > 0.0) {
      const DiscreteVarifold a = restrict_annulus(v, prev, rho, center);
      if (a.size() > 0) {
        const DiscreteVarifold shifted = translate(a, -center);
        ann = energy(shifted);
      }
    }
    os << fmt(rho) << ',' << fmt(mass) << ',' << fmt(dens) << ',' << fmt(ann) << "\n";
    prev = rho;
  }
}

}  // namespace slcone
