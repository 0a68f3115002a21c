#pragma once

// CSV emission and loading. Every file starts with '#' metadata lines naming
// the record kind, units and the generating config hash, then one header row.
// Floats are written with %.17g so a read-back reproduces the bits.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cauchyfm/config.hpp"
#include "cauchyfm/errors.hpp"
#include "cauchyfm/forward_solver.hpp"
#include "cauchyfm/shape_newton.hpp"
#include "cauchyfm/spectral_inversion.hpp"

namespace cauchyfm {

using detail::fmt;

inline std::string csv_row(std::initializer_list<std::string> cells) {
  std::string s;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) s += ',';
    s += c;
    first = false;
  }
  return s + "\n";
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Cauchy pairs.

inline std::string cauchy_pair_csv(const CauchyPair& d, const std::string& hash) {
  std::string s = "# record=cauchy_pair units=outer-disk lengths, angles in radians\n";
  s += "# R=" + fmt(d.outer_radius) + " n_half=" + std::to_string(d.n_half) +
       " gamma=" + (d.gamma_true ? fmt(*d.gamma_true) : std::string("unknown")) + " delta=" + fmt(d.noise_ratio) +
       " seed=" + std::to_string(d.rng_seed) + " refine=" + std::to_string(d.refine) +
       " mesh=" + (d.refine > 1 ? "anti-inverse-crime" : "same-mesh-debug") + " config_hash=" + hash + "\n";
  s += "node_index,t,f,g\n";
  for (Eigen::Index j = 0; j < d.t.size(); ++j) {
    s += csv_row({std::to_string(j), fmt(d.t(j)), fmt(d.dirichlet(j)), fmt(d.neumann(j))});
  }
  return s;
}

namespace detail {

inline std::map<std::string, std::string> header_fields(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line) && !line.empty() && line[0] == '#') {
    std::istringstream ls(line.substr(1));
    std::string tok;
    while (ls >> tok) {
      if (auto eq = tok.find('='); eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }
  return kv;
}

inline std::vector<std::vector<std::string>> data_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    rows.push_back(split(line, ','));
  }
  return rows;
}

}  // namespace detail

inline CauchyPair parse_cauchy_pair(const std::string& text) {
  const auto kv = detail::header_fields(text);
  if (!kv.count("R") || !kv.count("n_half")) throw ConfigError("Cauchy data: header lacks R or n_half");
  CauchyPair d;
  d.outer_radius = detail::to_double("R", kv.at("R"));
  d.n_half = detail::to_count("n_half", kv.at("n_half"));
  if (kv.count("gamma") && kv.at("gamma") != "unknown") d.gamma_true = detail::to_double("gamma", kv.at("gamma"));
  if (kv.count("delta")) d.noise_ratio = detail::to_double("delta", kv.at("delta"));
  if (kv.count("seed")) d.rng_seed = static_cast<std::uint64_t>(detail::to_count("seed", kv.at("seed")));
  if (kv.count("refine")) d.refine = detail::to_count("refine", kv.at("refine"));
  const auto rows = detail::data_rows(text);
  const auto n = static_cast<Eigen::Index>(2 * d.n_half);
  if (static_cast<Eigen::Index>(rows.size()) != n) throw ConfigError("Cauchy data: expected " + std::to_string(n) + " rows");
  d.t.resize(n);
  d.dirichlet.resize(n);
  d.neumann.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& r = rows[static_cast<std::size_t>(j)];
    if (r.size() != 4) throw ConfigError("Cauchy data: row " + std::to_string(j) + " must have 4 columns");
    if (detail::to_long("node_index", r[0]) != j) throw ConfigError("Cauchy data: rows out of order");
    d.t(j) = detail::to_double("t", r[1]);
    d.dirichlet(j) = detail::to_double("f", r[2]);
    d.neumann(j) = detail::to_double("g", r[3]);
  }
  return d;
}

inline CauchyPair read_cauchy_pair(const std::string& path) { return parse_cauchy_pair(read_text(path)); }

// Nodal boundary values, one number per non-comment line.
inline Eigen::VectorXd read_nodal_values(const std::string& path, std::size_t count) {
  std::istringstream in(read_text(path));
  std::vector<double> v;
  std::string line;
  while (std::getline(in, line)) {
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    v.push_back(detail::to_double(path, line));
  }
  if (v.size() != count) throw ConfigError(path + ": expected " + std::to_string(count) + " nodal values");
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// ---------------------------------------------------------------------------
// Indicator fields.

inline std::string indicator_meta(const IndicatorField& f, const std::string& record, const std::string& hash) {
  return "# record=" + record + " cutoff_rel=" + fmt(f.cutoff_rel) + " kept_modes=" + std::to_string(f.kept_modes) +
         " n_outer=" + std::to_string(f.n_outer) + " n_sampler=" + std::to_string(f.n_sampler) + " config_hash=" + hash + "\n";
}

inline std::string log_or_cap(double v) { return v > 0.0 ? fmt(std::log(v)) : "-inf"; }

inline std::string point_field_csv(const IndicatorField& f, const std::string& hash) {
  std::string s = indicator_meta(f, "obstacle_indicator", hash);
  s += "# units=outer-disk lengths; I dimensionless\nx,y,I,log_I\n";
  for (std::size_t k = 0; k < f.points.size(); ++k) {
    s += csv_row({fmt(f.points[k].x), fmt(f.points[k].y), fmt(f.values[k]), log_or_cap(f.values[k])});
  }
  return s;
}

inline std::string gamma_scan_csv(const IndicatorField& f, const GammaEstimate& e, const std::string& hash) {
  std::string s = indicator_meta(f, "conductivity_scan", hash);
  s += "# gamma_hat=" + fmt(e.gamma_hat) + " peak_to_median=" + fmt(e.peak_to_median) +
       " low_confidence=" + (e.low_confidence ? "1" : "0") + "\n";
  s += "tau,I1,log_I1\n";
  for (std::size_t k = 0; k < f.taus.size(); ++k) s += csv_row({fmt(f.taus[k]), fmt(f.values[k]), log_or_cap(f.values[k])});
  return s;
}

inline std::string gamma_hat_csv(const GammaEstimate& e, const std::string& hash) {
  std::string s = "# record=gamma_estimate config_hash=" + hash + "\n";
  s += "gamma_hat,index,peak_to_median,low_confidence\n";
  s += csv_row({fmt(e.gamma_hat), std::to_string(e.index), fmt(e.peak_to_median), e.low_confidence ? "1" : "0"});
  return s;
}

inline double parse_gamma_hat(const std::string& text) {
  const auto rows = detail::data_rows(text);
  if (rows.size() != 1 || rows[0].empty()) throw ConfigError("gamma estimate file must hold exactly one row");
  const double g = detail::to_double("gamma_hat", rows[0][0]);
  if (!(g > 0.0)) throw ConfigError("gamma estimate must be positive");
  return g;
}

// V in [-1, 1] per row; see color_scalar.
inline std::string disk_field_csv(const IndicatorField& f, const std::string& record, const std::string& hash) {
  std::string s = indicator_meta(f, record, hash);
  s += "# units=outer-disk lengths; V = 2 (I2 - min) / (max - min) - 1\n";
  s += "center_x,center_y,radius,I2,log_I2,V\n";
  const auto v = color_scalar(f.values);
  for (std::size_t k = 0; k < f.disks.size(); ++k) {
    const auto& d = f.disks[k];
    s += csv_row({fmt(d.center.x), fmt(d.center.y), fmt(d.radius), fmt(f.values[k]), log_or_cap(f.values[k]), fmt(v[k])});
  }
  return s;
}

// ---------------------------------------------------------------------------
// Newton history.

inline std::string newton_history_csv(const NewtonState& st, const std::string& hash) {
  const auto& p = st.params;
  std::string s = "# record=newton_history alpha=" + fmt(p.alpha) + " alpha0=" + fmt(p.alpha0) +
                  " max_iters=" + std::to_string(p.max_iters) + " n_obstacle=" + std::to_string(p.n_obstacle) +
                  " grading_p=" + fmt(p.grading_p) + " jacobian=" + to_string(p.jacobian_form) +
                  " gamma_hat=" + fmt(p.gamma_hat) + " config_hash=" + hash + "\n";
  s += "# status=" + std::string(st.aborted ? "aborted" : (st.converged ? "converged" : "max_iters"));
  if (st.aborted) s += " reason=\"" + st.abort_reason + "\"";
  s += "\n# units=outer-disk lengths; V = 2 m / total - 1\n";
  s += "iteration,corner_index,x,y,residual,V\n";
  const double total = static_cast<double>(std::max<std::size_t>(p.max_iters, 1));
  for (const auto& r : st.history) {
    const double v = 2.0 * static_cast<double>(r.iteration) / total - 1.0;
    for (std::size_t l = 0; l < r.corners.size(); ++l) {
      s += csv_row({std::to_string(r.iteration), std::to_string(l), fmt(r.corners[l].x), fmt(r.corners[l].y), fmt(r.residual), fmt(v)});
    }
  }
  return s;
}

}  // namespace cauchyfm
