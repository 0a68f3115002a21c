#pragma once

// Experiment configuration: flat "section.key = value" text.
//
// Serialization is canonical (sorted keys, %.17g numbers), so
// parse(serialize(c)) == c and the hash of the canonical text identifies a run.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cauchyfm/errors.hpp"
#include "cauchyfm/geometry.hpp"
#include "cauchyfm/shape_newton.hpp"

namespace cauchyfm {

struct ArcValue {
  long first{0};
  long last{0};
  double value{1.0};
  bool operator==(const ArcValue&) const = default;
};

struct BoundaryValueSpec {
  enum class Kind { Arcs, Cos, Sin, File };
  Kind kind{Kind::Arcs};
  std::vector<ArcValue> arcs;
  int mode{1};
  std::string path;
  bool operator==(const BoundaryValueSpec&) const = default;
};

// Conductivity estimate source for locate and newton.
struct GammaSource {
  bool from_file{true};  // read gamma_hat.csv in the output directory
  double value{1.0};
  bool operator==(const GammaSource&) const = default;
};

struct ExperimentConfig {
  // geometry
  Vec2 outer_center{};
  double outer_radius{5.0};
  std::size_t n_outer{32};
  std::string obstacle_kind{"polygon"};  // polygon | curve
  std::vector<Vec2> corners{{0.25, -0.75}, {1.5, -0.5}, {1.5, 0.5}, {0.5, 0.5}};
  Vec2 curve_offset{};
  std::vector<FourierMode> curve_modes;
  std::size_t n_obstacle{128};
  double grading_p{3.0};

  // data
  double gamma{1.0};
  double noise{0.0};
  std::uint64_t seed{1};
  std::size_t refine{2};
  BoundaryValueSpec f{BoundaryValueSpec::Kind::Arcs, {{0, 31, 1.0}}, 1, {}};

  // gamma_scan
  Vec2 omega_center{};
  double omega_radius{3.0};
  double tau_step{0.05};
  std::size_t tau_count{41};
  double cutoff{0.0};  // 0 selects the noise-dependent default
  std::size_t sampler_n{64};

  // locate
  GammaSource locate_gamma;
  Vec2 approach1_center{};
  int approach1_first{5};
  int approach1_last{30};
  std::vector<double> grid_radii{1.0, 0.5, 0.25, 0.125};

  // newton
  GammaSource newton_gamma;
  std::vector<Vec2> newton_initial{{0.3, -0.7}, {1.7, -0.7}, {1.7, 0.7}, {0.3, 0.7}};
  double alpha{1e-3};
  double alpha0{1e-4};
  std::size_t iterations{20};
  double step_tol{1e-6};
  std::size_t newton_n_obstacle{512};
  double newton_grading_p{5.0};
  JacobianForm jacobian_form{JacobianForm::Reciprocity};

  unsigned threads{1};

  Obstacle obstacle() const {
    if (obstacle_kind == "polygon") return PolygonBoundary(corners);
    return SmoothCurve(curve_offset, curve_modes);
  }

  NewtonParams newton_params(double gamma_hat) const {
    NewtonParams p;
    p.outer_center = outer_center;
    p.outer_radius = outer_radius;
    p.n_outer = n_outer;
    p.n_obstacle = newton_n_obstacle;
    p.grading_p = newton_grading_p;
    p.alpha = alpha;
    p.alpha0 = alpha0;
    p.max_iters = iterations;
    p.step_tol = step_tol;
    p.gamma_hat = gamma_hat;
    p.jacobian_form = jacobian_form;
    return p;
  }

  std::vector<double> taus() const {
    std::vector<double> t(tau_count);
    for (std::size_t l = 0; l < tau_count; ++l) t[l] = static_cast<double>(l) * tau_step;
    return t;
  }

};

// ---------------------------------------------------------------------------
// Value formatting and parsing.

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double to_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a finite number, got '" + s + "'");
  }
}

inline long to_long(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + s + "'");
  }
}

inline std::size_t to_count(const std::string& key, const std::string& s) {
  const long v = to_long(key, s);
  if (v < 0) throw ConfigError(key + ": must be nonnegative");
  return static_cast<std::size_t>(v);
}

inline Vec2 to_point(const std::string& key, const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw ConfigError(key + ": expected 'x,y', got '" + s + "'");
  return {to_double(key, parts[0]), to_double(key, parts[1])};
}

inline std::string fmt(Vec2 p) { return fmt(p.x) + "," + fmt(p.y); }

inline std::vector<Vec2> to_points(const std::string& key, const std::string& s) {
  std::vector<Vec2> out;
  for (const auto& item : split(s, ';')) {
    if (!item.empty()) out.push_back(to_point(key, item));
  }
  return out;
}

inline std::string fmt(const std::vector<Vec2>& pts) {
  std::string s;
  for (std::size_t i = 0; i < pts.size(); ++i) s += (i ? "; " : "") + fmt(pts[i]);
  return s;
}

inline std::vector<double> to_doubles(const std::string& key, const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(to_double(key, item));
  return out;
}

inline std::string fmt(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

// "k:cx,sx,cy,sy; ..."
inline std::vector<FourierMode> to_modes(const std::string& key, const std::string& s) {
  std::vector<FourierMode> out;
  for (const auto& item : split(s, ';')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError(key + ": expected 'k:cx,sx,cy,sy'");
    const auto c = to_doubles(key, item.substr(colon + 1));
    if (c.size() != 4) throw ConfigError(key + ": each mode needs four coefficients");
    const long k = to_long(key, trim(item.substr(0, colon)));
    if (k < 1) throw ConfigError(key + ": mode index must be >= 1");
    out.push_back({static_cast<int>(k), c[0], c[1], c[2], c[3]});
  }
  return out;
}

inline std::string fmt(const std::vector<FourierMode>& modes) {
  std::string s;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& m = modes[i];
    s += (i ? "; " : "") + std::to_string(m.k) + ":" + fmt(std::vector<double>{m.cos_x, m.sin_x, m.cos_y, m.sin_y});
  }
  return s;
}

// "arcs 0..31:1, 40..47:2" | "cos 3" | "sin 1" | "file PATH"
inline BoundaryValueSpec to_boundary_value(const std::string& key, const std::string& s) {
  const auto sp = s.find(' ');
  const std::string kind = s.substr(0, sp);
  const std::string rest = sp == std::string::npos ? "" : trim(s.substr(sp + 1));
  BoundaryValueSpec b;
  if (kind == "cos" || kind == "sin") {
    b.kind = kind == "cos" ? BoundaryValueSpec::Kind::Cos : BoundaryValueSpec::Kind::Sin;
    b.mode = static_cast<int>(to_long(key, rest));
    if (b.mode < 0) throw ConfigError(key + ": mode must be >= 0");
    return b;
  }
  if (kind == "file") {
    if (rest.empty()) throw ConfigError(key + ": file path missing");
    b.kind = BoundaryValueSpec::Kind::File;
    b.path = rest;
    return b;
  }
  if (kind != "arcs") throw ConfigError(key + ": unknown boundary value kind '" + kind + "'");
  b.kind = BoundaryValueSpec::Kind::Arcs;
  for (const auto& item : split(rest, ',')) {
    if (item.empty()) continue;
    const auto dots = item.find("..");
    const auto colon = item.find(':');
    if (dots == std::string::npos || colon == std::string::npos || colon < dots) throw ConfigError(key + ": arc must read 'first..last:value'");
    ArcValue a{to_long(key, trim(item.substr(0, dots))), to_long(key, trim(item.substr(dots + 2, colon - dots - 2))),
               to_double(key, trim(item.substr(colon + 1)))};
    if (a.last < a.first) throw ConfigError(key + ": arc end precedes its start");
    b.arcs.push_back(a);
  }
  if (b.arcs.empty()) throw ConfigError(key + ": no arcs given");
  return b;
}

inline std::string fmt(const BoundaryValueSpec& b) {
  switch (b.kind) {
    case BoundaryValueSpec::Kind::Cos: return "cos " + std::to_string(b.mode);
    case BoundaryValueSpec::Kind::Sin: return "sin " + std::to_string(b.mode);
    case BoundaryValueSpec::Kind::File: return "file " + b.path;
    case BoundaryValueSpec::Kind::Arcs: break;
  }
  std::string s = "arcs ";
  for (std::size_t i = 0; i < b.arcs.size(); ++i) {
    s += (i ? ", " : "") + std::to_string(b.arcs[i].first) + ".." + std::to_string(b.arcs[i].last) + ":" + fmt(b.arcs[i].value);
  }
  return s;
}

inline GammaSource to_gamma_source(const std::string& key, const std::string& s) {
  if (s == "file") return {true, 1.0};
  const double v = to_double(key, s);
  if (!(v > 0.0)) throw ConfigError(key + ": conductivity must be positive");
  return {false, v};
}

inline std::string fmt(const GammaSource& g) { return g.from_file ? "file" : fmt(g.value); }

}  // namespace detail

// ---------------------------------------------------------------------------

using ConfigMap = std::map<std::string, std::string>;

inline ConfigMap to_map(const ExperimentConfig& c) {
  using detail::fmt;
  ConfigMap m;
  m["geometry.outer_center"] = fmt(c.outer_center);
  m["geometry.outer_radius"] = fmt(c.outer_radius);
  m["geometry.n_outer"] = std::to_string(c.n_outer);
  m["geometry.obstacle"] = c.obstacle_kind;
  m["geometry.corners"] = fmt(c.corners);
  m["geometry.curve_offset"] = fmt(c.curve_offset);
  m["geometry.curve_modes"] = fmt(c.curve_modes);
  m["geometry.n_obstacle"] = std::to_string(c.n_obstacle);
  m["geometry.grading_p"] = fmt(c.grading_p);
  m["data.gamma"] = fmt(c.gamma);
  m["data.noise"] = fmt(c.noise);
  m["data.seed"] = std::to_string(c.seed);
  m["data.refine"] = std::to_string(c.refine);
  m["data.f"] = fmt(c.f);
  m["gamma_scan.omega_center"] = fmt(c.omega_center);
  m["gamma_scan.omega_radius"] = fmt(c.omega_radius);
  m["gamma_scan.tau_step"] = fmt(c.tau_step);
  m["gamma_scan.tau_count"] = std::to_string(c.tau_count);
  m["gamma_scan.cutoff"] = fmt(c.cutoff);
  m["gamma_scan.sampler_n"] = std::to_string(c.sampler_n);
  m["locate.gamma_hat"] = fmt(c.locate_gamma);
  m["locate.approach1_center"] = fmt(c.approach1_center);
  m["locate.approach1_first"] = std::to_string(c.approach1_first);
  m["locate.approach1_last"] = std::to_string(c.approach1_last);
  m["locate.grid_radii"] = fmt(c.grid_radii);
  m["newton.gamma_hat"] = fmt(c.newton_gamma);
  m["newton.initial"] = fmt(c.newton_initial);
  m["newton.alpha"] = fmt(c.alpha);
  m["newton.alpha0"] = fmt(c.alpha0);
  m["newton.iterations"] = std::to_string(c.iterations);
  m["newton.step_tol"] = fmt(c.step_tol);
  m["newton.n_obstacle"] = std::to_string(c.newton_n_obstacle);
  m["newton.grading_p"] = fmt(c.newton_grading_p);
  m["newton.jacobian"] = to_string(c.jacobian_form);
  m["run.threads"] = std::to_string(c.threads);
  return m;
}

// Invariants that must hold before any computation starts.
inline void validate(const ExperimentConfig& c) {
  if (!(c.outer_radius > 0.0)) throw ConfigError("geometry.outer_radius must be positive");
  if (c.n_outer < 4) throw ConfigError("geometry.n_outer must be >= 4");
  if (c.obstacle_kind != "polygon" && c.obstacle_kind != "curve") throw ConfigError("geometry.obstacle must be 'polygon' or 'curve'");
  if (!(c.grading_p >= 2.0) || !(c.newton_grading_p >= 2.0)) throw ConfigError("grading exponents must be >= 2");
  if (c.refine < 1) throw ConfigError("data.refine must be >= 1");
  if (!(c.noise >= 0.0)) throw ConfigError("data.noise must be nonnegative");
  if (!(c.gamma > 0.0)) throw ConfigError("data.gamma must be positive");
  if (!(c.tau_step > 0.0) || c.tau_count < 1) throw ConfigError("gamma_scan: tau grid must be nonempty with positive step");
  if (!(c.omega_radius > 0.0)) throw ConfigError("gamma_scan.omega_radius must be positive");
  if (!(c.cutoff >= 0.0 && c.cutoff < 1.0)) throw ConfigError("gamma_scan.cutoff must lie in [0, 1)");
  if (c.sampler_n < 4) throw ConfigError("gamma_scan.sampler_n must be >= 4");
  if (c.approach1_first < 1 || c.approach1_last < c.approach1_first) throw ConfigError("locate: approach1 radius range is empty");
  for (double r : c.grid_radii) {
    if (!(r > 0.0)) throw ConfigError("locate.grid_radii must be positive");
  }
  if (!(c.alpha >= 0.0) || !(c.alpha0 > 0.0)) throw ConfigError("newton: alpha must be >= 0 and alpha0 > 0");
  if (c.threads < 1) throw ConfigError("run.threads must be >= 1");

  if (c.obstacle_kind == "curve" && c.curve_modes.empty()) throw ConfigError("geometry.curve_modes: a curve obstacle needs at least one mode");
  try {
    const Obstacle obs = c.obstacle();
    const double clearance = 1e-6 * c.outer_radius;
    for (const Vec2 q : obstacle_outline(obs, 512)) {
      if (norm(q - c.outer_center) >= c.outer_radius - clearance) throw ConfigError("geometry: obstacle reaches the outer boundary");
    }
    if (!c.newton_initial.empty() && c.newton_initial.size() >= 3) PolygonBoundary{c.newton_initial};
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("geometry: ") + e.what());
  }
  if (c.obstacle_kind == "polygon" && c.n_obstacle % c.corners.size() != 0) {
    throw ConfigError("geometry.n_obstacle = " + std::to_string(c.n_obstacle) + " is not divisible by the corner count " +
                      std::to_string(c.corners.size()));
  }
  if (c.newton_initial.size() >= 3 && c.newton_n_obstacle % c.newton_initial.size() != 0) {
    throw ConfigError("newton.n_obstacle = " + std::to_string(c.newton_n_obstacle) + " is not divisible by the corner count " +
                      std::to_string(c.newton_initial.size()));
  }
  if (!c.newton_initial.empty() && c.newton_initial.size() < 3) throw ConfigError("newton.initial needs at least three corners");
  if (norm(c.omega_center - c.outer_center) + c.omega_radius >= c.outer_radius) throw ConfigError("gamma_scan: Omega must lie inside B");
  if (c.f.kind == BoundaryValueSpec::Kind::Cos || c.f.kind == BoundaryValueSpec::Kind::Sin) {
    if (static_cast<std::size_t>(c.f.mode) > c.n_outer) throw ConfigError("data.f: mode exceeds the mesh resolution");
  }
}

inline ExperimentConfig from_map(const ConfigMap& m) {
  using namespace detail;
  ExperimentConfig c;
  const ConfigMap known = to_map(c);
  for (const auto& [k, v] : m) {
    if (!known.count(k)) throw ConfigError("unknown configuration key '" + k + "'");
  }
  auto get = [&](const char* k) -> std::optional<std::string> {
    auto it = m.find(k);
    if (it == m.end()) return std::nullopt;
    return it->second;
  };
  if (auto v = get("geometry.outer_center")) c.outer_center = to_point("geometry.outer_center", *v);
  if (auto v = get("geometry.outer_radius")) c.outer_radius = to_double("geometry.outer_radius", *v);
  if (auto v = get("geometry.n_outer")) c.n_outer = to_count("geometry.n_outer", *v);
  if (auto v = get("geometry.obstacle")) c.obstacle_kind = *v;
  if (auto v = get("geometry.corners")) c.corners = to_points("geometry.corners", *v);
  if (auto v = get("geometry.curve_offset")) c.curve_offset = to_point("geometry.curve_offset", *v);
  if (auto v = get("geometry.curve_modes")) c.curve_modes = to_modes("geometry.curve_modes", *v);
  if (auto v = get("geometry.n_obstacle")) c.n_obstacle = to_count("geometry.n_obstacle", *v);
  if (auto v = get("geometry.grading_p")) c.grading_p = to_double("geometry.grading_p", *v);
  if (auto v = get("data.gamma")) c.gamma = to_double("data.gamma", *v);
  if (auto v = get("data.noise")) c.noise = to_double("data.noise", *v);
  if (auto v = get("data.seed")) c.seed = static_cast<std::uint64_t>(to_count("data.seed", *v));
  if (auto v = get("data.refine")) c.refine = to_count("data.refine", *v);
  if (auto v = get("data.f")) c.f = to_boundary_value("data.f", *v);
  if (auto v = get("gamma_scan.omega_center")) c.omega_center = to_point("gamma_scan.omega_center", *v);
  if (auto v = get("gamma_scan.omega_radius")) c.omega_radius = to_double("gamma_scan.omega_radius", *v);
  if (auto v = get("gamma_scan.tau_step")) c.tau_step = to_double("gamma_scan.tau_step", *v);
  if (auto v = get("gamma_scan.tau_count")) c.tau_count = to_count("gamma_scan.tau_count", *v);
  if (auto v = get("gamma_scan.cutoff")) c.cutoff = to_double("gamma_scan.cutoff", *v);
  if (auto v = get("gamma_scan.sampler_n")) c.sampler_n = to_count("gamma_scan.sampler_n", *v);
  if (auto v = get("locate.gamma_hat")) c.locate_gamma = to_gamma_source("locate.gamma_hat", *v);
  if (auto v = get("locate.approach1_center")) c.approach1_center = to_point("locate.approach1_center", *v);
  if (auto v = get("locate.approach1_first")) c.approach1_first = static_cast<int>(to_long("locate.approach1_first", *v));
  if (auto v = get("locate.approach1_last")) c.approach1_last = static_cast<int>(to_long("locate.approach1_last", *v));
  if (auto v = get("locate.grid_radii")) c.grid_radii = to_doubles("locate.grid_radii", *v);
  if (auto v = get("newton.gamma_hat")) c.newton_gamma = to_gamma_source("newton.gamma_hat", *v);
  if (auto v = get("newton.initial")) c.newton_initial = to_points("newton.initial", *v);
  if (auto v = get("newton.alpha")) c.alpha = to_double("newton.alpha", *v);
  if (auto v = get("newton.alpha0")) c.alpha0 = to_double("newton.alpha0", *v);
  if (auto v = get("newton.iterations")) c.iterations = to_count("newton.iterations", *v);
  if (auto v = get("newton.step_tol")) c.step_tol = to_double("newton.step_tol", *v);
  if (auto v = get("newton.n_obstacle")) c.newton_n_obstacle = to_count("newton.n_obstacle", *v);
  if (auto v = get("newton.grading_p")) c.newton_grading_p = to_double("newton.grading_p", *v);
  if (auto v = get("newton.jacobian")) {
    if (*v == "reciprocity") c.jacobian_form = JacobianForm::Reciprocity;
    else if (*v == "collocation") c.jacobian_form = JacobianForm::Collocation;
    else throw ConfigError("newton.jacobian must be 'reciprocity' or 'collocation'");
  }
  if (auto v = get("run.threads")) c.threads = static_cast<unsigned>(to_count("run.threads", *v));
  validate(c);
  return c;
}

// Lines "key = value"; '#' starts a comment; blank lines ignored.
inline ConfigMap parse_config_text(const std::string& text) {
  ConfigMap m;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    if (m.count(key)) throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    m[key] = detail::trim(line.substr(eq + 1));
  }
  return m;
}

inline ExperimentConfig parse_config(const std::string& text) { return from_map(parse_config_text(text)); }

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline std::string serialize(const ExperimentConfig& c) {
  std::string out;
  for (const auto& [k, v] : to_map(c)) out += k + " = " + v + "\n";
  return out;
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string config_hash(const ExperimentConfig& c) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(serialize(c))));
  return buf;
}

}  // namespace cauchyfm
