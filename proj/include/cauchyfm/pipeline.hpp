#pragma once

// The five command pipelines the CLI exposes, written against in-memory
// values so tests and the acceptance harness can drive them without files.

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cauchyfm/config.hpp"
#include "cauchyfm/errors.hpp"
#include "cauchyfm/forward_solver.hpp"
#include "cauchyfm/io.hpp"
#include "cauchyfm/oracles.hpp"
#include "cauchyfm/shape_newton.hpp"
#include "cauchyfm/spectral_inversion.hpp"

namespace cauchyfm {

inline UniformMesh outer_mesh(const ExperimentConfig& c) {
  return build_uniform_mesh(circle_curve(c.outer_center, c.outer_radius), c.n_outer);
}

// f at the outer nodes of the reconstruction mesh.
inline Eigen::VectorXd boundary_values(const ExperimentConfig& c, const UniformMesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.size());
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  switch (c.f.kind) {
    case BoundaryValueSpec::Kind::Arcs:
      for (const auto& a : c.f.arcs) {
        for (long j = a.first; j <= a.last; ++j) f(((j % n) + n) % n) = a.value;
      }
      break;
    case BoundaryValueSpec::Kind::Cos:
    case BoundaryValueSpec::Kind::Sin:
      for (Eigen::Index j = 0; j < n; ++j) {
        const double a = c.f.mode * mesh.t[static_cast<std::size_t>(j)];
        f(j) = c.f.kind == BoundaryValueSpec::Kind::Cos ? std::cos(a) : std::sin(a);
      }
      break;
    case BoundaryValueSpec::Kind::File:
      f = read_nodal_values(c.f.path, mesh.size());
      break;
  }
  return f;
}

inline void check_data_mesh(const ExperimentConfig& c, const CauchyPair& d) {
  if (d.n_half != c.n_outer) throw ConfigError("Cauchy data n_half does not match geometry.n_outer");
  if (std::abs(d.outer_radius - c.outer_radius) > 1e-12 * c.outer_radius) throw ConfigError("Cauchy data radius does not match geometry.outer_radius");
}

// ---------------------------------------------------------------------------

struct SynthesisResult {
  CauchyPair clean;
  CauchyPair noisy;
};

inline SynthesisResult run_synthesize(const ExperimentConfig& c) {
  SynthesisSetup s;
  s.outer_center = c.outer_center;
  s.outer_radius = c.outer_radius;
  s.obstacle = c.obstacle();
  s.n_outer = c.n_outer;
  s.n_obstacle = c.n_obstacle;
  s.grading_p = c.grading_p;
  s.gamma = c.gamma;
  s.refine = c.refine;
  const Eigen::VectorXd f = boundary_values(c, outer_mesh(c));
  SynthesisResult r;
  r.clean = synthesize_cauchy(s, f, 0.0, c.seed);
  r.noisy = r.clean;
  r.noisy.noise_ratio = c.noise;
  apply_multiplicative_noise(r.noisy.neumann, c.noise, c.seed);
  return r;
}

struct GammaResult {
  IndicatorField scan;
  GammaEstimate estimate;
};

inline GammaResult run_recover_gamma(const ExperimentConfig& c, const CauchyPair& data) {
  check_data_mesh(c, data);
  const UniformMesh outer = outer_mesh(c);
  const DtnMatrix l0 = EmptyDiskSolver(outer).dtn();
  const ObstacleSolver omega(outer, build_smooth_obstacle_mesh(circle_curve(c.omega_center, c.omega_radius), c.sampler_n), DtnKind::Sampler);
  const double cutoff = c.cutoff > 0.0 ? c.cutoff : default_cutoff(data.noise_ratio);
  GammaResult r;
  r.scan = conductivity_scan(data, l0, omega.dtn(), c.taus(), cutoff);
  r.scan.n_sampler = c.sampler_n;
  r.estimate = estimate_gamma(r.scan);
  return r;
}

// First radius at which log I2 exceeds the midpoint of its range over the family.
inline double crossover_radius(const IndicatorField& f) {
  if (f.values.empty()) throw ConfigError("crossover_radius: empty field");
  double lo = INFINITY;
  double hi = -INFINITY;
  for (double v : f.values) {
    lo = std::min(lo, std::log(v));
    hi = std::max(hi, std::log(v));
  }
  const double mid = 0.5 * (lo + hi);
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    if (std::log(f.values[k]) > mid) return f.disks[k].radius;
  }
  return f.disks.back().radius;
}

struct LocateResult {
  IndicatorField approach1;
  std::vector<IndicatorField> approach2;  // one field per grid radius
  double crossover{0.0};
};

inline LocateResult run_locate(const ExperimentConfig& c, const CauchyPair& data, double gamma_hat, bool with_grid = true) {
  check_data_mesh(c, data);
  const UniformMesh outer = outer_mesh(c);
  const DtnMatrix l0 = EmptyDiskSolver(outer).dtn();
  DomainScanOptions opt;
  opt.sampler_n_half = c.sampler_n;
  opt.cutoff_rel = c.cutoff > 0.0 ? c.cutoff : default_cutoff(data.noise_ratio);
  opt.threads = c.threads;
  LocateResult r;
  r.approach1 = domain_scan(data, gamma_hat, l0, outer, concentric_disks(c.approach1_center, c.approach1_first, c.approach1_last), opt);
  r.crossover = crossover_radius(r.approach1);
  if (with_grid) {
    for (double rad : c.grid_radii) r.approach2.push_back(domain_scan(data, gamma_hat, l0, outer, disk_grid(rad), opt));
  }
  return r;
}

inline NewtonState run_newton(const ExperimentConfig& c, const CauchyPair& data, double gamma_hat) {
  check_data_mesh(c, data);
  return newton_run(c.newton_initial, data, c.newton_params(gamma_hat));
}

// ---------------------------------------------------------------------------
// Self-test oracle suite.

struct OracleLine {
  std::string name;
  double measured{0.0};
  double tolerance{0.0};
  bool pass() const { return measured <= tolerance; }
};

inline std::vector<OracleLine> run_selftest(double tolerance_scale = 1.0) {
  std::vector<OracleLine> out;
  auto add = [&](std::string name, double measured, double tol) { out.push_back({std::move(name), measured, tol * tolerance_scale}); };

  add("fourier_dtn_mode1_n64", fourier_dtn_error(64, 5.0, 1), 1e-8);
  add("fourier_dtn_modes1to8_n64", fourier_dtn_error(64, 5.0, 8), 1e-6);
  const AnnulusErrors a = annulus_errors();
  add("annulus_constant_128gon", a.constant, 1e-3);
  add("annulus_modes1to4_128gon", a.modes, 1e-3);
  add("annulus_obstacle_trace_midpanel", a.trace, 1e-2);
  add("annulus_field_r2", a.field, 1e-3);
  const GreensErrors g = greens_errors();
  add("greens_boundary_vanishing", g.boundary, 1e-12);
  add("greens_reciprocity", g.reciprocity, 1e-12);
  add("greens_trace_against_constants", g.constant, 1e-8);
  add("quadrature_weight_identities", quadrature_identity_error(), 1e-12);
  NewtonParams p;
  const auto fd = jacobian_fd_errors(example_polygon(), p, newton_boundary_data(p.n_outer));
  add("jacobian_fd_worst_column", *std::max_element(fd.begin(), fd.end()), 1e-3);
  return out;
}

}  // namespace cauchyfm
