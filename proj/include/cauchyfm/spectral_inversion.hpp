#pragma once

// Picard-series indicators over the eigensystem of a DtN difference.

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cauchyfm/errors.hpp"
#include "cauchyfm/forward_solver.hpp"
#include "cauchyfm/geometry.hpp"
#include "cauchyfm/potential_kernels.hpp"

namespace cauchyfm {

inline constexpr double kPicardCap = 1e30;
inline constexpr double kExactDataCutoff = 1e-8;
inline constexpr double kLowConfidenceRatio = 2.0;

// Relative spectral cutoff for data with multiplicative noise ratio delta.
inline double default_cutoff(double delta) { return delta > 0.0 ? delta : kExactDataCutoff; }

// Eigenpairs orthonormal in (f, g)_h = sum_j w_j f_j g_j.
struct WeightedEigensystem {
  Eigen::VectorXd eigenvalues;    // kept, sorted by descending |lambda|
  Eigen::MatrixXd eigenvectors;   // columns, same order
  Eigen::VectorXd weights;
  Eigen::VectorXd all_eigenvalues;  // full spectrum, same ordering rule
  double cutoff_rel{kExactDataCutoff};
  double asymmetry{0.0};  // ||D M - M^T D|| / ||D M|| before symmetrization

  std::size_t kept_count() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

inline double weighted_asymmetry(const Eigen::MatrixXd& m, const Eigen::VectorXd& w) {
  const Eigen::MatrixXd dm = w.asDiagonal() * m;
  const double denom = dm.norm();
  return denom > 0.0 ? (dm - dm.transpose()).norm() / denom : 0.0;
}

inline WeightedEigensystem weighted_eigs(const Eigen::MatrixXd& m, const Eigen::VectorXd& w, double cutoff_rel) {
  if (m.rows() != m.cols() || m.rows() != w.size()) throw ConfigError("weighted_eigs: matrix and weights disagree in size");
  if (!(cutoff_rel > 0.0 && cutoff_rel < 1.0)) throw ConfigError("weighted_eigs: cutoff_rel must lie in (0,1)");
  if ((w.array() <= 0.0).any()) throw ConfigError("weighted_eigs: weights must be positive");

  WeightedEigensystem out;
  out.weights = w;
  out.cutoff_rel = cutoff_rel;
  out.asymmetry = weighted_asymmetry(m, w);

  const Eigen::VectorXd sq = w.cwiseSqrt();
  const Eigen::VectorXd isq = sq.cwiseInverse();
  Eigen::MatrixXd s = sq.asDiagonal() * m * isq.asDiagonal();
  s = 0.5 * (s + s.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success) throw NumericalError("weighted_eigs: eigendecomposition failed");

  const Eigen::Index n = s.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Eigen::VectorXd& lam = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return std::abs(lam(a)) > std::abs(lam(b)); });

  out.all_eigenvalues.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) out.all_eigenvalues(k) = lam(order[static_cast<std::size_t>(k)]);
  const double lmax = n > 0 ? std::abs(out.all_eigenvalues(0)) : 0.0;
  if (!(lmax > 0.0)) throw NumericalError("weighted_eigs: empty spectrum (all eigenvalues vanish)");

  Eigen::Index kept = 0;
  while (kept < n && std::abs(out.all_eigenvalues(kept)) >= cutoff_rel * lmax) ++kept;
  out.eigenvalues = out.all_eigenvalues.head(kept);
  out.eigenvectors.resize(n, kept);
  for (Eigen::Index k = 0; k < kept; ++k) {
    out.eigenvectors.col(k) = isq.asDiagonal() * es.eigenvectors().col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

inline WeightedEigensystem weighted_eigs(const DtnMatrix& a, const DtnMatrix& b, double cutoff_rel) {
  if (a.matrix.rows() != b.matrix.rows()) throw ConfigError("weighted_eigs: DtN matrices live on different meshes");
  return weighted_eigs(a.matrix - b.matrix, a.quad_weights, cutoff_rel);
}

// [sum_n (g, phi_n)_h^2 / |lambda_n|]^{-1}, capped; an empty sum maps to the cap.
inline double picard_value(const Eigen::VectorXd& g, const WeightedEigensystem& eig, double cap = kPicardCap) {
  if (g.size() != eig.weights.size()) throw ConfigError("picard_value: vector does not live on the eigensystem mesh");
  const Eigen::VectorXd c = eig.eigenvectors.transpose() * (eig.weights.array() * g.array()).matrix();
  const double sum = (c.array().square() / eig.eigenvalues.array().abs()).sum();
  if (!(sum > 0.0)) return cap;
  return std::min(1.0 / sum, cap);
}

// ---------------------------------------------------------------------------

struct DiskSample {
  Vec2 center;
  double radius;
};

struct IndicatorField {
  std::vector<Vec2> points;       // point samples (obstacle indicator)
  std::vector<double> taus;       // conductivity samples
  std::vector<DiskSample> disks;  // domain samples
  std::vector<double> values;
  double cutoff_rel{0.0};
  std::size_t kept_modes{0};  // last eigensystem used
  std::size_t n_outer{0};
  std::size_t n_sampler{0};
};

inline IndicatorField obstacle_indicator_field(const WeightedEigensystem& eig, const std::vector<Vec2>& grid,
                                               const DiskGreens& greens, const UniformMesh& mesh) {
  IndicatorField f;
  f.points = grid;
  f.values.reserve(grid.size());
  f.cutoff_rel = eig.cutoff_rel;
  f.kept_modes = eig.kept_count();
  f.n_outer = mesh.n_half;
  for (const Vec2 z : grid) {
    if (!(norm(z - greens.center) < greens.radius)) throw GeometryError("obstacle_indicator_field: sample point outside the outer disk");
    f.values.push_back(picard_value(greens_normal_trace(greens, z, mesh), eig));
  }
  return f;
}

struct GammaEstimate {
  double gamma_hat{0.0};
  std::size_t index{0};
  double peak_to_median{0.0};
  bool low_confidence{false};
};

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline GammaEstimate estimate_gamma(const IndicatorField& scan) {
  if (scan.taus.empty() || scan.values.size() != scan.taus.size()) throw ConfigError("estimate_gamma: empty conductivity scan");
  GammaEstimate est;
  // strict comparison: ties keep the smaller tau (grid is scanned in order)
  std::vector<std::size_t> order(scan.taus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scan.taus[a] < scan.taus[b]; });
  est.index = order.front();
  for (std::size_t k : order) {
    if (scan.values[k] > scan.values[est.index]) est.index = k;
  }
  est.gamma_hat = scan.taus[est.index];
  const double med = median(scan.values);
  est.peak_to_median = med > 0.0 ? scan.values[est.index] / med : INFINITY;
  est.low_confidence = scan.taus.size() < 2 || !(est.peak_to_median >= kLowConfidenceRatio);
  return est;
}

// g_tau = neumann - tau * Lambda_0 f, tested against Lambda_Omega - Lambda_0.
inline IndicatorField conductivity_scan(const CauchyPair& data, const DtnMatrix& lambda0, const DtnMatrix& lambda_omega,
                                        const std::vector<double>& taus, double cutoff_rel) {
  if (taus.empty()) throw ConfigError("conductivity_scan: tau grid is empty");
  const auto eig = weighted_eigs(lambda_omega, lambda0, cutoff_rel);
  const Eigen::VectorXd l0f = lambda0.matrix * data.dirichlet;
  IndicatorField f;
  f.taus = taus;
  f.cutoff_rel = cutoff_rel;
  f.kept_modes = eig.kept_count();
  f.n_outer = data.n_half;
  for (double tau : taus) f.values.push_back(picard_value(data.neumann - tau * l0f, eig));
  return f;
}

// Order-preserving parallel map over [0, count).
template <class Fn>
auto parallel_map(std::size_t count, unsigned threads, Fn fn) -> std::vector<decltype(fn(std::size_t{0}))> {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out(count);
  if (threads <= 1 || count <= 1) {
    for (std::size_t k = 0; k < count; ++k) out[k] = fn(k);
    return out;
  }
  std::vector<std::future<void>> jobs;
  for (unsigned t = 0; t < threads; ++t) {
    jobs.push_back(std::async(std::launch::async, [&, t] {
      for (std::size_t k = t; k < count; k += threads) out[k] = fn(k);
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

struct DomainScanOptions {
  std::size_t sampler_n_half{64};
  double cutoff_rel{kExactDataCutoff};
  unsigned threads{1};
};

inline IndicatorField domain_scan(const CauchyPair& data, double gamma_hat, const DtnMatrix& lambda0, const UniformMesh& outer,
                                  const std::vector<DiskSample>& disks, const DomainScanOptions& opt) {
  if (!(gamma_hat > 0.0)) throw ConfigError("domain_scan: conductivity estimate must be positive");
  const Eigen::VectorXd g = data.neumann - gamma_hat * (lambda0.matrix * data.dirichlet);
  IndicatorField f;
  f.disks = disks;
  f.cutoff_rel = opt.cutoff_rel;
  f.n_outer = outer.n_half;
  f.n_sampler = opt.sampler_n_half;
  struct Item {
    double value;
    std::size_t kept;
  };
  auto items = parallel_map(disks.size(), opt.threads, [&](std::size_t k) {
    const auto& d = disks[k];
    ObstacleSolver solver(outer, build_smooth_obstacle_mesh(circle_curve(d.center, d.radius), opt.sampler_n_half), DtnKind::Sampler);
    const auto eig = weighted_eigs(solver.dtn(), lambda0, opt.cutoff_rel);
    return Item{picard_value(g, eig), eig.kept_count()};
  });
  for (const auto& it : items) {
    f.values.push_back(it.value);
    f.kept_modes = it.kept;
  }
  return f;
}

// Disks centered at p with radii l/10, l = first..last.
inline std::vector<DiskSample> concentric_disks(Vec2 p, int first, int last) {
  std::vector<DiskSample> out;
  for (int l = first; l <= last; ++l) out.push_back({p, l / 10.0});
  return out;
}

// Disks of radius r centered at (-2 + 2 p r, -2 + 2 q r), p, q = 0..round(2/r).
inline std::vector<DiskSample> disk_grid(double r) {
  if (!(r > 0.0)) throw ConfigError("disk_grid: radius must be positive");
  const auto m = static_cast<int>(std::lround(2.0 / r));
  std::vector<DiskSample> out;
  for (int p = 0; p <= m; ++p)
    for (int q = 0; q <= m; ++q) out.push_back({{-2.0 + 2.0 * p * r, -2.0 + 2.0 * q * r}, r});
  return out;
}

// Color scalar in [-1, 1]; a flat field maps to 0.
inline std::vector<double> color_scalar(const std::vector<double>& values) {
  if (values.empty()) return {};
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  std::vector<double> v(values.size(), 0.0);
  if (*hi > *lo) {
    for (std::size_t k = 0; k < values.size(); ++k) v[k] = 2.0 * (values[k] - *lo) / (*hi - *lo) - 1.0;
  }
  return v;
}

struct Rgb {
  double r, g, b;
};

inline Rgb color_ramp(double v) {
  return v >= 0.0 ? Rgb{v, 1.0 - v, 0.0} : Rgb{0.0, 1.0 + v, -v};
}

}  // namespace cauchyfm
