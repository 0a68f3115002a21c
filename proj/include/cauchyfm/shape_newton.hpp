#pragma once

// Regularized Newton refinement of polygon corners from one Cauchy pair.
// Corner vectors are ordered (x_1..x_N, y_1..y_N).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cauchyfm/errors.hpp"
#include "cauchyfm/forward_solver.hpp"
#include "cauchyfm/geometry.hpp"

namespace cauchyfm {

// Collocation: Dirichlet data -(nu . q) du/dnu imposed at the obstacle nodes.
// Reciprocity: the same derivative written as the boundary integral
//   (F'q, e_k) = int (nu . q) du/dnu dw_k/dnu ds,
// where w_k solves the forward problem with outer data e_k. The integrand is
// integrable at corners, so it converges much faster than the collocation
// form on graded meshes.
enum class JacobianForm { Reciprocity, Collocation };

inline const char* to_string(JacobianForm f) { return f == JacobianForm::Reciprocity ? "reciprocity" : "collocation"; }

struct NewtonParams {
  Vec2 outer_center{};
  double outer_radius{5.0};
  std::size_t n_outer{32};
  std::size_t n_obstacle{512};
  double grading_p{5.0};
  double alpha{1e-3};
  double alpha0{1e-4};
  std::size_t max_iters{20};
  double step_tol{1e-6};
  double gamma_hat{1.0};
  double min_panel{1e-3};
  int max_halvings{5};
  bool trace_from_density{false};
  JacobianForm jacobian_form{JacobianForm::Reciprocity};
};

inline Eigen::VectorXd pack_corners(const std::vector<Vec2>& c) {
  const auto n = static_cast<Eigen::Index>(c.size());
  Eigen::VectorXd v(2 * n);
  for (Eigen::Index l = 0; l < n; ++l) {
    v(l) = c[static_cast<std::size_t>(l)].x;
    v(n + l) = c[static_cast<std::size_t>(l)].y;
  }
  return v;
}

inline std::vector<Vec2> unpack_corners(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size() / 2;
  std::vector<Vec2> c(static_cast<std::size_t>(n));
  for (Eigen::Index l = 0; l < n; ++l) c[static_cast<std::size_t>(l)] = {v(l), v(n + l)};
  return c;
}

inline UniformMesh newton_outer_mesh(const NewtonParams& p) {
  return build_uniform_mesh(circle_curve(p.outer_center, p.outer_radius), p.n_outer);
}

inline ObstacleSolver polygon_solver(const std::vector<Vec2>& corners, const NewtonParams& p) {
  return ObstacleSolver(newton_outer_mesh(p), build_graded_mesh(PolygonBoundary(corners), p.n_obstacle, p.grading_p));
}

// du/dnu on the outer boundary for the polygon with the given corners.
inline Eigen::VectorXd forward_map(const std::vector<Vec2>& corners, const NewtonParams& p, const Eigen::VectorXd& f) {
  return polygon_solver(corners, p).apply_dtn(f);
}

// Hat weight of corner l at polygon parameter t.
inline double corner_hat(const PolygonBoundary& poly, std::size_t l, double t) {
  const std::size_t k = poly.panel_of(t);
  const double lam = poly.panel_fraction(t, k);
  double h = 0.0;
  if (k == l) h += 1.0 - lam;
  if ((k + 1) % poly.size() == l) h += lam;
  return h;
}

// Columns: nu . q_{l,e} at the mesh nodes for e = e1 (first N) then e2.
inline Eigen::MatrixXd corner_basis(const PolygonBoundary& poly, const GradedMesh& mesh) {
  const std::size_t n = poly.size();
  Eigen::MatrixXd q(static_cast<Eigen::Index>(mesh.size()), static_cast<Eigen::Index>(2 * n));
  for (std::size_t j = 0; j < mesh.size(); ++j) {
    const Vec2 nu = mesh.normals[j];
    for (std::size_t l = 0; l < n; ++l) {
      const double h = corner_hat(poly, l, mesh.t[j]);
      q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = h * nu.x;
      q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n + l)) = h * nu.y;
    }
  }
  return q;
}

// Collocation-form domain derivative for the normal displacement qn (nodal nu . q).
inline Eigen::VectorXd domain_derivative(const ObstacleSolver& solver, const Eigen::VectorXd& trace_du, const Eigen::VectorXd& qn) {
  const Eigen::VectorXd g = -(qn.array() * trace_du.array()).matrix();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(solver.outer_mesh().size()));
  return solver.outer_neumann(solver.solve(zero, g));
}

// Reciprocity-form domain derivatives for every column of qn at once.
// wpsi_u: W psi_D of the state; unit: unit_data_densities() of the solver.
inline Eigen::MatrixXd domain_derivative_reciprocity(const ObstacleSolver& solver, const Eigen::VectorXd& wpsi_u,
                                                     const Eigen::MatrixXd& unit, const Eigen::MatrixXd& qn) {
  const GradedMesh& m = solver.obstacle_mesh();
  // du/dnu = -W psi_u / w' and w' dw_k/dnu = -W psi_k on the obstacle.
  const Eigen::ArrayXd nodal = m.spacing() * speeds(m).array() * wpsi_u.array() / w_primes(m).array();
  const Eigen::MatrixXd weighted = nodal.matrix().asDiagonal() * qn;
  const Eigen::VectorXd w = quadrature_weights(solver.outer_mesh());
  return w.cwiseInverse().asDiagonal() * (unit.transpose() * weighted);
}

struct Linearization {
  Eigen::VectorXd value;  // F(h)
  Eigen::MatrixXd jacobian;
};

inline Linearization linearize(const std::vector<Vec2>& corners, const NewtonParams& p, const Eigen::VectorXd& f) {
  const PolygonBoundary poly(corners);
  const ObstacleSolver solver = polygon_solver(corners, p);
  const Densities d = solver.solve(f);
  const Eigen::MatrixXd q = corner_basis(poly, solver.obstacle_mesh());
  Linearization lin;
  lin.value = solver.outer_neumann(d);
  if (p.jacobian_form == JacobianForm::Reciprocity) {
    lin.jacobian = domain_derivative_reciprocity(solver, d.wpsi_D, solver.unit_data_densities(), q);
    return lin;
  }
  const Eigen::VectorXd du = solver.neumann_trace(d, p.alpha0, p.trace_from_density);
  lin.jacobian.resize(lin.value.size(), q.cols());
  for (Eigen::Index c = 0; c < q.cols(); ++c) lin.jacobian.col(c) = domain_derivative(solver, du, q.col(c));
  return lin;
}

inline Eigen::MatrixXd jacobian(const std::vector<Vec2>& corners, const NewtonParams& p, const Eigen::VectorXd& f) {
  return linearize(corners, p, f).jacobian;
}

// F'_h q for a corner displacement vector dp (same layout as pack_corners).
inline Eigen::VectorXd domain_derivative(const std::vector<Vec2>& corners, const NewtonParams& p, const Eigen::VectorXd& f,
                                         const Eigen::VectorXd& dp) {
  if (dp.size() != static_cast<Eigen::Index>(2 * corners.size())) throw ConfigError("domain_derivative: displacement size mismatch");
  return jacobian(corners, p, f) * dp;
}

inline double weighted_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
  return std::sqrt((w.array() * v.array().square()).sum());
}

// argmin alpha |dP|^2 + |D^{1/2}(J dP - r)|^2.
inline Eigen::VectorXd tikhonov_step(const Eigen::MatrixXd& j, const Eigen::VectorXd& r, const Eigen::VectorXd& w, double alpha) {
  if (!(alpha >= 0.0)) throw ConfigError("tikhonov_step: alpha must be nonnegative");
  if (j.rows() != r.size() || w.size() != r.size()) throw ConfigError("tikhonov_step: dimension mismatch");
  const Eigen::VectorXd sw = w.cwiseSqrt();
  const Eigen::MatrixXd jw = sw.asDiagonal() * j;
  Eigen::MatrixXd a = jw.transpose() * jw;
  a.diagonal().array() += alpha;
  const Eigen::VectorXd b = jw.transpose() * (sw.array() * r.array()).matrix();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-15)) throw NumericalError("tikhonov_step: normal equations are singular");
  Eigen::VectorXd x = ldlt.solve(b);
  if (!x.allFinite()) throw NumericalError("tikhonov_step: non-finite update");
  return x;
}

// ---------------------------------------------------------------------------

struct NewtonRecord {
  std::size_t iteration{0};
  std::vector<Vec2> corners;
  double residual{0.0};
  double step_inf{0.0};  // applied update, 0 for the final record
};

struct NewtonState {
  std::vector<Vec2> corners;
  std::vector<NewtonRecord> history;
  NewtonParams params;
  bool aborted{false};
  bool converged{false};
  std::string abort_reason;
};

// Empty string when admissible, otherwise the reason.
inline std::string polygon_admissibility(const std::vector<Vec2>& corners, const NewtonParams& p, double clearance) {
  try {
    const PolygonBoundary poly(corners);
    if (poly.min_edge_length() < p.min_panel) return "panel shorter than the minimum length";
  } catch (const GeometryError& e) {
    return e.what();
  }
  for (const Vec2 c : corners) {
    if (norm(c - p.outer_center) > p.outer_radius - clearance) return "corner inside the clearance band of the outer boundary";
  }
  return {};
}

inline NewtonState newton_run(const std::vector<Vec2>& initial, const CauchyPair& data, const NewtonParams& p) {
  if (data.n_half != p.n_outer) throw ConfigError("newton_run: data mesh does not match the reconstruction mesh");
  if (!(p.gamma_hat > 0.0)) throw ConfigError("newton_run: conductivity estimate must be positive");
  NewtonState st;
  st.params = p;
  st.corners = initial;
  const UniformMesh outer = newton_outer_mesh(p);
  const Eigen::VectorXd w = quadrature_weights(outer);
  const double clearance = 2.0 * outer.spacing() * p.outer_radius;
  const Eigen::VectorXd target = data.neumann / p.gamma_hat;

  if (auto why = polygon_admissibility(st.corners, p, clearance); !why.empty()) {
    st.aborted = true;
    st.abort_reason = "initial polygon rejected: " + why;
    return st;
  }

  for (std::size_t m = 0;; ++m) {
    Linearization lin;
    try {
      lin = linearize(st.corners, p, data.dirichlet);
    } catch (const std::exception& e) {
      st.aborted = true;
      st.abort_reason = e.what();
      return st;
    }
    const Eigen::VectorXd r = target - lin.value;
    NewtonRecord rec{m, st.corners, weighted_norm(r, w), 0.0};
    if (m >= p.max_iters || st.converged) {
      st.history.push_back(std::move(rec));
      return st;
    }

    const Eigen::VectorXd dp = tikhonov_step(lin.jacobian, r, w, p.alpha);
    const Eigen::VectorXd x0 = pack_corners(st.corners);
    double scale = 1.0;
    std::string why;
    std::vector<Vec2> next;
    for (int h = 0; h <= p.max_halvings; ++h, scale *= 0.5) {
      next = unpack_corners(x0 + scale * dp);
      why = polygon_admissibility(next, p, clearance);
      if (why.empty()) break;
    }
    if (!why.empty()) {
      st.history.push_back(std::move(rec));
      st.aborted = true;
      st.abort_reason = "step rejected after halving: " + why;
      return st;
    }
    rec.step_inf = scale * dp.lpNorm<Eigen::Infinity>();
    st.history.push_back(std::move(rec));
    st.corners = std::move(next);
    if (st.history.back().step_inf < p.step_tol) st.converged = true;
  }
}

}  // namespace cauchyfm
