#pragma once

// Nystrom matrices for the two-boundary Laplace system.
//
// Index conventions: rows follow the target mesh, columns the source mesh.
// Outer-boundary columns carry weight pi/n_outer; obstacle columns carry
// pi/n_obstacle and act on the scaled density W psi (never on psi itself).

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cauchyfm/errors.hpp"
#include "cauchyfm/geometry.hpp"

namespace cauchyfm {

enum class MeshTag { OuterUniform, ObstacleGraded, ObstacleSmooth };

enum class OperatorKind { L_B, T_B, M_D, M_DB, L_BD, H_DB, T_BD, H_D };

inline const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::L_B: return "L_B";
    case OperatorKind::T_B: return "T_B";
    case OperatorKind::M_D: return "M_D";
    case OperatorKind::M_DB: return "M_DB";
    case OperatorKind::L_BD: return "L_BD";
    case OperatorKind::H_DB: return "H_DB";
    case OperatorKind::T_BD: return "T_BD";
    case OperatorKind::H_D: return "H_D";
  }
  return "?";
}

struct OperatorMatrix {
  Eigen::MatrixXd entries;
  MeshTag row_mesh{MeshTag::OuterUniform};
  MeshTag col_mesh{MeshTag::OuterUniform};
  OperatorKind kind{OperatorKind::L_B};

  bool all_finite() const { return entries.allFinite(); }
};

inline MeshTag tag_of(const GradedMesh& m) { return m.graded() ? MeshTag::ObstacleGraded : MeshTag::ObstacleSmooth; }

// ---------------------------------------------------------------------------
// Trigonometric quadrature weights (direct summation).

// Weight of the rule for  int_0^{2pi} ln(4 sin^2((s - sigma)/2)) g(sigma) d sigma.
inline double weight_R(std::size_t n, double s, double s_j) {
  if (n < 1) throw ConfigError("weight_R: n must be >= 1");
  const double d = s - s_j;
  const double nd = static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t m = 1; m < n; ++m) sum += std::cos(static_cast<double>(m) * d) / static_cast<double>(m);
  return -(kTwoPi / nd) * sum - (kPi / (nd * nd)) * std::cos(nd * d);
}

// Weight of the hypersingular rule; annihilates constants.
inline double weight_T(std::size_t n, double t, double t_j) {
  if (n < 1) throw ConfigError("weight_T: n must be >= 1");
  const double d = t - t_j;
  const double nd = static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t m = 1; m < n; ++m) sum += static_cast<double>(m) * std::cos(static_cast<double>(m) * d);
  return -sum / nd - 0.5 * std::cos(nd * d);
}

// Both rules depend on the node offset only: table[k] = weight(n, k pi / n, 0).
inline std::vector<double> weight_R_table(std::size_t n) {
  std::vector<double> tab(2 * n);
  for (std::size_t k = 0; k < 2 * n; ++k) tab[k] = weight_R(n, static_cast<double>(k) * kPi / static_cast<double>(n), 0.0);
  return tab;
}

inline std::vector<double> weight_T_table(std::size_t n) {
  std::vector<double> tab(2 * n);
  for (std::size_t k = 0; k < 2 * n; ++k) tab[k] = weight_T(n, static_cast<double>(k) * kPi / static_cast<double>(n), 0.0);
  return tab;
}

inline std::size_t offset_index(Eigen::Index i, Eigen::Index j, Eigen::Index count) {
  return static_cast<std::size_t>(((i - j) % count + count) % count);
}

// ---------------------------------------------------------------------------
// Outer-boundary self operators.

inline OperatorMatrix assemble_double_layer_B(const UniformMesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.size());
  const double h = mesh.spacing();
  OperatorMatrix op{Eigen::MatrixXd(n, n), MeshTag::OuterUniform, MeshTag::OuterUniform, OperatorKind::L_B};
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    const Vec2 nu_j = rot_cw(mesh.d1[uj]);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      double k;
      if (i == j) {
        k = dot(mesh.d2[uj], nu_j) / (kTwoPi * norm2(mesh.d1[uj]));
      } else {
        const Vec2 d = mesh.points[ui] - mesh.points[uj];
        k = dot(d, nu_j) / (kPi * norm2(d));
      }
      op.entries(i, j) = h * k;
    }
  }
  return op;
}

inline OperatorMatrix assemble_hypersingular_B(const UniformMesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.size());
  const double h = mesh.spacing();
  OperatorMatrix op{Eigen::MatrixXd(n, n), MeshTag::OuterUniform, MeshTag::OuterUniform, OperatorKind::T_B};
  const auto tw = weight_T_table(mesh.n_half);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const Vec2 x1 = mesh.d1[ui];
    const Vec2 nu_i = rot_cw(x1);
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      double ka;
      double k2;
      if (i == j) {
        const double s2 = norm2(x1);
        ka = (dot(x1, mesh.d3[ui]) / 6.0 - 0.25 * norm2(mesh.d2[ui]) + 5.0 / 12.0 * s2) / (kPi * s2);
        const double c = dot(mesh.d2[ui], nu_i);
        k2 = c * c / (kTwoPi * s2 * s2);
      } else {
        const double dt = mesh.t[ui] - mesh.t[uj];
        const double sh = std::sin(0.5 * dt);
        const double one_minus_cos = 2.0 * sh * sh;
        const double cs = std::cos(dt);
        const Vec2 d = mesh.points[ui] - mesh.points[uj];
        const double r2 = norm2(d);
        ka = (2.0 * one_minus_cos * dot(x1, mesh.d1[uj]) - cs * r2) / (kTwoPi * one_minus_cos * r2);
        k2 = -2.0 / kPi * dot(d, nu_i) * dot(d, rot_cw(mesh.d1[uj])) / (r2 * r2);
      }
      op.entries(i, j) = tw[offset_index(i, j, n)] + h * (ka + k2 - 1.0 / kTwoPi);
    }
  }
  return op;
}

// ---------------------------------------------------------------------------
// Obstacle single layer with logarithmic splitting in the quadrature variable.

inline OperatorMatrix assemble_single_layer_D(const GradedMesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.size());
  const double h = mesh.spacing();
  const MeshTag tag = tag_of(mesh);
  OperatorMatrix op{Eigen::MatrixXd(n, n), tag, tag, OperatorKind::M_D};
  const auto rw = weight_R_table(mesh.n_half);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    const double sp = mesh.speed[uj];
    const double m1 = -sp / kTwoPi;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      double m2;
      if (i == j) {
        m2 = 2.0 * m1 * std::log(mesh.w_prime[uj]) + sp / kPi * std::log(1.0 / sp);
      } else {
        const double r = norm(mesh.points[ui] - mesh.points[uj]);
        const double sh = std::sin(0.5 * (mesh.s[ui] - mesh.s[uj]));
        m2 = sp / kPi * std::log(1.0 / r) - m1 * std::log(4.0 * sh * sh);
      }
      op.entries(i, j) = rw[offset_index(i, j, n)] * m1 + h * m2;
    }
  }
  return op;
}

// ---------------------------------------------------------------------------
// Cross-boundary blocks and the obstacle self double-layer adjoint.

struct CrossBlocks {
  OperatorMatrix M_DB;  // obstacle single layer evaluated on the outer boundary
  OperatorMatrix L_BD;  // outer double layer evaluated on the obstacle
  OperatorMatrix H_DB;  // normal derivative on the outer boundary of the obstacle single layer
  OperatorMatrix T_BD;  // normal derivative on the obstacle of the outer double layer
  OperatorMatrix H_D;   // obstacle adjoint double layer (straight panels: zero diagonal)
};

// Smallest distance between any outer node and any obstacle node.
inline double min_node_distance(const UniformMesh& outer, const GradedMesh& obstacle) {
  double d = INFINITY;
  for (const auto& a : outer.points)
    for (const auto& b : obstacle.points) d = std::min(d, norm(a - b));
  return d;
}

// Equivalent radius perimeter / 2pi of the outer boundary.
inline double outer_scale(const UniformMesh& outer) {
  double p = 0.0;
  for (double s : outer.speed) p += outer.spacing() * s;
  return p / kTwoPi;
}

inline constexpr double kClearanceRelTol = 1e-6;

inline CrossBlocks assemble_cross_blocks(const UniformMesh& outer, const GradedMesh& obstacle) {
  const double gap = min_node_distance(outer, obstacle);
  if (!(gap > kClearanceRelTol * outer_scale(outer))) {
    throw GeometryError("assemble_cross_blocks: obstacle touches the outer boundary (min node distance " +
                        std::to_string(gap) + ")");
  }
  const auto nb = static_cast<Eigen::Index>(outer.size());
  const auto nd = static_cast<Eigen::Index>(obstacle.size());
  const double hb = outer.spacing();
  const double hd = obstacle.spacing();
  const MeshTag dt = tag_of(obstacle);

  CrossBlocks cb{
      {Eigen::MatrixXd(nb, nd), MeshTag::OuterUniform, dt, OperatorKind::M_DB},
      {Eigen::MatrixXd(nd, nb), dt, MeshTag::OuterUniform, OperatorKind::L_BD},
      {Eigen::MatrixXd(nb, nd), MeshTag::OuterUniform, dt, OperatorKind::H_DB},
      {Eigen::MatrixXd(nd, nb), dt, MeshTag::OuterUniform, OperatorKind::T_BD},
      {Eigen::MatrixXd(nd, nd), dt, dt, OperatorKind::H_D},
  };

  for (Eigen::Index j = 0; j < nd; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    const Vec2 y = obstacle.points[uj];
    const double sp = obstacle.speed[uj];
    for (Eigen::Index i = 0; i < nb; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const Vec2 x = outer.points[ui];
      const double r2 = norm2(x - y);
      cb.M_DB.entries(i, j) = hd * sp / kPi * (-0.5 * std::log(r2));
      cb.H_DB.entries(i, j) = hd * dot(y - x, rot_cw(outer.d1[ui])) / (kPi * r2) * sp;
    }
  }

  for (Eigen::Index j = 0; j < nb; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    const Vec2 y = outer.points[uj];
    const Vec2 nu_y = rot_cw(outer.d1[uj]);
    for (Eigen::Index i = 0; i < nd; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const Vec2 d = obstacle.points[ui] - y;
      const double r2 = norm2(d);
      const Vec2 nu_x = rot_cw(obstacle.d1[ui]);
      cb.L_BD.entries(i, j) = hb * dot(d, nu_y) / (kPi * r2);
      cb.T_BD.entries(i, j) =
          hb * (-2.0 / kPi * dot(d, nu_x) * dot(d, nu_y) / (r2 * r2) + dot(nu_x, nu_y) / (kPi * r2));
    }
  }

  for (Eigen::Index j = 0; j < nd; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    const double sp = obstacle.speed[uj];
    for (Eigen::Index i = 0; i < nd; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const Vec2 nu_x = rot_cw(obstacle.d1[ui]);
      double k;
      if (i == j) {
        k = dot(obstacle.d2[ui], nu_x) / (kTwoPi * obstacle.speed[ui]);
      } else {
        const Vec2 d = obstacle.points[uj] - obstacle.points[ui];
        k = sp / kPi * dot(d, nu_x) / norm2(d);
      }
      cb.H_D.entries(i, j) = hd * k;
    }
  }
  return cb;
}

// ---------------------------------------------------------------------------
// Debug dump: row-major, full precision.

inline void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m) {
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17e", m(i, j));
      if (j) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace cauchyfm
