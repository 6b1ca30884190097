#include "qbd2d/matrix_eq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qbd2d/spectral.hpp"

namespace qbd2d {

namespace {

// Section minimum of chi over the second coordinate at fixed z; used both as
// the self-contained domain test (z is inside [z1_min, z1_max] iff the
// minimum is <= 1) and as the edge-proximity measure for the stopping rule.
double section_min_value(const ModelSpec& m, double z, const Tolerances& tol) {
  auto f = [&](double t) { return chi_value(m, z, std::exp(t), tol); };
  const double f0 = f(0.0);
  double T = 1.0;
  while (f(-T) <= f0 || f(T) <= f0) {
    T *= 2.0;
    if (T > 64.0)
      throw GeometryError(
          "section minimum bracket failure: convergence region appears "
          "unbounded");
  }
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = -T, b = T;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol.golden_t_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return std::min(fc, fd);
}

// Monotone fixed-point iteration from zero for either matrix quadratic:
//   kind "G": X = B_lo + B_mid X + B_hi X^2
//   kind "R": X = B_hi + X B_mid + X^2 B_lo
// The iterate increment equals the fixed-point residual of the previous
// iterate, so the stopping test is a true residual test.
MatrixSolution iterate_quadratic(const Matrix& B_lo, const Matrix& B_mid,
                                 const Matrix& B_hi, bool g_kind, double z,
                                 const std::string& kind, double stop_tol,
                                 long max_iter, bool edge_rule) {
  const int n = static_cast<int>(B_lo.rows());
  MatrixSolution sol;
  sol.z = z;
  sol.kind = kind;
  sol.edge_rule = edge_rule;
  Matrix X = Matrix::Zero(n, n);
  double inc = std::numeric_limits<double>::infinity();
  long it = 0;
  for (; it < max_iter; ++it) {
    Matrix Xn = g_kind ? Matrix(B_lo + B_mid * X + B_hi * X * X)
                       : Matrix(B_hi + X * B_mid + X * X * B_lo);
    inc = (Xn - X).cwiseAbs().maxCoeff();
    X = std::move(Xn);
    if (inc <= stop_tol) {
      ++it;
      break;
    }
  }
  sol.M = std::move(X);
  sol.residual = inc;
  sol.iterations = it;
  return sol;
}

MatrixSolution solve_quadratic(const ModelSpec& m, double z, bool g_kind,
                               const std::string& kind,
                               const Tolerances& tol) {
  if (z <= 0.0) throw DomainError(kind + ": parameter must be positive");
  const double fmin = section_min_value(m, z, tol);
  if (fmin > 1.0 + 1e-10)
    throw DomainError(kind + ": parameter " + std::to_string(z) +
                      " outside the existence interval (section minimum " +
                      std::to_string(fmin) + " > 1)");
  // Near the extreme points convergence degrades to sublinear and iterate
  // increments stall near the equation accuracy; relax the stopping residual
  // there.  Proximity is measured through 1 - fmin, which scales linearly
  // with the distance to the extreme parameter.
  const bool edge = (1.0 - fmin) <= tol.g_edge_band;
  const double stop_tol = edge ? tol.g_edge_residual_tol : tol.g_solver_tol;
  const Matrix B_lo = eval_A_star(m, -1, z);
  const Matrix B_mid = eval_A_star(m, 0, z);
  const Matrix B_hi = eval_A_star(m, 1, z);
  return iterate_quadratic(B_lo, B_mid, B_hi, g_kind, z, kind, stop_tol,
                           tol.g_solver_max_iter, edge);
}

}  // namespace

MatrixSolution solve_G1(const ModelSpec& m, double z, const Tolerances& tol) {
  return solve_quadratic(m, z, true, "G1", tol);
}

MatrixSolution solve_R1(const ModelSpec& m, double z, const Tolerances& tol) {
  return solve_quadratic(m, z, false, "R1", tol);
}

MatrixSolution solve_G2(const ModelSpec& m, double w, const Tolerances& tol) {
  MatrixSolution s = solve_quadratic(m.swapped(), w, true, "G2", tol);
  return s;
}

MatrixSolution solve_R2(const ModelSpec& m, double w, const Tolerances& tol) {
  MatrixSolution s = solve_quadratic(m.swapped(), w, false, "R2", tol);
  return s;
}

FactorizationBundle factorization_bundle(const ModelSpec& m, double z,
                                         const std::vector<double>& w_grid,
                                         const Tolerances& tol) {
  FactorizationBundle b;
  b.z = z;
  b.G1 = solve_G1(m, z, tol).M;
  const Matrix A_lo = eval_A_star(m, -1, z);
  const Matrix A_mid = eval_A_star(m, 0, z);
  const Matrix A_hi = eval_A_star(m, 1, z);
  const Matrix I = Matrix::Identity(m.s0, m.s0);
  b.H1 = A_mid + A_hi * b.G1;
  Eigen::FullPivLU<Matrix> lu(I - b.H1);
  if (!lu.isInvertible())
    throw ConvergenceError(
        "I - H1 is numerically singular; level-censored fundamental matrix "
        "does not exist (upstream solver failure)");
  b.N1 = lu.inverse();
  b.R1 = A_hi * b.N1;

  const std::vector<double> grid =
      w_grid.empty() ? std::vector<double>{0.5, 0.8, 1.0, 1.2, 1.5} : w_grid;
  double worst = 0.0;
  for (double w : grid) {
    const Matrix lhs = I - eval_C(m, z, w);
    const Matrix rhs =
        ((1.0 / w) * I - b.R1) * (I - b.H1) * (w * I - b.G1);
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  b.factorization_residual_max = worst;
  return b;
}

Eigensystem g1_eigensystem(const ModelSpec& m, double z,
                           const Tolerances& tol) {
  const Matrix G = solve_G1(m, z, tol).M;
  const int n = m.s0;
  Eigen::EigenSolver<Matrix> es(G), esT(G.transpose());
  CVector vals = es.eigenvalues();
  CMatrix right = es.eigenvectors();
  // Sort ascending by modulus so the top eigenvalue comes last.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(vals[a]) < std::abs(vals[b]);
  });
  Eigensystem sys;
  sys.values = CVector(n);
  sys.right = CMatrix(n, n);
  sys.left = CMatrix(n, n);
  for (int i = 0; i < n; ++i) {
    sys.values[i] = vals[order[i]];
    sys.right.col(i) = right.col(order[i]);
  }
  // Pair each left eigenvector with the nearest remaining eigenvalue.
  CVector valsT = esT.eigenvalues();
  CMatrix leftRaw = esT.eigenvectors();
  std::vector<bool> used(n, false);
  for (int i = 0; i < n; ++i) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double d = std::abs(valsT[j] - sys.values[i]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    used[best] = true;
    sys.left.col(i) = leftRaw.col(best);
  }
  const double scale = std::max(1e-300, std::abs(sys.values[n - 1]));
  double gap = std::numeric_limits<double>::infinity();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      gap = std::min(gap, std::abs(sys.values[a] - sys.values[b]) / scale);
  sys.min_gap = (n == 1) ? std::numeric_limits<double>::infinity() : gap;
  return sys;
}

BranchProbe branch_probe(const ModelSpec& m, const std::vector<double>& deltas,
                         const Tolerances& tol) {
  const SpectralGeometry geo = extreme_points(m, tol);
  if (geo.degenerate)
    throw GeometryError("branch probe refused: degenerate geometry");
  BranchProbe probe;
  probe.z_star = geo.z1_max;
  // Edge value from the spectral path (tangency ordinate), which is accurate
  // to the root-finder tolerance; the near-edge samples come from the matrix
  // solver so the probe genuinely cross-validates the two paths.
  probe.alpha_at_star = zeta2(m, geo.z1_max, tol).lower;

  for (double d : deltas) {
    BranchProbeSample s;
    s.delta = d;
    const Matrix G = solve_G1(m, geo.z1_max - d, tol).M;
    s.spr_g1 = perron(G, tol).rho;
    s.ratio = (probe.alpha_at_star - s.spr_g1) / std::sqrt(d);
    probe.samples.push_back(s);
  }

  // Independent prediction: the upper branch of the first-coordinate section
  // through the tangency point w* has a strict maximum there; the scaling
  // constant of the square-root singularity is sqrt(2 / (-zeta1''(w*))).
  const double w_star = probe.alpha_at_star;
  auto f = [&](double w) { return zeta1(m, w, tol).upper; };
  auto second_diff = [&](double h) {
    return (f(w_star + h) - 2.0 * f(w_star) + f(w_star - h)) / (h * h);
  };
  const double h = tol.fd_step;
  const double d_h = second_diff(h), d_h2 = second_diff(h / 2.0);
  probe.zeta1_second_derivative = (4.0 * d_h2 - d_h) / 3.0;
  if (probe.zeta1_second_derivative >= 0.0)
    throw GeometryError(
        "upper branch curvature is nonnegative at the tangency point; "
        "geometry inconsistent with a convex region");
  probe.scaling_constant = std::sqrt(2.0 / (-probe.zeta1_second_derivative));
  return probe;
}

RankOneProbe rank_one_derivative_probe(const ModelSpec& m, double delta,
                                       const Tolerances& tol) {
  const SpectralGeometry geo = extreme_points(m, tol);
  if (geo.degenerate)
    throw GeometryError("rank-one probe refused: degenerate geometry");
  RankOneProbe probe;
  probe.delta = delta;
  const Matrix G_star = solve_G1(m, geo.z1_max, tol).M;
  const Matrix G_near = solve_G1(m, geo.z1_max - delta, tol).M;
  probe.matrix_ratio = (G_star - G_near) / std::sqrt(delta);
  probe.min_entry = probe.matrix_ratio.minCoeff();

  if (m.s0 == 1) {
    probe.rank_gap = 0.0;
  } else {
    Eigen::JacobiSVD<Matrix> svd(probe.matrix_ratio);
    const auto& sv = svd.singularValues();
    probe.rank_gap = sv[1] / std::max(sv[0], 1e-300);
  }

  // Reference direction: N1(z*) v^{R1}(z*) u^{G1}_top(z*); the difference
  // quotient must align with this rank-one matrix.
  const FactorizationBundle fb = factorization_bundle(m, geo.z1_max, {}, tol);
  const Vector vR = perron(fb.R1, tol).v;
  const Vector uG = perron(fb.G1, tol).u;
  probe.reference = fb.N1 * vR * uG.transpose();
  const double num =
      std::abs((probe.matrix_ratio.array() * probe.reference.array()).sum());
  const double den =
      probe.matrix_ratio.norm() * probe.reference.norm();
  probe.direction_distance = 1.0 - num / std::max(den, 1e-300);
  return probe;
}

std::vector<Complex> detL_roots(const ModelSpec& m, double z,
                                const Tolerances& tol) {
  (void)tol;
  const int deg = 2 * m.s0;
  // Sample det L(z, w) at deg+1 distinct w values and recover polynomial
  // coefficients through a Vandermonde solve.
  Vector ws(deg + 1), ys(deg + 1);
  for (int k = 0; k <= deg; ++k) {
    ws[k] = 0.5 + 2.0 * k / deg;
    ys[k] = eval_L(m, z, ws[k]).determinant();
  }
  Matrix V(deg + 1, deg + 1);
  for (int r = 0; r <= deg; ++r) {
    double p = 1.0;
    for (int c = 0; c <= deg; ++c) {
      V(r, c) = p;
      p *= ws[r];
    }
  }
  Vector coef = V.fullPivLu().solve(ys);

  // Trim numerically-zero leading coefficients before building the
  // companion matrix.
  const double scale = coef.cwiseAbs().maxCoeff();
  int top = deg;
  while (top > 0 && std::abs(coef[top]) < 1e-11 * scale) --top;
  if (top == 0) return {};
  Matrix comp = Matrix::Zero(top, top);
  for (int i = 1; i < top; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < top; ++i) comp(i, top - 1) = -coef[i] / coef[top];
  // Companion of p(w) = sum c_i w^i: transpose convention with roots as
  // eigenvalues.
  Eigen::EigenSolver<Matrix> es(comp);
  std::vector<Complex> roots(es.eigenvalues().data(),
                             es.eigenvalues().data() + top);
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    return std::abs(a) < std::abs(b);
  });
  return roots;
}

}  // namespace qbd2d
