#include "qbd2d/drift.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "qbd2d/matrix_eq.hpp"
#include "qbd2d/model.hpp"
#include "qbd2d/spectral.hpp"

namespace qbd2d {

RowVector stationary_of(const Matrix& P, const Tolerances& tol) {
  (void)tol;
  const int n = static_cast<int>(P.rows());
  if (P.cols() != n) throw ModelError("stationary_of: matrix must be square");
  if (n == 1) {
    RowVector pi(1);
    pi[0] = 1.0;
    return pi;
  }
  // Solve pi (I - P) = 0 with the normalization row appended (dense solve of
  // the transposed system with one equation replaced by sum-to-one).
  Matrix A = (Matrix::Identity(n, n) - P).transpose();
  A.row(n - 1).setOnes();
  Vector b = Vector::Zero(n);
  b[n - 1] = 1.0;
  Vector pi = A.fullPivLu().solve(b);
  RowVector row = pi.transpose();
  const double residual = (row * P - row).cwiseAbs().sum();
  if (!row.allFinite() || row.minCoeff() < -1e-9 || residual > 1e-9)
    throw ModelError(
        "stationary_of: no unique stationary distribution (matrix reducible "
        "or not stochastic)");
  return row.cwiseMax(0.0) / row.cwiseMax(0.0).sum();
}

std::pair<double, double> drift_interior(const ModelSpec& m,
                                         const Tolerances& tol) {
  const RowVector pi = stationary_of(m.sum_interior(), tol);
  const Vector ones = Vector::Ones(m.s0);
  const double a1 =
      pi * (eval_A_rowstar(m, 1, 1.0) - eval_A_rowstar(m, -1, 1.0)) * ones;
  const double a2 =
      pi * (eval_A_star(m, 1, 1.0) - eval_A_star(m, -1, 1.0)) * ones;
  return {a1, a2};
}

namespace {

struct BoundaryDriftResult {
  double value = 0.0;
  BoundaryQbdMeta meta;
};

// Mean first-coordinate increment under the stationary distribution of the
// first-axis boundary chain (a one-dimensional QBD whose level is the second
// coordinate).  Requires the interior second-coordinate drift to be negative
// so that chain is positive recurrent.
BoundaryDriftResult boundary_drift_axis1(const ModelSpec& m,
                                         const Tolerances& tol) {
  const auto [a1, a2] = drift_interior(m, tol);
  (void)a1;
  if (!(a2 < -tol.drift_zero_tol))
    throw DomainError(
        "boundary drift for axis 1 is undefined: interior drift of the "
        "second coordinate is not negative");

  const MatrixSolution rs = solve_R1(m, 1.0, tol);
  const Matrix& R = rs.M;
  const double sprR = perron(R, tol).rho;
  if (sprR >= 1.0)
    throw DomainError(
        "boundary drift for axis 1: rate matrix has spectral radius >= 1");

  const int n = m.s0;
  const Matrix I = Matrix::Identity(n, n);
  const Matrix A_lo = eval_A_star(m, -1, 1.0);
  const Matrix A_mid = eval_A_star(m, 0, 1.0);
  const Matrix B_mid = eval_A1_star(m, 0, 1.0);
  const Matrix B_up = eval_A1_star(m, 1, 1.0);

  // Censored transition matrix on boundary level 0 and interior level 1.
  Matrix T(2 * n, 2 * n);
  T.block(0, 0, n, n) = B_mid;
  T.block(0, n, n, n) = B_up;
  T.block(n, 0, n, n) = A_lo;
  T.block(n, n, n, n) = A_mid + R * A_lo;
  const RowVector x = stationary_of(T, tol);
  RowVector x0 = x.head(n);
  RowVector x1 = x.tail(n);

  const Matrix N = (I - R).fullPivLu().inverse();
  const Vector ones = Vector::Ones(n);
  const double c = x0.dot(ones) + x1.dot(N * ones);
  x0 /= c;
  x1 /= c;

  // Mean increments of the first coordinate on the boundary and in the
  // interior levels.
  Matrix d_b = Matrix::Zero(n, n);
  for (int j = 0; j <= 1; ++j)
    d_b += m.Ab1(1, j) - m.Ab1(-1, j);
  const Matrix d_i = eval_A_rowstar(m, 1, 1.0) - eval_A_rowstar(m, -1, 1.0);

  BoundaryDriftResult out;
  out.value = x0.dot(d_b * ones) + x1.dot(N * (d_i * ones));
  out.meta.axis = 1;
  out.meta.iterations = rs.iterations;
  out.meta.residual = rs.residual;
  out.meta.spr_R = sprR;
  return out;
}

BoundaryDriftResult boundary_drift_full(const ModelSpec& m, int axis,
                                        const Tolerances& tol) {
  if (axis == 1) return boundary_drift_axis1(m, tol);
  if (axis == 2) {
    BoundaryDriftResult r = boundary_drift_axis1(m.swapped(), tol);
    r.meta.axis = 2;
    return r;
  }
  throw ModelError("boundary_drift: axis must be 1 or 2");
}

int sign_with_tol(double v, double tol) {
  if (v > tol) return 1;
  if (v < -tol) return -1;
  return 0;
}

}  // namespace

double boundary_drift(const ModelSpec& m, int axis, const Tolerances& tol) {
  return boundary_drift_full(m, axis, tol).value;
}

DriftReport classify_stability(const ModelSpec& m, const Tolerances& tol) {
  DriftReport rep;
  const auto [a1, a2] = drift_interior(m, tol);
  rep.a12_1 = a1;
  rep.a12_2 = a2;
  const int s1 = sign_with_tol(a1, tol.drift_zero_tol);
  const int s2 = sign_with_tol(a2, tol.drift_zero_tol);

  if (s1 == 0 || s2 == 0) {
    rep.classification = "indeterminate";
    rep.warnings.push_back(
        "interior drift has a coordinate within tolerance of zero; strict "
        "sign tests are not certifiable");
    return rep;
  }

  auto record = [&](const BoundaryDriftResult& r, int axis) {
    if (axis == 1)
      rep.a1_1 = r.value;
    else
      rep.a2_2 = r.value;
    rep.boundary_qbd_meta.push_back(r.meta);
    return sign_with_tol(r.value, tol.drift_zero_tol);
  };

  if (s1 < 0 && s2 < 0) {
    const int b1 = record(boundary_drift_full(m, 1, tol), 1);
    const int b2 = record(boundary_drift_full(m, 2, tol), 2);
    if (b1 == 0 || b2 == 0) {
      rep.classification = "indeterminate";
      rep.warnings.push_back(
          "a boundary drift is within tolerance of zero; strict sign tests "
          "are not certifiable");
    } else if (b1 < 0 && b2 < 0) {
      rep.classification = "positive_recurrent";
    } else {
      rep.classification = "transient";
    }
    return rep;
  }

  if (s1 > 0 && s2 < 0) {
    const int b1 = record(boundary_drift_full(m, 1, tol), 1);
    if (b1 == 0) {
      rep.classification = "indeterminate";
      rep.warnings.push_back(
          "boundary drift along axis 1 is within tolerance of zero");
    } else {
      rep.classification = b1 < 0 ? "positive_recurrent" : "transient";
    }
    return rep;
  }

  if (s1 < 0 && s2 > 0) {
    const int b2 = record(boundary_drift_full(m, 2, tol), 2);
    if (b2 == 0) {
      rep.classification = "indeterminate";
      rep.warnings.push_back(
          "boundary drift along axis 2 is within tolerance of zero");
    } else {
      rep.classification = b2 < 0 ? "positive_recurrent" : "transient";
    }
    return rep;
  }

  rep.classification = "transient";
  return rep;
}

nlohmann::json DriftReport::to_json() const {
  nlohmann::json j;
  j["a12"] = {a12_1, a12_2};
  j["a1_1"] = a1_1.has_value() ? nlohmann::json(*a1_1) : nlohmann::json();
  j["a2_2"] = a2_2.has_value() ? nlohmann::json(*a2_2) : nlohmann::json();
  j["classification"] = classification;
  nlohmann::json meta = nlohmann::json::array();
  for (const auto& bm : boundary_qbd_meta) {
    meta.push_back({{"axis", bm.axis},
                    {"iterations", bm.iterations},
                    {"residual", bm.residual},
                    {"spr_R", bm.spr_R}});
  }
  j["boundary_qbd_meta"] = meta;
  j["warnings"] = warnings;
  return j;
}

}  // namespace qbd2d
