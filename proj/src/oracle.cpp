#include "qbd2d/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qbd2d/drift.hpp"
#include "qbd2d/matrix_eq.hpp"
#include "qbd2d/spectral.hpp"

namespace qbd2d {

RowVector TruncatedDistribution::nu_kl(int k, int l) const {
  return nu.segment(index(k, l, 0), s0).transpose();
}

std::string TruncatedDistribution::to_csv() const {
  std::string out = "k,l,j,nu\n";
  char buf[80];
  for (int k = 0; k <= N; ++k)
    for (int l = 0; l <= N; ++l)
      for (int j = 0; j < s0; ++j) {
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g\n", k, l, j,
                      at(k, l, j));
        out += buf;
      }
  return out;
}

namespace {

// Transition matrix of the truncated chain stored transposed (rows indexed
// by destination state) so one sweep of nu P is a gather: each destination
// accumulates its own sum in a fixed order.  That makes the parallel kernel
// bitwise identical to the serial one for any thread count.
struct TransposedKernel {
  long n = 0;
  std::vector<long> row_ptr;
  std::vector<int> src;
  std::vector<double> p;
};

TransposedKernel build_kernel(const ModelSpec& m, int N) {
  TransposedKernel ker;
  const long n = static_cast<long>(N + 1) * (N + 1) * m.s0;
  ker.n = n;
  auto idx = [&](int k, int l, int j) {
    return (static_cast<long>(k) * (N + 1) + l) * m.s0 + j;
  };
  std::vector<long> count(n + 1, 0);
  for (int k = 0; k <= N; ++k)
    for (int l = 0; l <= N; ++l)
      for (int j = 0; j < m.s0; ++j)
        for_each_transition(m, k, l, j, N,
                            [&](int k2, int l2, int j2, double) {
                              ++count[idx(k2, l2, j2) + 1];
                            });
  ker.row_ptr.assign(n + 1, 0);
  for (long i = 0; i < n; ++i) ker.row_ptr[i + 1] = ker.row_ptr[i] + count[i + 1];
  const long nnz = ker.row_ptr[n];
  ker.src.resize(nnz);
  ker.p.resize(nnz);
  std::vector<long> cursor(ker.row_ptr.begin(), ker.row_ptr.end() - 1);
  // Second pass in source-major order: within each destination row the
  // entries end up sorted by source index, so the gather order is fixed.
  for (int k = 0; k <= N; ++k)
    for (int l = 0; l <= N; ++l)
      for (int j = 0; j < m.s0; ++j) {
        const int s = static_cast<int>(idx(k, l, j));
        for_each_transition(m, k, l, j, N,
                            [&](int k2, int l2, int j2, double prob) {
                              const long e = cursor[idx(k2, l2, j2)]++;
                              ker.src[e] = s;
                              ker.p[e] = prob;
                            });
      }
  return ker;
}

void sweep(const TransposedKernel& ker, const std::vector<double>& x,
           std::vector<double>& y, bool parallel) {
  const long n = ker.n;
#pragma omp parallel for schedule(static) if (parallel)
  for (long d = 0; d < n; ++d) {
    double acc = 0.0;
    for (long e = ker.row_ptr[d]; e < ker.row_ptr[d + 1]; ++e)
      acc += x[ker.src[e]] * ker.p[e];
    y[d] = acc;
  }
}

}  // namespace

TruncatedDistribution truncated_stationary(const ModelSpec& m, int N,
                                           const Tolerances& tol,
                                           bool parallel) {
  if (N < 10)
    throw ModelError("truncated_stationary: N must be at least 10");
  const DriftReport drift = classify_stability(m, tol);
  if (drift.classification != "positive_recurrent")
    throw ModelError(
        "truncated_stationary requires a positive-recurrent model (stability "
        "classification: " +
        drift.classification + ")");

  const TransposedKernel ker = build_kernel(m, N);
  const long n = ker.n;
  std::vector<double> x(n, 1.0 / static_cast<double>(n)), y(n, 0.0);

  long it = 0;
  for (; it < tol.oracle_max_sweeps; ++it) {
    sweep(ker, x, y, parallel);
    // Serial reductions keep normalization and the convergence test
    // deterministic.
    double mass = 0.0;
    for (long i = 0; i < n; ++i) mass += y[i];
    const double inv = 1.0 / mass;
    double diff = 0.0;
    for (long i = 0; i < n; ++i) {
      y[i] *= inv;
      diff += std::abs(y[i] - x[i]);
    }
    x.swap(y);
    if (diff <= tol.oracle_residual_tol) {
      ++it;
      break;
    }
  }

  TruncatedDistribution dist;
  dist.N = N;
  dist.s0 = m.s0;
  dist.solver_iterations = it;
  dist.nu = Eigen::Map<const Vector>(x.data(), n);
  // Exact residual of the returned iterate.
  sweep(ker, x, y, parallel);
  double diff = 0.0;
  for (long i = 0; i < n; ++i) diff += std::abs(y[i] - x[i]);
  dist.residual = diff;
  return dist;
}

TailFit tail_fit_series(const std::vector<double>& h, int k_min, int direction,
                        const Tolerances& tol) {
  const int n = static_cast<int>(h.size());
  if (n < 4)
    throw ModelError("tail_fit: window must contain at least 4 points");
  for (double v : h)
    if (!(v > 0.0))
      throw ModelError("tail_fit: nonpositive mass inside the fit window");

  Matrix X(n, 3);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    const double k = static_cast<double>(k_min + i);
    X(i, 0) = 1.0;
    X(i, 1) = std::log(k);
    X(i, 2) = k;
    y[i] = std::log(h[i]);
  }
  const Vector beta = X.colPivHouseholderQr().solve(y);
  const Vector res = y - X * beta;
  const double ss_res = res.squaredNorm();
  const double mean = y.mean();
  const double ss_tot = (y.array() - mean).square().sum();

  TailFit fit;
  fit.direction = direction;
  fit.k_min = k_min;
  fit.k_max = k_min + n - 1;
  fit.alpha_hat = beta[1] + 1.0;
  fit.r_hat = std::exp(-beta[2]);
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.reliable = fit.r_squared >= tol.fit_r2_min;
  return fit;
}

TailFit tail_fit(const TruncatedDistribution& dist, int direction, int k_min,
                 int k_max, const Tolerances& tol) {
  if (direction != 1 && direction != 2)
    throw ModelError("tail_fit: direction must be 1 or 2");
  if (k_min <= 0) k_min = dist.N / 4;
  if (k_max <= 0) k_max = 3 * dist.N / 4;
  if (k_min < 1 || k_max > dist.N || k_max <= k_min)
    throw ModelError("tail_fit: invalid window [" + std::to_string(k_min) +
                     ", " + std::to_string(k_max) + "]");
  std::vector<double> h;
  h.reserve(k_max - k_min + 1);
  for (int k = k_min; k <= k_max; ++k) {
    const RowVector row =
        (direction == 1) ? dist.nu_kl(k, 0) : dist.nu_kl(0, k);
    h.push_back(row.sum());
  }
  return tail_fit_series(h, k_min, direction, tol);
}

nlohmann::json TailFit::to_json() const {
  return nlohmann::json{{"direction", direction},   {"r_hat", r_hat},
                        {"alpha_hat", alpha_hat},   {"r_squared", r_squared},
                        {"k_min", k_min},           {"k_max", k_max},
                        {"reliable", reliable}};
}

RowVector partial_generating(const TruncatedDistribution& dist,
                             const std::string& which, double z, int K) {
  if (which != "phi1" && which != "phi2")
    throw ModelError("partial_generating: which must be phi1 or phi2");
  if (K > dist.N)
    throw ModelError("partial_generating: K exceeds the truncation level");
  const bool first = (which == "phi1");
  RowVector acc = RowVector::Zero(dist.s0);
  double zp = 1.0;
  double first_term = -1.0, last_term = 0.0;
  for (int k = 1; k <= K; ++k) {
    zp *= z;
    const RowVector term =
        (first ? dist.nu_kl(k, 0) : dist.nu_kl(0, k)) * zp;
    acc += term;
    last_term = term.cwiseAbs().sum();
    if (first_term < 0.0) first_term = last_term;
  }
  if (K >= 2 && first_term > 0.0 && last_term > 10.0 * first_term)
    throw DomainError(
        "partial_generating: partial sums diverge (z beyond the radius of "
        "convergence)");
  return acc;
}

double key_expression_residual(const ModelSpec& m,
                               const TruncatedDistribution& dist, double z,
                               int K, const Tolerances& tol) {
  if (K < 1 || K > dist.N)
    throw ModelError("key_expression_residual: K must be in [1, N]");
  if (m.s0 != dist.s0)
    throw ModelError("key_expression_residual: phase count mismatch");
  const Matrix G = solve_G1(m, z, tol).M;
  const Matrix C1X = eval_C1_X(m, z, G);
  // The balance identity is evaluated in the multiplied-through form
  // phi1 (I - C1) = ..., which stays well-posed at z = 1 where I - C1 is
  // exactly singular.  Beyond the upper critical point the identity's
  // inverse form degenerates and the series diverge, so that is refused.
  if (z > 1.0 + 1e-12 && perron(C1X, tol).rho >= 1.0 - 1e-9)
    throw DomainError(
        "key_expression_residual: boundary kernel is singular at or beyond "
        "the axis-1 critical point");

  const Matrix I = Matrix::Identity(m.s0, m.s0);
  const RowVector lhs = partial_generating(dist, "phi1", z, K) * (I - C1X);

  // phi2(G) = sum_{k>=1} nu_{0,k} G^k, truncated at K.
  RowVector phi2G = RowVector::Zero(m.s0);
  Matrix Gpow = I;
  for (int k = 1; k <= K; ++k) {
    Gpow = Gpow * G;
    phi2G += dist.nu_kl(0, k) * Gpow;
  }
  // phi2_hat(z, G) = sum_{j>=1} nu_{0,j} Chat2(z, G) G^(j-1) by a Horner
  // recurrence over the rows b_j = nu_{0,j} Chat2.
  const Matrix Chat = eval_Chat2_X(m, z, G);
  RowVector phi2hat = dist.nu_kl(0, K) * Chat;
  for (int j = K - 1; j >= 1; --j)
    phi2hat = dist.nu_kl(0, j) * Chat + phi2hat * G;

  const RowVector nu00 = dist.nu_kl(0, 0);
  const Matrix C0X = eval_C0_X(m, z, G);
  const RowVector rhs = phi2hat - phi2G + nu00 * (C0X - I);
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

}  // namespace qbd2d
