// Brute-force ground truth: the exact stationary distribution of the chain
// truncated to the lattice square [0,N]^2 (outward moves folded into
// self-transitions so the truncated matrix stays stochastic), plus empirical
// decay-rate / exponent extraction and boundary generating-function checks
// used to cross-validate the analytic pipeline.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qbd2d/model.hpp"
#include "qbd2d/tolerances.hpp"
#include "qbd2d/types.hpp"

namespace qbd2d {

struct TruncatedDistribution {
  int N = 0;
  int s0 = 0;
  Vector nu;  // indexed ((k * (N+1) + l) * s0 + j)
  double residual = 0.0;  // ||nu P - nu||_1
  long solver_iterations = 0;

  int index(int k, int l, int j) const { return (k * (N + 1) + l) * s0 + j; }
  double at(int k, int l, int j) const { return nu[index(k, l, j)]; }
  // Row vector (nu_{k,l,0}, ..., nu_{k,l,s0-1}).
  RowVector nu_kl(int k, int l) const;

  // CSV export with header "k,l,j,nu".
  std::string to_csv() const;
};

// Solves nu P_N = nu by power iteration on the sparse truncated transition
// matrix; requires positive recurrence (checked via the drift module) and
// N >= 10.  With parallel=true the sweep kernel runs multithreaded; results
// are bitwise identical to the serial kernel for any thread count.
TruncatedDistribution truncated_stationary(const ModelSpec& m, int N,
                                           const Tolerances& tol = {},
                                           bool parallel = true);

struct TailFit {
  int direction = 0;  // 1 or 2
  double r_hat = 0.0;
  double alpha_hat = 0.0;
  double r_squared = 0.0;
  int k_min = 0, k_max = 0;
  bool reliable = false;  // r_squared >= fit_r2_min

  nlohmann::json to_json() const;
};

// Least-squares fit of log(nu_{k,0} 1) (direction 1; nu_{0,k} for 2) against
// c + (alpha - 1) log k - k log r over k in [k_min, k_max]; defaults
// k_min = N/4, k_max = 3N/4 when passed as 0.  Throws ModelError on
// nonpositive masses inside the window.
TailFit tail_fit(const TruncatedDistribution& dist, int direction,
                 int k_min = 0, int k_max = 0, const Tolerances& tol = {});

// Same fit on a raw positive series h[k] (k = k_min..k_max inclusive,
// h.front() is k = k_min); lets synthetic exact sequences exercise the
// estimator without a distribution.
TailFit tail_fit_series(const std::vector<double>& h, int k_min, int direction,
                        const Tolerances& tol = {});

// Truncated boundary generating function:
//   which = "phi1": sum_{k=1..K} nu_{k,0} z^k
//   which = "phi2": sum_{k=1..K} nu_{0,k} z^k
RowVector partial_generating(const TruncatedDistribution& dist,
                             const std::string& which, double z, int K);

// Max-norm residual of the boundary balance identity linking phi1 to the
// phi2-series and the origin mass:
//   phi1(z) [I - C1(z, G1)] = phi2_hat(z, G1) - phi2(G1) + nu_00 [C0(z, G1) - I]
// with G1 = G1(z), phi2(X) = sum_{k=1..K} nu_{0,k} X^k, and
// phi2_hat(z, X) = sum_{j=1..K} nu_{0,j} Chat2(z, X) X^(j-1); all series
// truncated at K.  Throws DomainError when I - C1(z, G1(z)) is numerically
// singular (z at or beyond the boundary kernel's critical point).
double key_expression_residual(const ModelSpec& m,
                               const TruncatedDistribution& dist, double z,
                               int K, const Tolerances& tol = {});

}  // namespace qbd2d
