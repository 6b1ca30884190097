// Central registry of numeric tolerances and iteration caps.
//
// Every report emitted by the toolkit embeds the tolerance set that was in
// effect, and the CLI lets users override individual values by name
// (--tol key=value).  Unknown keys are rejected at parse time.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace qbd2d {

struct Tolerances {
  // Stochasticity check on block row sums.
  double stochastic_tol = 1e-12;

  // Perron value/vector computation: power-iteration increment tolerance and
  // iteration cap before falling back to a dense eigensolve.
  double power_iter_tol = 1e-13;
  long power_iter_max = 100000;

  // Golden-section tolerance on the log-argument when minimizing the Perron
  // value along one axis.
  double golden_t_tol = 1e-9;

  // Bisection tolerances: extreme points of the convergence region (on z) and
  // the two root branches of chi(z, .) = 1 (on w).
  double extreme_bisect_tol = 1e-12;
  double zeta_bisect_tol = 1e-12;

  // Two roots are reported coincident when |upper-lower| <= rel_tol * upper.
  double coincident_rel_tol = 1e-7;

  // Region treated as degenerate (decay analysis refuses) when
  // z1_max - z1_min falls below this.
  double degenerate_geometry_tol = 1e-9;

  // Matrix quadratic solver: increment tolerance, iteration cap, and the
  // relaxed equation-residual tolerance applied within `g_edge_band` of the
  // upper extreme point where convergence degrades.
  double g_solver_tol = 1e-13;
  long g_solver_max_iter = 1000000;
  double g_edge_residual_tol = 1e-12;
  double g_edge_band = 1e-6;

  // Drift sign tests: anything within this of zero is "indeterminate".
  double drift_zero_tol = 1e-9;

  // Minimal relative eigenvalue gap below which distinctness is unknowable.
  double distinct_eig_gap_tol = 1e-9;

  // Relative tolerance for psi-vs-1 subcase selection in the exponent table.
  double psi_eq_rel_tol = 1e-8;

  // Tolerance for the critical-point tie tests in the type classification.
  double type_tie_tol = 1e-9;

  // Central finite-difference step for the curvature of the upper root
  // branch (one Richardson level is applied on top).
  double fd_step = 1e-5;

  // Truncated-lattice oracle: stationary residual target and sweep cap.
  double oracle_residual_tol = 1e-12;
  long oracle_max_sweeps = 10000000;

  // Tail regressions below this R^2 are flagged unreliable.
  double fit_r2_min = 0.999;

  // Finite reachability scan level for validation.
  int reach_scan_level = 5;

  // Set a value by registry name; throws ModelError on unknown key.
  void set(const std::string& key, double value);

  // All keys accepted by set(), in fixed order.
  static const std::vector<std::string>& keys();

  nlohmann::json to_json() const;
};

}  // namespace qbd2d
