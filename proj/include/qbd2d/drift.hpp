// Mean-drift stability classification.
//
// The interior drift vector a = (a1, a2) is computed under the stationary
// distribution of the interior block sum; boundary drifts a^{(1)}_1, a^{(2)}_2
// come from the stationary distributions of the two axis boundary chains.
// The four-case table:
//   a1 < 0, a2 < 0:            positive recurrent iff a^{(1)}_1 < 0 and
//                              a^{(2)}_2 < 0; transient if either is > 0
//   a1 >= 0, a2 < 0 (a != 0):  positive recurrent iff a^{(1)}_1 < 0
//   a1 < 0, a2 >= 0 (a != 0):  positive recurrent iff a^{(2)}_2 < 0
//   a1 >= 0, a2 >= 0 (a != 0): transient
// Values with |.| <= drift_zero_tol count as zero; whenever the table then
// needs a strict sign it cannot certify, the result is "indeterminate".
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbd2d/model.hpp"
#include "qbd2d/tolerances.hpp"
#include "qbd2d/types.hpp"

namespace qbd2d {

// Stationary probability row vector of an irreducible stochastic matrix
// (Perron left eigenvector normalized to sum 1).
RowVector stationary_of(const Matrix& P, const Tolerances& tol = {});

// Interior mean drift (a1, a2) under the stationary distribution of the
// interior block sum:
//   a1 = pi (-A_{-1,*}(1) + A_{1,*}(1)) 1,   a2 symmetric.
std::pair<double, double> drift_interior(const ModelSpec& m,
                                         const Tolerances& tol = {});

// Boundary drift a^{(1)}_1 (axis = 1): the mean x1-increment under the
// stationary distribution of the x1-axis boundary chain, a one-dimensional
// QBD whose level is x2 (boundary blocks A1, interior blocks A_{*,j}(1)).
// Well-defined when that level process drifts down, i.e. when the interior
// a2 < 0.  axis = 2 is symmetric.  Throws DomainError when the prerequisite
// drift sign does not hold.
double boundary_drift(const ModelSpec& m, int axis, const Tolerances& tol = {});

// Convergence metadata of one auxiliary rate-matrix solve.
struct BoundaryQbdMeta {
  int axis = 0;           // which boundary chain
  long iterations = 0;    // rate-matrix fixed-point iterations
  double residual = 0.0;  // rate-matrix fixed-point residual
  double spr_R = 0.0;     // spectral radius of the rate matrix
};

struct DriftReport {
  double a12_1 = 0.0;  // interior drift, coordinate 1
  double a12_2 = 0.0;  // interior drift, coordinate 2
  std::optional<double> a1_1;  // boundary drift along x1-axis (if computed)
  std::optional<double> a2_2;  // boundary drift along x2-axis (if computed)
  std::string classification;  // "positive_recurrent" / "transient" /
                               // "indeterminate"
  std::vector<BoundaryQbdMeta> boundary_qbd_meta;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

DriftReport classify_stability(const ModelSpec& m, const Tolerances& tol = {});

}  // namespace qbd2d
