// Parametrized matrix quadratic equations of the censored level process.
//
// For z in [z1_min, z1_max] the level-descent matrix G1(z) is the minimal
// nonnegative solution of
//     X = A_{*,-1}(z) + A_{*,0}(z) X + A_{*,1}(z) X^2,
// and the level-ascent matrix R1(z) solves
//     X = A_{*,1}(z) + X A_{*,0}(z) + X^2 A_{*,-1}(z).
// Both come with H1(z) = A_{*,0}(z) + A_{*,1}(z) G1(z), N1(z) = (I-H1)^{-1},
// and the Wiener-Hopf style factorization
//     I - C(z, w) = (w^{-1} I - R1(z)) (I - H1(z)) (w I - G1(z)) / w-powers,
// which ties the w-spectrum of C(z, .) to the spectra of G1 and R1.
// The index-2 quantities (G2, R2) are the same objects for the model with the
// two lattice coordinates swapped.
#pragma once

#include <string>
#include <vector>

#include "qbd2d/model.hpp"
#include "qbd2d/tolerances.hpp"
#include "qbd2d/types.hpp"

namespace qbd2d {

struct MatrixSolution {
  double z = 0.0;
  Matrix M;                 // the solution itself
  double residual = 0.0;    // fixed-point residual in max norm
  long iterations = 0;
  std::string kind;         // "G1" / "R1" / "G2" / "R2"
  bool edge_rule = false;   // true when the near-edge stopping rule applied
};

// Minimal nonnegative solutions by monotone fixed-point iteration from zero.
// Throws DomainError outside [z1_min, z1_max] (resp. the swapped interval).
// Past the iteration cap the best iterate is returned with the achieved
// increment recorded in `residual` (near z1_max convergence is sublinear, so
// a partial result with an honest residual is more useful than an error).
MatrixSolution solve_G1(const ModelSpec& m, double z, const Tolerances& tol = {});
MatrixSolution solve_R1(const ModelSpec& m, double z, const Tolerances& tol = {});
MatrixSolution solve_G2(const ModelSpec& m, double z, const Tolerances& tol = {});
MatrixSolution solve_R2(const ModelSpec& m, double z, const Tolerances& tol = {});

// G1, R1, H1, N1 at one z together with the maximal elementwise residual of
// the three-factor identity above over a grid of w values (default grid
// when w_grid is empty: {0.5, 0.8, 1.0, 1.2, 1.5}).
struct FactorizationBundle {
  double z = 0.0;
  Matrix G1, R1, H1, N1;
  double factorization_residual_max = 0.0;
};

FactorizationBundle factorization_bundle(const ModelSpec& m, double z,
                                         const std::vector<double>& w_grid = {},
                                         const Tolerances& tol = {});

// Full eigensystem of G1(z): eigenvalues sorted by ascending modulus (the
// top eigenvalue, equal to zeta2_lower(z) on the real interval, comes last)
// with right/left eigenvector matrices and the minimal pairwise eigenvalue
// gap (used to detect the defective/branch-point regime near z1_max).
struct Eigensystem {
  CVector values;
  CMatrix right;
  CMatrix left;
  double min_gap = 0.0;
};

Eigensystem g1_eigensystem(const ModelSpec& m, double z, const Tolerances& tol = {});

// Square-root branch behaviour of spr G1(z) at the right edge z1_max:
// alpha_at_star = zeta2_lower(z1_max) from the spectral path, the finite
// difference ratios (alpha_at_star - spr G1(z1_max - delta)) / sqrt(delta)
// for the probe deltas, and the predicted scaling constant
// sqrt(2 / (-zeta1''(w*))) at the tangency w* (second derivative by central
// differences with one Richardson extrapolation level).
struct BranchProbeSample {
  double delta = 0.0;
  double spr_g1 = 0.0;
  double ratio = 0.0;  // (alpha_at_star - spr_g1) / sqrt(delta)
};

struct BranchProbe {
  double z_star = 0.0;          // z1_max
  double alpha_at_star = 0.0;   // zeta2_lower(z1_max)
  double scaling_constant = 0.0;
  double zeta1_second_derivative = 0.0;
  std::vector<BranchProbeSample> samples;
};

BranchProbe branch_probe(const ModelSpec& m,
                         const std::vector<double>& deltas = {1e-6, 1e-5, 1e-4},
                         const Tolerances& tol = {});

// Matrix-level view of the same branch point: the difference quotient
// (G1(z1_max) - G1(z1_max - delta)) / sqrt(delta) tends to a rank-one
// nonnegative matrix proportional to N1(z1_max) v^{R1} u^{G1}_top, where
// v^{R1} is the right Perron vector of R1(z1_max) and u^{G1}_top the left
// eigenvector of G1(z1_max) at its top eigenvalue.
struct RankOneProbe {
  double delta = 0.0;
  Matrix matrix_ratio;              // the finite-difference quotient
  double rank_gap = 0.0;            // sigma_2 / sigma_1 of matrix_ratio
  Matrix reference;                 // N1 v^{R1} u^{G1}_top (unnormalized)
  double direction_distance = 0.0;  // 1 - |cos| between vec(ratio), vec(ref)
  double min_entry = 0.0;           // most negative entry of matrix_ratio
};

RankOneProbe rank_one_derivative_probe(const ModelSpec& m, double delta = 1e-6,
                                       const Tolerances& tol = {});

// All w-roots of det L(z, w) at fixed z via companion matrix of the scalar
// polynomial det L (degree <= 2 s0), coefficients recovered from evaluations
// at 2 s0 + 1 points.  Returned sorted by ascending modulus.
std::vector<Complex> detL_roots(const ModelSpec& m, double z,
                                const Tolerances& tol = {});

}  // namespace qbd2d
