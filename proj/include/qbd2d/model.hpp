// Block specification of a discrete-time two-dimensional quasi-birth-and-death
// (2D-QBD) process, JSON loading/saving, structural validation, and the
// matrix Laurent-polynomial evaluators everything downstream is built on.
//
// The chain lives on Z+^2 x {0..s0-1}.  Away from the boundaries a step moves
// each lattice coordinate by at most one; the transition probabilities are
// collected in s0 x s0 blocks indexed by the displacement:
//
//   A[i][j]   interior blocks,          i, j in {-1, 0, 1}
//   A1[i][j]  x1-axis boundary (l = 0), i in {-1,0,1}, j in {0, 1}
//   A2[i][j]  x2-axis boundary (k = 0), i in {0, 1},   j in {-1, 0, 1}
//   A0[i][j]  origin (k = l = 0),       i, j in {0, 1}
//
// Each family must be stochastic: its blocks sum to a stochastic matrix.
#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbd2d/tolerances.hpp"
#include "qbd2d/types.hpp"

namespace qbd2d {

struct ModelSpec {
  int s0 = 0;

  // Storage is index-shifted: first index i+1 (or i), second j+1 (or j),
  // matching the displacement ranges documented above.
  std::array<std::array<Matrix, 3>, 3> A;    // A[i+1][j+1]
  std::array<std::array<Matrix, 2>, 3> A1;   // A1[i+1][j]
  std::array<std::array<Matrix, 3>, 2> A2;   // A2[i][j+1]
  std::array<std::array<Matrix, 2>, 2> A0;   // A0[i][j]

  // Displacement-indexed accessors.
  const Matrix& Aint(int i, int j) const { return A[i + 1][j + 1]; }
  Matrix& Aint(int i, int j) { return A[i + 1][j + 1]; }
  const Matrix& Ab1(int i, int j) const { return A1[i + 1][j]; }
  Matrix& Ab1(int i, int j) { return A1[i + 1][j]; }
  const Matrix& Ab2(int i, int j) const { return A2[i][j + 1]; }
  Matrix& Ab2(int i, int j) { return A2[i][j + 1]; }
  const Matrix& Aorg(int i, int j) const { return A0[i][j]; }
  Matrix& Aorg(int i, int j) { return A0[i][j]; }

  // Allocates all blocks as s0 x s0 zero matrices.
  static ModelSpec zero(int s0);

  // The same process with the roles of the two lattice coordinates
  // exchanged.  Every quantity attached to coordinate 2 of the original
  // model equals the coordinate-1 quantity of the swapped model, which lets
  // one implementation serve both directions.
  ModelSpec swapped() const;

  // Block sums A_{*,*}, A^(1)_{*,*}, A^(2)_{*,*}, A^(0)_{*,*}.
  Matrix sum_interior() const;
  Matrix sum_b1() const;
  Matrix sum_b2() const;
  Matrix sum_origin() const;
};

// ---------------------------------------------------------------------------
// JSON I/O.  Schema:
//   { "s0": int,
//     "A":  {"i,j": [[...]], ...},   keys over {-1,0,1}^2
//     "A1": {"i,j": ...},            keys over {-1,0,1} x {0,1}
//     "A2": {"i,j": ...},            keys over {0,1} x {-1,0,1}
//     "A0": {"i,j": ...} }           keys over {0,1}^2
// Matrices are row-major nested arrays.  Absent blocks default to zero.
// ---------------------------------------------------------------------------
ModelSpec model_from_json(const nlohmann::json& j);
ModelSpec load_model(const std::string& path);
nlohmann::json model_to_json(const ModelSpec& m);

// ---------------------------------------------------------------------------
// Validation.
// ---------------------------------------------------------------------------
struct ValidationReport {
  bool stochasticity_ok = false;
  // (check name, "pass" / "fail" / "indeterminate")
  std::vector<std::pair<std::string, std::string>> irreducibility_checks;
  std::string distinct_eigenvalue_check;  // "pass" / "fail"
  std::vector<std::string> messages;

  // True when nothing failed outright.  "indeterminate" entries pass with a
  // warning; they mark properties of the infinite lattice that finite checks
  // cannot certify.
  bool ok() const;

  nlohmann::json to_json() const;
};

// Checks stochasticity of the four block families, irreducibility and
// aperiodicity of the interior block-sum digraph and of the level-truncated
// boundary chains, runs a finite reachability scan on the folded lattice
// [0,K]^2, and probes eigenvalue distinctness of the level-descent matrix at
// parameter 1.
ValidationReport validate(const ModelSpec& m, const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Laurent evaluators.  Index convention:
//   A_star(j, z)    = sum_i A[i][j] z^i     ("A_{*,j}(z)": z on the first
//                                            displacement, second fixed)
//   A_rowstar(i, w) = sum_j A[i][j] w^j     ("A_{i,*}(w)")
// and likewise for the boundary families.  All are s0 x s0 matrices.
// ---------------------------------------------------------------------------
template <typename T>
using MatrixT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
MatrixT<T> eval_A_star(const ModelSpec& m, int j, T z) {
  MatrixT<T> r = m.Aint(-1, j).cast<T>() / z + m.Aint(0, j).cast<T>() +
                 m.Aint(1, j).cast<T>() * z;
  return r;
}

template <typename T>
MatrixT<T> eval_A_rowstar(const ModelSpec& m, int i, T w) {
  MatrixT<T> r = m.Aint(i, -1).cast<T>() / w + m.Aint(i, 0).cast<T>() +
                 m.Aint(i, 1).cast<T>() * w;
  return r;
}

// C(z,w) = sum_{i,j} A[i][j] z^i w^j.
template <typename T>
MatrixT<T> eval_C(const ModelSpec& m, T z, T w) {
  MatrixT<T> r = MatrixT<T>::Zero(m.s0, m.s0);
  const T zp[3] = {T(1) / z, T(1), z};
  const T wp[3] = {T(1) / w, T(1), w};
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) r += m.Aint(i, j).cast<T>() * (zp[i + 1] * wp[j + 1]);
  return r;
}

// Boundary-family analogues: C0, C1 (x1-axis), C2 (x2-axis).
Matrix eval_C0(const ModelSpec& m, double z, double w);
Matrix eval_C1(const ModelSpec& m, double z, double w);
Matrix eval_C2(const ModelSpec& m, double z, double w);

// A^(1)_{*,j}(z) = sum_i A1[i][j] z^i  (j in {0,1}).
Matrix eval_A1_star(const ModelSpec& m, int j, double z);
// A^(2)_{*,j}(z) = sum_{i in {0,1}} A2[i][j] z^i  (j in {-1,0,1}).
Matrix eval_A2_star(const ModelSpec& m, int j, double z);
// A^(0)_{*,j}(z) = sum_{i in {0,1}} A0[i][j] z^i  (j in {0,1}).
Matrix eval_A0_star(const ModelSpec& m, int j, double z);
// A^(2)_{i,*}(w) = sum_j A2[i][j] w^j  (i in {0,1}).
Matrix eval_A2_rowstar(const ModelSpec& m, int i, double w);

// Matrix-argument versions used by the boundary generating-function
// identities:
//   C1(z, X)    = A^(1)_{*,0}(z) + A^(1)_{*,1}(z) X
//   C0(z, X)    = A^(0)_{*,0}(z) + A^(0)_{*,1}(z) X
//   Chat2(z, X) = sum_{j in {-1,0,1}} A^(2)_{*,j}(z) X^(j+1)
Matrix eval_C1_X(const ModelSpec& m, double z, const Matrix& X);
Matrix eval_C0_X(const ModelSpec& m, double z, const Matrix& X);
Matrix eval_Chat2_X(const ModelSpec& m, double z, const Matrix& X);

// L(z,w) = z w (C(z,w) - I); entire in (z,w), its w-roots at fixed z split
// into the eigenvalues of the level-descent matrix and the reciprocals of the
// nonzero eigenvalues of the level-ascent matrix.
Matrix eval_L(const ModelSpec& m, double z, double w);

// ---------------------------------------------------------------------------
// Transition enumeration on the (optionally truncated) lattice.
//
// Calls fn(k2, l2, j2, p) for every transition out of state (k, l, j) with
// probability p > 0.  When cap >= 0, moves that would leave [0,cap]^2 are
// folded into the self-transition (reflecting truncation), which keeps the
// truncated chain stochastic.  With cap < 0 the enumeration is on the full
// lattice.
// ---------------------------------------------------------------------------
void for_each_transition(const ModelSpec& m, int k, int l, int j, int cap,
                         const std::function<void(int, int, int, double)>& fn);

}  // namespace qbd2d
