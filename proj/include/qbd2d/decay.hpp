// Directional geometric decay rates and exact tail asymptotics of the
// boundary stationary masses.
//
// The boundary kernels psi1(z) = spr C1(z, G1(z)) and psi2(w) (symmetric)
// decide how far each boundary generating function stays finite.  Their
// critical points theta/eta on the convergence-region boundary classify the
// model into Type I/II/III, which selects the decay-rate pair (r1, r2) and
// the power correction alpha in
//     h_i(k) = k^(alpha_i - 1) r_i^(-k).
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbd2d/model.hpp"
#include "qbd2d/spectral.hpp"
#include "qbd2d/tolerances.hpp"
#include "qbd2d/types.hpp"

namespace qbd2d {

// psi1(z) = spr(C1(z, G1(z))) with C1(z,X) = A1_{*,0}(z) + A1_{*,1}(z) X,
// for z in [z1_min, z1_max].  psi2 is the symmetric quantity of the other
// boundary (computed on the coordinate-swapped model).
double psi1(const ModelSpec& m, double z, const Tolerances& tol = {});
double psi2(const ModelSpec& m, double w, const Tolerances& tol = {});

// Critical points, all on log scale:
//   theta1_c = max{ s in [s1_min, s1_max] : psi1(e^s) <= 1 }
//   theta2_c = log zeta2_lower(e^theta1_c),  theta2_bar_c = log zeta2_upper
//   eta2_c, eta1_c, eta1_bar_c symmetric (eta2 from psi2, eta1 from zeta1).
struct CriticalPoints {
  double theta1_c = 0.0;
  double theta2_c = 0.0;
  double theta2_bar_c = 0.0;
  double eta1_c = 0.0;
  double eta2_c = 0.0;
  double eta1_bar_c = 0.0;
  double psi1_at_z1max = 0.0;
  double psi2_at_z2max = 0.0;
  SpectralGeometry geo;

  nlohmann::json to_json() const;
};

// Requires a validated, non-degenerate, positive-recurrent model; throws
// ModelError when psi1(1) > 1 or psi2(1) > 1 (inconsistent with stability)
// and GeometryError on degenerate geometry.
CriticalPoints critical_points(const ModelSpec& m, const Tolerances& tol = {});

enum class TypeClass { I, II, III };

std::string to_string(TypeClass t);

// Inequality table with ties at type_tie_tol:
//   Type I:  eta1 < theta1 and theta2 < eta2
//   Type II: eta1 < theta1 and eta2 <= theta2
//   Type III: theta1 <= eta1 and theta2 < eta2
// The doubly-tied corner (both equalities) resolves to Type II with a
// warning appended to *warnings.
TypeClass classify_type(const CriticalPoints& points, const Tolerances& tol = {},
                        std::vector<std::string>* warnings = nullptr);

// (r1, r2) = (e^xi1, e^xi2) with (xi1, xi2) =
//   (theta1, eta2)      for Type I
//   (eta1_bar, eta2)    for Type II
//   (theta1, theta2_bar) for Type III.
std::pair<double, double> decay_rates(const CriticalPoints& points,
                                      TypeClass type_class);

// One axis of the exact-asymptotics table: h(k) = k^(alpha-1) rate^(-k).
struct AxisExponent {
  double rate = 0.0;       // geometric base
  double alpha = 0.0;      // power correction exponent
  bool uses_edge = false;  // true when the base is the extreme point z_i_max
  bool l_flag = false;     // true when alpha depends on the unresolved
                           // integer l (reported as "l unresolved, default 1")
  std::string subcase;     // table row label, e.g. "I.h1.psi>1"
};

// The asymptotics table as a pure function of the classification and the
// three-way comparison signs, enumerable exhaustively in tests:
//   sign_psi1/sign_psi2: sign of psi_i(z_i_max) - 1 (-1, 0, +1)
//   sign_tie: sign of eta2 - theta2 (Type II) or theta1 - eta1 (Type III);
//             ignored for Type I.
// Eleven reachable rows: 3 for h1 under Type I (h2 symmetric in psi2),
// 4 for h1 under Type II (h2 fixed), 4 for h2 under Type III (h1 fixed).
std::pair<AxisExponent, AxisExponent> exponent_table(TypeClass type_class,
                                                     int sign_psi1,
                                                     int sign_psi2,
                                                     int sign_tie);

struct DecayReport {
  std::string type_class;  // "I" / "II" / "III"
  double r1 = 0.0, r2 = 0.0;
  double alpha1 = 0.0, alpha2 = 0.0;
  std::optional<std::string> l_flag1, l_flag2;  // "l unresolved, default 1"
  std::optional<RowVector> prefactor_dir1, prefactor_dir2;
  std::string subcase;  // combined table-row label
  std::vector<std::string> warnings;
  CriticalPoints points;
  AxisExponent h1, h2;

  nlohmann::json to_json(const Tolerances& tol) const;
};

// Full pipeline: critical points -> classification -> rates -> exponent
// table -> prefactor directions where available.  Comparisons of psi_i with
// 1 use psi_eq_rel_tol relative tolerance; values inside the band get both
// neighboring subcases recorded in warnings.
DecayReport analyze_decay(const ModelSpec& m, const Tolerances& tol = {});

// Left Perron eigenvector u^{C1}(r1) of C1(r1, G1(r1)) (axis 1; axis 2 uses
// the swapped model), normalized to unit 1-norm, entrywise positive.
// Available exactly in the pole-dominant subcases:
//   axis 1: (Type I and psi1(z1_max) > 1) or Type III
//   axis 2: (Type I and psi2(z2_max) > 1) or Type II
// Returns std::nullopt otherwise, with the reason in *why_absent.
std::optional<RowVector> prefactor_direction(const ModelSpec& m, int axis,
                                             const Tolerances& tol = {},
                                             std::string* why_absent = nullptr);

}  // namespace qbd2d
