// Perron-Frobenius machinery for the interior transition kernel: the spectral
// radius surface chi(z,w) = spr C(z,w), the convergence region it carves out,
// and the curves zeta that bound it.
//
// chi is log-convex in (log z, log w), equals 1 at (1,1), and the closed
// region Gamma-bar = {chi <= 1} is a compact convex set in (log z, log w)
// coordinates.  Its extreme coordinate values [z1_min, z1_max] x
// [z2_min, z2_max] and its upper/lower boundary sections z2 = zeta(z1) drive
// every decay-rate computation downstream.
#pragma once

#include <string>
#include <vector>

#include "qbd2d/model.hpp"
#include "qbd2d/tolerances.hpp"
#include "qbd2d/types.hpp"

namespace qbd2d {

// Perron root and positive left/right eigenvectors of an (essentially)
// nonnegative irreducible matrix.  Power iteration with a final
// Rayleigh-quotient polish; falls back to a dense eigensolver when the
// iteration stalls (e.g. near-degenerate subdominant gap).
struct PerronTriple {
  double rho = 0.0;
  Vector u;  // left eigenvector,  u^T M = rho u^T, normalized u.sum() == 1
  Vector v;  // right eigenvector, M v = rho v,     normalized u.dot(v) == 1
  double residual = 0.0;
  int iterations = 0;
  bool dense_fallback = false;
};

PerronTriple perron(const Matrix& M, const Tolerances& tol = {});

// Perron triple of C(z, w) for z, w > 0; chi(z,w) = .rho.
PerronTriple chi(const ModelSpec& m, double z, double w,
                 const Tolerances& tol = {});

// Just the spectral radius spr C(z, w).
double chi_value(const ModelSpec& m, double z, double w,
                 const Tolerances& tol = {});

// Extreme coordinate values of Gamma-bar = {(z,w) : chi(z,w) <= 1},
// z, w > 0.  Computed from the per-coordinate section minima
// m1(z) = min_w chi(z,w) (golden-section in log w, convex) by bisecting
// m1(z) = 1 on each side of z = 1, and symmetrically for the second
// coordinate.
struct SpectralGeometry {
  double z1_min = 0.0, z1_max = 0.0;  // extreme first coordinates
  double z2_min = 0.0, z2_max = 0.0;  // extreme second coordinates
  double tolerance = 0.0;             // bisection tolerance actually used
  bool degenerate = false;            // true when an extreme pair collapses
};

SpectralGeometry extreme_points(const ModelSpec& m, const Tolerances& tol = {});

// The two solutions w of chi(z, w) = 1 at fixed z in [z1_min, z1_max]:
// zeta2_lower(z) <= zeta2_upper(z).  At the extreme z the pair coincides at
// the tangency point.  zeta1 is the symmetric object at fixed w.
struct ZetaPair {
  double lower = 0.0;
  double upper = 0.0;
  bool coincident = false;
};

// Throws DomainError when z lies outside [z1_min, z1_max] (checked
// self-containedly via the section minimum m1(z) > 1).
ZetaPair zeta2(const ModelSpec& m, double z, const Tolerances& tol = {});
// Symmetric: the two z-roots of chi(z, w) = 1 at fixed w.
ZetaPair zeta1(const ModelSpec& m, double w, const Tolerances& tol = {});

// Samples the boundary sections of Gamma-bar on a uniform grid in
// s1 = log z over [log z1_min, log z1_max].
struct CurveSample {
  double s1 = 0.0;        // log z
  double s2_lower = 0.0;  // log zeta2_lower(z)
  double s2_upper = 0.0;  // log zeta2_upper(z)
};

// Grid points are independent; with parallel=true they are computed
// multithreaded and merged in grid order (bitwise identical to serial).
std::vector<CurveSample> sample_curve(const ModelSpec& m, int n,
                                      const Tolerances& tol = {},
                                      bool parallel = true);

// CSV serialization with header "s1,s2_lower,s2_upper" (17 significant
// digits, byte-stable).
std::string curve_to_csv(const std::vector<CurveSample>& samples);

}  // namespace qbd2d
