#include "qbd2d/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Eigenvalues>

namespace qbd2d {

namespace {

// Dense Perron data: top-modulus eigenpair of M and M^T, phase-normalized to
// real nonnegative vectors.
PerronTriple perron_dense(const Matrix& M) {
  PerronTriple out;
  out.dense_fallback = true;
  Eigen::EigenSolver<Matrix> es(M), esT(M.transpose());
  const auto& ev = es.eigenvalues();
  int top = 0;
  for (int i = 1; i < ev.size(); ++i)
    if (std::abs(ev[i]) > std::abs(ev[top])) top = i;
  out.rho = ev[top].real();

  auto realize = [](const CVector& x) {
    int big = 0;
    for (int i = 1; i < x.size(); ++i)
      if (std::abs(x[i]) > std::abs(x[big])) big = i;
    CVector y = x / x[big];  // phase fixed: largest entry becomes 1
    Vector r = y.real();
    if (r.sum() < 0) r = -r;
    return r;
  };
  Vector v = realize(es.eigenvectors().col(top));

  const auto& evT = esT.eigenvalues();
  int topT = 0;
  for (int i = 1; i < evT.size(); ++i)
    if (std::abs(evT[i]) > std::abs(evT[topT])) topT = i;
  Vector u = realize(esT.eigenvectors().col(topT));
  out.u = u;
  out.v = v;
  return out;
}

void finalize(PerronTriple& t, const Matrix& M) {
  // Rayleigh-quotient polish: with eigenvector residuals eps_u, eps_v the
  // quotient's error is O(eps_u * eps_v), far below the vector accuracy.
  const double uv = t.u.dot(t.v);
  t.rho = t.u.dot(M * t.v) / uv;
  // Canonical normalization: u sums to 1, u.v = 1.
  t.u /= t.u.sum();
  t.v /= t.u.dot(t.v);
  const double ru = ((t.u.transpose() * M).transpose() - t.rho * t.u)
                        .cwiseAbs()
                        .sum();
  const double rv = (M * t.v - t.rho * t.v).cwiseAbs().sum();
  t.residual = std::max(ru, rv);
}

// Bracketed golden-section minimum of a convex function.
template <typename F>
std::pair<double, double> golden_min(F f, double a, double b, double xtol) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > xtol) {
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
  const double x = (fc < fd) ? c : d;
  return {x, std::min(fc, fd)};
}

// Minimum of t -> chi(z, e^t): bracket by expansion (the section is convex
// and diverges in both directions for a valid bounded region), then
// golden-section.  Returns (t_star, min value).
std::pair<double, double> section_min(const ModelSpec& m, double z,
                                      const Tolerances& tol) {
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
  return golden_min(f, -T, T, tol.golden_t_tol);
}

// sup{z >= 1 : m1(z) <= 1} (dir = +1) or inf{z <= 1 : m1(z) <= 1} (dir = -1)
// by geometric bracketing plus bisection on log z.
double extreme_along(const ModelSpec& m, int dir, const Tolerances& tol) {
  auto inside = [&](double z) {
    return section_min(m, z, tol).second <= 1.0;
  };
  double lo = 0.0;  // log z known inside
  double hi = dir * std::log(2.0);
  int guard = 0;
  while (inside(std::exp(hi))) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 40)
      throw GeometryError(
          "extreme point bracket failure: convergence region appears "
          "unbounded");
  }
  // Invariant: inside(e^lo), !inside(e^hi).
  while (std::abs(std::exp(hi) - std::exp(lo)) > tol.extreme_bisect_tol) {
    const double mid = 0.5 * (lo + hi);
    if (inside(std::exp(mid)))
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

// One-sided root of f(t) = 1 starting from the section minimum t_star
// (f(t_star) < 1, f convex, diverging): expand to bracket, bisect, then two
// secant steps to polish the root to near machine precision.
template <typename F>
double root_from_min(F f, double t_star, int dir, const Tolerances& tol) {
  double step = 0.25;
  double a = t_star, b = t_star + dir * step;
  int guard = 0;
  while (f(b) < 1.0) {
    a = b;
    step *= 2.0;
    b = t_star + dir * step;
    if (++guard > 40)
      throw GeometryError("root bracket failure on a section of the region");
  }
  // Bisection on g(t) = f(t) - 1 with g(a) < 0 <= g(b).
  while (std::abs(b - a) > tol.zeta_bisect_tol) {
    const double mid = 0.5 * (a + b);
    if (f(mid) < 1.0)
      a = mid;
    else
      b = mid;
  }
  // Secant polish.
  double t0 = a, t1 = b;
  double g0 = f(t0) - 1.0, g1 = f(t1) - 1.0;
  for (int it = 0; it < 2; ++it) {
    if (g1 == g0) break;
    const double t2 = t1 - g1 * (t1 - t0) / (g1 - g0);
    if (!std::isfinite(t2)) break;
    t0 = t1;
    g0 = g1;
    t1 = t2;
    g1 = f(t1) - 1.0;
  }
  return t1;
}

ZetaPair zeta_section(const ModelSpec& m, double z, const Tolerances& tol) {
  const auto [t_star, fmin] = section_min(m, z, tol);
  if (fmin > 1.0 + 1e-10)
    throw DomainError(
        "parameter outside the convergence interval: section minimum " +
        std::to_string(fmin) + " exceeds 1");
  ZetaPair out;
  if (fmin >= 1.0 - 1e-10) {
    // Tangency: the two roots have collapsed within root-finding resolution
    // (their separation scales like sqrt(1 - fmin)).
    out.lower = out.upper = std::exp(t_star);
    out.coincident = true;
    return out;
  }
  auto f = [&](double t) { return chi_value(m, z, std::exp(t), tol); };
  const double tl = root_from_min(f, t_star, -1, tol);
  const double tu = root_from_min(f, t_star, +1, tol);
  out.lower = std::exp(tl);
  out.upper = std::exp(tu);
  out.coincident = (out.upper - out.lower) <= tol.coincident_rel_tol * out.upper;
  return out;
}

}  // namespace

PerronTriple perron(const Matrix& M, const Tolerances& tol) {
  const int n = static_cast<int>(M.rows());
  PerronTriple out;
  if (n == 1) {
    out.rho = M(0, 0);
    out.u = Vector::Ones(1);
    out.v = Vector::Ones(1);
    finalize(out, M);
    return out;
  }
  Vector v = Vector::Ones(n) / n;
  Vector u = Vector::Ones(n) / n;
  double rho_prev = 0.0;
  bool converged = false;
  int it = 0;
  for (; it < tol.power_iter_max; ++it) {
    Vector Mv = M * v;
    Vector uM = (u.transpose() * M).transpose();
    const double sv = Mv.sum(), su = uM.sum();
    if (sv <= 0.0 || su <= 0.0) break;  // defect: fall back to dense
    Vector v_next = Mv / sv;
    Vector u_next = uM / su;
    const double rho_est = sv;
    const double dv = (v_next - v).cwiseAbs().maxCoeff();
    const double du = (u_next - u).cwiseAbs().maxCoeff();
    v = v_next;
    u = u_next;
    if (dv < tol.power_iter_tol && du < tol.power_iter_tol &&
        std::abs(rho_est - rho_prev) < tol.power_iter_tol) {
      converged = true;
      break;
    }
    rho_prev = rho_est;
  }
  if (!converged) {
    out = perron_dense(M);
    out.iterations = it;
    finalize(out, M);
    return out;
  }
  out.u = u;
  out.v = v;
  out.iterations = it;
  finalize(out, M);
  return out;
}

PerronTriple chi(const ModelSpec& m, double z, double w,
                 const Tolerances& tol) {
  if (z <= 0.0 || w <= 0.0)
    throw DomainError("chi requires positive arguments");
  return perron(eval_C(m, z, w), tol);
}

double chi_value(const ModelSpec& m, double z, double w,
                 const Tolerances& tol) {
  return chi(m, z, w, tol).rho;
}

SpectralGeometry extreme_points(const ModelSpec& m, const Tolerances& tol) {
  SpectralGeometry g;
  g.tolerance = tol.extreme_bisect_tol;
  // Gradient of chi at (1,1) in log coordinates (= the interior mean drift).
  // When it vanishes, (1,1) is the minimum of the convex surface with
  // chi(1,1) = 1, so {chi <= 1} is exactly the single point (1,1).  Bisection
  // cannot resolve that case -- the section minimum is quadratically flat, so
  // its roots carry O(sqrt(eps)) noise -- hence the analytic snap.
  const PerronTriple p = chi(m, 1.0, 1.0, tol);
  double a1 = 0.0, a2 = 0.0;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) {
      const double mass = p.u.dot(m.Aint(i, j) * p.v);
      a1 += i * mass;
      a2 += j * mass;
    }
  if (std::abs(a1) <= tol.drift_zero_tol && std::abs(a2) <= tol.drift_zero_tol) {
    g.z1_min = g.z1_max = g.z2_min = g.z2_max = 1.0;
    g.degenerate = true;
    return g;
  }
  g.z1_max = extreme_along(m, +1, tol);
  g.z1_min = extreme_along(m, -1, tol);
  const ModelSpec sw = m.swapped();
  g.z2_max = extreme_along(sw, +1, tol);
  g.z2_min = extreme_along(sw, -1, tol);
  g.degenerate = (g.z1_max - g.z1_min < tol.degenerate_geometry_tol) ||
                 (g.z2_max - g.z2_min < tol.degenerate_geometry_tol);
  return g;
}

ZetaPair zeta2(const ModelSpec& m, double z, const Tolerances& tol) {
  return zeta_section(m, z, tol);
}

ZetaPair zeta1(const ModelSpec& m, double w, const Tolerances& tol) {
  return zeta_section(m.swapped(), w, tol);
}

std::vector<CurveSample> sample_curve(const ModelSpec& m, int n,
                                      const Tolerances& tol, bool parallel) {
  if (n < 2) throw ModelError("sample_curve requires n >= 2");
  const SpectralGeometry g = extreme_points(m, tol);
  if (g.z1_max - g.z1_min < tol.degenerate_geometry_tol) {
    // Degenerate region: the boundary collapses to the single point (0,0).
    return {CurveSample{0.0, 0.0, 0.0}};
  }
  const double s_lo = std::log(g.z1_min), s_hi = std::log(g.z1_max);
  std::vector<CurveSample> out(n);
  const auto eval_point = [&](int i) {
    const double s1 = s_lo + (s_hi - s_lo) * i / (n - 1);
    const ZetaPair zp = zeta2(m, std::exp(s1), tol);
    out[i] = CurveSample{s1, std::log(zp.lower), std::log(zp.upper)};
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) eval_point(i);
  } else {
    for (int i = 0; i < n; ++i) eval_point(i);
  }
  return out;
}

std::string curve_to_csv(const std::vector<CurveSample>& samples) {
  std::string out = "s1,s2_lower,s2_upper\n";
  char buf[128];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", s.s1, s.s2_lower,
                  s.s2_upper);
    out += buf;
  }
  return out;
}

}  // namespace qbd2d
