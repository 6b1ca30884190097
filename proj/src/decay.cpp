#include "qbd2d/decay.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <tuple>

#include "qbd2d/drift.hpp"
#include "qbd2d/matrix_eq.hpp"

namespace qbd2d {

double psi1(const ModelSpec& m, double z, const Tolerances& tol) {
  const Matrix G = solve_G1(m, z, tol).M;
  return perron(eval_C1_X(m, z, G), tol).rho;
}

double psi2(const ModelSpec& m, double w, const Tolerances& tol) {
  return psi1(m.swapped(), w, tol);
}

namespace {

// Largest s in [0, s_hi] with f(e^s) <= 1, given f(1) <= 1 and f(e^{s_hi}) > 1.
// f is convex in s, so the sub-level set is an interval containing 0.
double upper_crossing(const std::function<double(double)>& f_of_z, double s_hi,
                      double bisect_tol) {
  double lo = 0.0, hi = s_hi;
  while (hi - lo > bisect_tol) {
    const double mid = 0.5 * (lo + hi);
    if (f_of_z(std::exp(mid)) <= 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

int banded_sign(double v, double band) {
  if (v > band) return 1;
  if (v < -band) return -1;
  return 0;
}

struct DirectionalCritical {
  double theta1 = 0.0;   // log of the critical abscissa
  double psi_at_max = 0.0;
};

// theta1 and psi1(z1_max) for the given model orientation.
DirectionalCritical directional_critical(const ModelSpec& m, double z_max,
                                         const Tolerances& tol) {
  DirectionalCritical d;
  const double psi_at_1 = psi1(m, 1.0, tol);
  if (psi_at_1 > 1.0 + 1e-9)
    throw ModelError(
        "boundary kernel exceeds 1 at the unit point (inconsistent with "
        "positive recurrence): psi(1) = " +
        std::to_string(psi_at_1));
  d.psi_at_max = psi1(m, z_max, tol);
  const double s_max = std::log(z_max);
  if (d.psi_at_max <= 1.0) {
    d.theta1 = s_max;
  } else {
    d.theta1 = upper_crossing([&](double z) { return psi1(m, z, tol); }, s_max,
                              tol.zeta_bisect_tol);
  }
  return d;
}

}  // namespace

CriticalPoints critical_points(const ModelSpec& m, const Tolerances& tol) {
  const SpectralGeometry geo = extreme_points(m, tol);
  if (geo.degenerate)
    throw GeometryError(
        "critical points undefined: degenerate convergence region");

  CriticalPoints pts;
  pts.geo = geo;

  const DirectionalCritical d1 = directional_critical(m, geo.z1_max, tol);
  pts.theta1_c = d1.theta1;
  pts.psi1_at_z1max = d1.psi_at_max;
  const ZetaPair zp2 = zeta2(m, std::exp(pts.theta1_c), tol);
  pts.theta2_c = std::log(zp2.lower);
  pts.theta2_bar_c = std::log(zp2.upper);

  const ModelSpec sw = m.swapped();
  const DirectionalCritical d2 = directional_critical(sw, geo.z2_max, tol);
  pts.eta2_c = d2.theta1;
  pts.psi2_at_z2max = d2.psi_at_max;
  const ZetaPair zp1 = zeta1(m, std::exp(pts.eta2_c), tol);
  pts.eta1_c = std::log(zp1.lower);
  pts.eta1_bar_c = std::log(zp1.upper);
  return pts;
}

std::string to_string(TypeClass t) {
  switch (t) {
    case TypeClass::I:
      return "I";
    case TypeClass::II:
      return "II";
    default:
      return "III";
  }
}

TypeClass classify_type(const CriticalPoints& points, const Tolerances& tol,
                        std::vector<std::string>* warnings) {
  const bool strict1 = points.theta1_c - points.eta1_c > tol.type_tie_tol;
  const bool strict2 = points.eta2_c - points.theta2_c > tol.type_tie_tol;
  if (strict1 && strict2) return TypeClass::I;
  if (strict1) return TypeClass::II;
  if (strict2) return TypeClass::III;
  if (warnings)
    warnings->push_back(
        "critical points are tied in both coordinates (doubly-tied corner); "
        "reported as Type II");
  return TypeClass::II;
}

std::pair<double, double> decay_rates(const CriticalPoints& points,
                                      TypeClass type_class) {
  switch (type_class) {
    case TypeClass::I:
      return {std::exp(points.theta1_c), std::exp(points.eta2_c)};
    case TypeClass::II:
      return {std::exp(points.eta1_bar_c), std::exp(points.eta2_c)};
    default:
      return {std::exp(points.theta1_c), std::exp(points.theta2_bar_c)};
  }
}

std::pair<AxisExponent, AxisExponent> exponent_table(TypeClass type_class,
                                                     int sign_psi1,
                                                     int sign_psi2,
                                                     int sign_tie) {
  auto pole = [](const std::string& label, double alpha) {
    AxisExponent e;
    e.alpha = alpha;
    e.uses_edge = false;
    e.subcase = label;
    return e;
  };
  auto edge = [](const std::string& label, double alpha, bool l_flag = false) {
    AxisExponent e;
    e.alpha = alpha;
    e.uses_edge = true;
    e.l_flag = l_flag;
    e.subcase = label;
    return e;
  };
  // Branch-point axis of Type I, selected by the sign of psi_i(z_i_max) - 1.
  auto type1_axis = [&](int sign_psi, const std::string& axis) {
    if (sign_psi > 0) return pole("I." + axis + ".psi>1", 1.0);
    if (sign_psi == 0) return edge("I." + axis + ".psi=1", 0.5);
    return edge("I." + axis + ".psi<1", -0.5, true);  // alpha = (1-2l)/2, l=1
  };
  // Tied axis of Type II/III: strict inequality gives a plain pole; an exact
  // tie promotes the order by the psi-sign at the extreme point.
  auto tied_axis = [&](int sign_psi, const std::string& prefix) {
    if (sign_tie != 0) return pole(prefix + ".strict", 1.0);
    if (sign_psi > 0) return pole(prefix + ".tie.psi>1", 2.0);
    if (sign_psi == 0) return edge(prefix + ".tie.psi=1", 1.0);
    return edge(prefix + ".tie.psi<1", 0.5);
  };

  switch (type_class) {
    case TypeClass::I:
      return {type1_axis(sign_psi1, "h1"), type1_axis(sign_psi2, "h2")};
    case TypeClass::II:
      return {tied_axis(sign_psi1, "II.h1"), pole("II.h2", 1.0)};
    default:
      return {pole("III.h1", 1.0), tied_axis(sign_psi2, "III.h2")};
  }
}

namespace {

std::optional<RowVector> pole_direction(const ModelSpec& m, double r,
                                        const Tolerances& tol) {
  const Matrix G = solve_G1(m, r, tol).M;
  const PerronTriple pt = perron(eval_C1_X(m, r, G), tol);
  RowVector u = pt.u.transpose();
  u /= u.cwiseAbs().sum();
  return u;
}

std::vector<double> to_std(const RowVector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

DecayReport analyze_decay(const ModelSpec& m, const Tolerances& tol) {
  const DriftReport drift = classify_stability(m, tol);
  if (drift.classification != "positive_recurrent")
    throw ModelError(
        "decay analysis requires a positive-recurrent model (stability "
        "classification: " +
        drift.classification + ")");

  DecayReport rep;
  rep.points = critical_points(m, tol);
  const TypeClass type = classify_type(rep.points, tol, &rep.warnings);
  rep.type_class = to_string(type);

  const int sign_psi1 =
      banded_sign(rep.points.psi1_at_z1max - 1.0, tol.psi_eq_rel_tol);
  const int sign_psi2 =
      banded_sign(rep.points.psi2_at_z2max - 1.0, tol.psi_eq_rel_tol);
  auto band_warning = [&](const char* name, double value) {
    std::ostringstream os;
    os << name << " = " << value
       << " lies within tolerance of 1; the strict-sign and tangent subcases "
          "are both admissible (reporting the tangent row)";
    rep.warnings.push_back(os.str());
  };
  if (sign_psi1 == 0 && std::abs(rep.points.psi1_at_z1max - 1.0) > 0.0)
    band_warning("psi1(z1_max)", rep.points.psi1_at_z1max);
  if (sign_psi2 == 0 && std::abs(rep.points.psi2_at_z2max - 1.0) > 0.0)
    band_warning("psi2(z2_max)", rep.points.psi2_at_z2max);

  int sign_tie = 0;
  if (type == TypeClass::II)
    sign_tie = banded_sign(rep.points.eta2_c - rep.points.theta2_c,
                           tol.type_tie_tol);
  else if (type == TypeClass::III)
    sign_tie = banded_sign(rep.points.theta1_c - rep.points.eta1_c,
                           tol.type_tie_tol);

  std::tie(rep.r1, rep.r2) = decay_rates(rep.points, type);
  auto [h1, h2] = exponent_table(type, sign_psi1, sign_psi2, sign_tie);
  h1.rate = h1.uses_edge ? rep.points.geo.z1_max : rep.r1;
  h2.rate = h2.uses_edge ? rep.points.geo.z2_max : rep.r2;
  rep.h1 = h1;
  rep.h2 = h2;
  rep.alpha1 = h1.alpha;
  rep.alpha2 = h2.alpha;
  if (h1.l_flag) rep.l_flag1 = "l unresolved, default 1";
  if (h2.l_flag) rep.l_flag2 = "l unresolved, default 1";
  rep.subcase = h1.subcase + "+" + h2.subcase;

  const bool pole1 = (type == TypeClass::I && sign_psi1 > 0) ||
                     type == TypeClass::III;
  const bool pole2 = (type == TypeClass::I && sign_psi2 > 0) ||
                     type == TypeClass::II;
  if (pole1) {
    rep.prefactor_dir1 = pole_direction(m, rep.r1, tol);
  } else {
    rep.warnings.push_back(
        "prefactor direction for axis 1 unavailable: dominant singularity is "
        "not a simple pole (subcase " +
        h1.subcase + ")");
  }
  if (pole2) {
    rep.prefactor_dir2 = pole_direction(m.swapped(), rep.r2, tol);
  } else {
    rep.warnings.push_back(
        "prefactor direction for axis 2 unavailable: dominant singularity is "
        "not a simple pole (subcase " +
        h2.subcase + ")");
  }
  return rep;
}

std::optional<RowVector> prefactor_direction(const ModelSpec& m, int axis,
                                             const Tolerances& tol,
                                             std::string* why_absent) {
  if (axis != 1 && axis != 2)
    throw ModelError("prefactor_direction: axis must be 1 or 2");
  const DecayReport rep = analyze_decay(m, tol);
  const auto& dir = (axis == 1) ? rep.prefactor_dir1 : rep.prefactor_dir2;
  if (dir.has_value()) return dir;
  if (why_absent) {
    const auto& h = (axis == 1) ? rep.h1 : rep.h2;
    *why_absent =
        "dominant singularity for axis " + std::to_string(axis) +
        " is not a simple pole (subcase " + h.subcase + ")";
  }
  return std::nullopt;
}

nlohmann::json CriticalPoints::to_json() const {
  return nlohmann::json{{"theta1_c", theta1_c},
                        {"theta2_c", theta2_c},
                        {"theta2_bar_c", theta2_bar_c},
                        {"eta1_c", eta1_c},
                        {"eta2_c", eta2_c},
                        {"eta1_bar_c", eta1_bar_c},
                        {"psi1_at_z1max", psi1_at_z1max},
                        {"psi2_at_z2max", psi2_at_z2max},
                        {"geometry",
                         {{"z1_min", geo.z1_min},
                          {"z1_max", geo.z1_max},
                          {"z2_min", geo.z2_min},
                          {"z2_max", geo.z2_max},
                          {"degenerate", geo.degenerate}}}};
}

nlohmann::json DecayReport::to_json(const Tolerances& tol) const {
  nlohmann::json j;
  j["type_class"] = type_class;
  j["r1"] = r1;
  j["r2"] = r2;
  j["alpha1"] = alpha1;
  j["alpha2"] = alpha2;
  j["l_flag1"] = l_flag1 ? nlohmann::json(*l_flag1) : nlohmann::json();
  j["l_flag2"] = l_flag2 ? nlohmann::json(*l_flag2) : nlohmann::json();
  j["prefactor_dir1"] = prefactor_dir1 ? nlohmann::json(to_std(*prefactor_dir1))
                                       : nlohmann::json();
  j["prefactor_dir2"] = prefactor_dir2 ? nlohmann::json(to_std(*prefactor_dir2))
                                       : nlohmann::json();
  j["subcase"] = subcase;
  j["warnings"] = warnings;
  j["critical_points"] = points.to_json();
  auto axis_json = [](const AxisExponent& h) {
    return nlohmann::json{{"rate", h.rate},
                          {"alpha", h.alpha},
                          {"uses_edge", h.uses_edge},
                          {"l_flag", h.l_flag},
                          {"subcase", h.subcase}};
  };
  j["h1"] = axis_json(h1);
  j["h2"] = axis_json(h2);
  j["tolerances"] = tol.to_json();
  return j;
}

}  // namespace qbd2d
