#include "qbd2d/tolerances.hpp"

#include <utility>

#include "qbd2d/types.hpp"

namespace qbd2d {

namespace {

// Central key -> member mapping so set(), keys() and to_json() cannot drift
// apart.
struct Entry {
  const char* key;
  double Tolerances::* field;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      {"stochastic_tol", &Tolerances::stochastic_tol},
      {"power_iter_tol", &Tolerances::power_iter_tol},
      {"golden_t_tol", &Tolerances::golden_t_tol},
      {"extreme_bisect_tol", &Tolerances::extreme_bisect_tol},
      {"zeta_bisect_tol", &Tolerances::zeta_bisect_tol},
      {"coincident_rel_tol", &Tolerances::coincident_rel_tol},
      {"degenerate_geometry_tol", &Tolerances::degenerate_geometry_tol},
      {"g_solver_tol", &Tolerances::g_solver_tol},
      {"g_edge_residual_tol", &Tolerances::g_edge_residual_tol},
      {"g_edge_band", &Tolerances::g_edge_band},
      {"drift_zero_tol", &Tolerances::drift_zero_tol},
      {"distinct_eig_gap_tol", &Tolerances::distinct_eig_gap_tol},
      {"psi_eq_rel_tol", &Tolerances::psi_eq_rel_tol},
      {"type_tie_tol", &Tolerances::type_tie_tol},
      {"fd_step", &Tolerances::fd_step},
      {"oracle_residual_tol", &Tolerances::oracle_residual_tol},
      {"fit_r2_min", &Tolerances::fit_r2_min},
  };
  return table;
}

// Integer-valued knobs, stored separately because their members are not
// doubles.
struct IntEntry {
  const char* key;
  long Tolerances::* field;
};

const std::vector<IntEntry>& int_entries() {
  static const std::vector<IntEntry> table = {
      {"power_iter_max", &Tolerances::power_iter_max},
      {"g_solver_max_iter", &Tolerances::g_solver_max_iter},
      {"oracle_max_sweeps", &Tolerances::oracle_max_sweeps},
  };
  return table;
}

constexpr const char* kReachScanKey = "reach_scan_level";

}  // namespace

void Tolerances::set(const std::string& key, double value) {
  for (const auto& e : entries()) {
    if (key == e.key) {
      this->*e.field = value;
      return;
    }
  }
  for (const auto& e : int_entries()) {
    if (key == e.key) {
      this->*e.field = static_cast<long>(value);
      return;
    }
  }
  if (key == kReachScanKey) {
    reach_scan_level = static_cast<int>(value);
    return;
  }
  throw ModelError("unknown tolerance key: " + key);
}

const std::vector<std::string>& Tolerances::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> v;
    for (const auto& e : entries()) v.push_back(e.key);
    for (const auto& e : int_entries()) v.push_back(e.key);
    v.push_back(kReachScanKey);
    return v;
  }();
  return k;
}

nlohmann::json Tolerances::to_json() const {
  nlohmann::json j;
  for (const auto& e : entries()) j[e.key] = this->*e.field;
  for (const auto& e : int_entries()) j[e.key] = this->*e.field;
  j[kReachScanKey] = reach_scan_level;
  return j;
}

}  // namespace qbd2d
