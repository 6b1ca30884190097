// Command-line front end: validates models, classifies stability, samples the
// convergence-region boundary, solves the parametrized matrix equations, runs
// the decay-rate pipeline, and cross-checks it against the truncated-lattice
// oracle.  Exit codes: 0 success, 2 validation/parse failure, 3 numerical
// failure.
#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "qbd2d/decay.hpp"
#include "qbd2d/drift.hpp"
#include "qbd2d/matrix_eq.hpp"
#include "qbd2d/model.hpp"
#include "qbd2d/oracle.hpp"
#include "qbd2d/spectral.hpp"
#include "qbd2d/tolerances.hpp"
#include "qbd2d/types.hpp"

namespace {

using nlohmann::json;
using namespace qbd2d;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

struct Options {
  std::string model_path;
  std::string kind = "G1";
  double z = 1.0;
  int n = 101;     // curve sample count
  int N = 0;       // oracle truncation (0 = command default / skip)
  std::string out;
  std::string format;  // "", "json", "csv"
  std::vector<std::string> tol_kv;
  bool verbose = false;
};

// --tol key=value pairs; unknown keys and malformed values are parse errors.
Tolerances parse_tolerances(const std::vector<std::string>& kvs) {
  Tolerances tol;
  for (const std::string& kv : kvs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ModelError("--tol expects key=value, got \"" + kv + "\"");
    const std::string key = kv.substr(0, eq);
    double value = 0.0;
    try {
      size_t used = 0;
      value = std::stod(kv.substr(eq + 1), &used);
      if (eq + 1 + used != kv.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ModelError("--tol " + key + ": cannot parse value \"" +
                       kv.substr(eq + 1) + "\"");
    }
    tol.set(key, value);  // throws ModelError on unknown key
  }
  return tol;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw ModelError("cannot open output file: " + out_path);
  os << text;
}

void emit_json(const json& j, const std::string& out_path) {
  emit(j.dump(2) + "\n", out_path);
}

json matrix_to_json(const Matrix& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int c = 0; c < M.cols(); ++c) row.push_back(M(i, c));
    rows.push_back(row);
  }
  return rows;
}

double spectral_radius(const Matrix& M) {
  return M.eigenvalues().cwiseAbs().maxCoeff();
}

void note(const Options& opt, const std::string& msg) {
  if (opt.verbose) std::cerr << "[qbd2d] " << msg << "\n";
}

// Shared front door: load and structurally validate the model.  Returns the
// model on success; on validation failure prints diagnostics and exits with
// the validation code via the returned flag.
ModelSpec load_validated(const Options& opt, const Tolerances& tol,
                         ValidationReport* report_out = nullptr) {
  ModelSpec m = load_model(opt.model_path);
  const ValidationReport rep = validate(m, tol);
  if (report_out) *report_out = rep;
  if (!rep.ok()) {
    for (const auto& msg : rep.messages) std::cerr << "validation: " << msg << "\n";
    throw ModelError("model failed validation: " + opt.model_path);
  }
  note(opt, "model validated: " + opt.model_path);
  return m;
}

json solve_to_json(const MatrixSolution& sol) {
  json j;
  j["kind"] = sol.kind;
  j["z"] = sol.z;
  j["matrix"] = matrix_to_json(sol.M);
  j["residual"] = sol.residual;
  j["iterations"] = sol.iterations;
  j["edge_rule"] = sol.edge_rule;
  j["spectral_radius"] = spectral_radius(sol.M);
  return j;
}

MatrixSolution dispatch_solve(const ModelSpec& m, const std::string& kind,
                              double z, const Tolerances& tol) {
  if (kind == "G1") return solve_G1(m, z, tol);
  if (kind == "R1") return solve_R1(m, z, tol);
  if (kind == "G2") return solve_G2(m, z, tol);
  if (kind == "R2") return solve_R2(m, z, tol);
  throw ModelError("unknown matrix kind: " + kind);
}

// ---------------------------------------------------------------------------
// Commands.
// ---------------------------------------------------------------------------

int cmd_validate(const Options& opt, const Tolerances& tol) {
  const ModelSpec m = load_model(opt.model_path);
  const ValidationReport rep = validate(m, tol);
  json j = rep.to_json();
  j["tolerances"] = tol.to_json();
  emit_json(j, opt.out);
  return rep.ok() ? kExitOk : kExitValidation;
}

int cmd_stability(const Options& opt, const Tolerances& tol) {
  const ModelSpec m = load_validated(opt, tol);
  json j = classify_stability(m, tol).to_json();
  j["tolerances"] = tol.to_json();
  emit_json(j, opt.out);
  return kExitOk;
}

int cmd_curves(const Options& opt, const Tolerances& tol) {
  const ModelSpec m = load_validated(opt, tol);
  const auto samples = sample_curve(m, opt.n, tol);
  note(opt, "sampled " + std::to_string(samples.size()) + " boundary points");
  if (opt.format == "json") {
    json arr = json::array();
    for (const auto& s : samples)
      arr.push_back({{"s1", s.s1},
                     {"s2_lower", s.s2_lower},
                     {"s2_upper", s.s2_upper}});
    json j;
    j["samples"] = arr;
    j["tolerances"] = tol.to_json();
    emit_json(j, opt.out);
  } else {
    emit(curve_to_csv(samples), opt.out);
  }
  return kExitOk;
}

int cmd_solve(const Options& opt, const Tolerances& tol) {
  const ModelSpec m = load_validated(opt, tol);
  json j = solve_to_json(dispatch_solve(m, opt.kind, opt.z, tol));
  j["tolerances"] = tol.to_json();
  emit_json(j, opt.out);
  return kExitOk;
}

int cmd_decay(const Options& opt, const Tolerances& tol) {
  const ModelSpec m = load_validated(opt, tol);
  emit_json(analyze_decay(m, tol).to_json(tol), opt.out);
  return kExitOk;
}

// Oracle verification block shared by `verify` and `report`: decay pipeline
// vs truncated-lattice estimates, plus the boundary-identity residual at
// z = min(1, 0.9 r1) and the membership-proxy margins used to justify it.
json verify_block(const ModelSpec& m, const DecayReport& rep, int N,
                  const Options& opt, const Tolerances& tol) {
  const TruncatedDistribution dist = truncated_stationary(m, N, tol);
  note(opt, "oracle: " + std::to_string(dist.solver_iterations) +
                " sweeps, residual " + std::to_string(dist.residual));
  const TailFit f1 = tail_fit(dist, 1, 0, 0, tol);
  const TailFit f2 = tail_fit(dist, 2, 0, 0, tol);

  json j;
  j["N"] = N;
  j["oracle_residual"] = dist.residual;
  j["oracle_sweeps"] = dist.solver_iterations;
  j["decay"] = {{"type_class", rep.type_class}, {"subcase", rep.subcase},
                {"r1", rep.r1},                 {"r2", rep.r2},
                {"alpha1", rep.alpha1},         {"alpha2", rep.alpha2}};
  j["fit1"] = f1.to_json();
  j["fit2"] = f2.to_json();
  j["relative_error_r1"] = std::abs(f1.r_hat - rep.r1) / rep.r1;
  j["relative_error_r2"] = std::abs(f2.r_hat - rep.r2) / rep.r2;
  j["alpha1_gap"] = f1.alpha_hat - rep.alpha1;
  j["alpha2_gap"] = f2.alpha_hat - rep.alpha2;

  const double z_key = std::min(1.0, 0.9 * rep.r1);
  const int K = std::min(60, N);
  j["key_expression"] = {{"z", z_key},
                         {"K", K},
                         {"residual", key_expression_residual(m, dist, z_key,
                                                              K, tol)}};
  // Domain-membership proxy for the identity's z: distance to the decay-rate
  // estimates of the true domain boundary, flagged when within 5%.
  const double zeta_lo = zeta2(m, z_key, tol).lower;
  const double margin =
      std::min(1.0 - z_key / rep.r1, 1.0 - zeta_lo / rep.r2);
  j["d1_proxy"] = {{"z", z_key},
                   {"zeta2_lower_at_z", zeta_lo},
                   {"r1_bound", rep.r1},
                   {"r2_bound", rep.r2},
                   {"margin", margin},
                   {"near_boundary", margin < 0.05}};
  return j;
}

int cmd_verify(const Options& opt, const Tolerances& tol) {
  const ModelSpec m = load_validated(opt, tol);
  const DecayReport rep = analyze_decay(m, tol);
  const int N = opt.N > 0 ? opt.N : 80;
  json j = verify_block(m, rep, N, opt, tol);
  j["warnings"] = rep.warnings;
  j["tolerances"] = tol.to_json();
  emit_json(j, opt.out);
  return kExitOk;
}

int cmd_report(const Options& opt, const Tolerances& tol) {
  ValidationReport vrep;
  const ModelSpec m = load_validated(opt, tol, &vrep);
  json j;
  j["validation"] = vrep.to_json();
  j["stability"] = classify_stability(m, tol).to_json();

  // Sections that require more than validation degrade to an error note
  // rather than failing the whole report (e.g. a transient model still gets
  // its stability section).
  try {
    json arr = json::array();
    for (const auto& s : sample_curve(m, opt.n, tol))
      arr.push_back({{"s1", s.s1},
                     {"s2_lower", s.s2_lower},
                     {"s2_upper", s.s2_upper}});
    j["curves"] = arr;
  } catch (const GeometryError& e) {
    j["curves"] = {{"error", e.what()}};
  }

  try {
    json mats;
    for (const char* kind : {"G1", "R1", "G2", "R2"})
      mats[kind] = solve_to_json(dispatch_solve(m, kind, 1.0, tol));
    j["matrices"] = mats;
  } catch (const DomainError& e) {
    j["matrices"] = {{"error", e.what()}};
  }

  try {
    const DecayReport rep = analyze_decay(m, tol);
    j["decay"] = rep.to_json(tol);
    j["oracle_verify"] =
        opt.N > 0 ? verify_block(m, rep, opt.N, opt, tol) : json();
  } catch (const ModelError& e) {
    j["decay"] = {{"error", e.what()}};
    j["oracle_verify"] = json();
  } catch (const GeometryError& e) {
    j["decay"] = {{"error", e.what()}};
    j["oracle_verify"] = json();
  }

  j["tolerances"] = tol.to_json();
  emit_json(j, opt.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Numerical toolkit for discrete-time two-dimensional "
      "quasi-birth-and-death processes: stability classification, "
      "convergence-region geometry, parametrized G/R matrices, directional "
      "decay rates with exact asymptotics, and a truncated-lattice oracle."};
  app.require_subcommand(1);

  Options opt;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--model", opt.model_path, "Model JSON file")
        ->required();
    sub->add_option("--out", opt.out, "Write output here instead of stdout");
    sub->add_option("--format", opt.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--tol", opt.tol_kv,
                    "Tolerance override key=value (repeatable)");
    sub->add_flag("--verbose", opt.verbose, "Progress notes on stderr");
    return sub;
  };

  add_common(app.add_subcommand("validate", "Structural model validation"));
  add_common(app.add_subcommand("stability", "Mean-drift classification"));
  CLI::App* curves =
      add_common(app.add_subcommand("curves", "Sample the region boundary"));
  curves->add_option("--n", opt.n, "Number of grid points")
      ->check(CLI::Range(2, 100000));
  CLI::App* solve =
      add_common(app.add_subcommand("solve", "Solve one matrix equation"));
  solve->add_option("--z", opt.z, "Level parameter")->required();
  solve->add_option("--kind", opt.kind, "Which equation")
      ->check(CLI::IsMember({"G1", "R1", "G2", "R2"}));
  add_common(app.add_subcommand("decay", "Full decay-rate pipeline"));
  CLI::App* verify = add_common(
      app.add_subcommand("verify", "Cross-check decay rates with the oracle"));
  verify->add_option("--N", opt.N, "Oracle truncation level")
      ->check(CLI::Range(10, 100000));
  CLI::App* report = add_common(
      app.add_subcommand("report", "Bundle every analysis in one JSON"));
  report->add_option("--n", opt.n, "Curve grid points")
      ->check(CLI::Range(2, 100000));
  report->add_option("--N", opt.N,
                     "Oracle truncation level (omit to skip the oracle)")
      ->check(CLI::Range(10, 100000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    const Tolerances tol = parse_tolerances(opt.tol_kv);
    if (!opt.format.empty() && opt.format == "csv" &&
        !app.got_subcommand("curves"))
      throw ModelError("--format csv is only available for `curves`");

    if (app.got_subcommand("validate")) return cmd_validate(opt, tol);
    if (app.got_subcommand("stability")) return cmd_stability(opt, tol);
    if (app.got_subcommand("curves")) return cmd_curves(opt, tol);
    if (app.got_subcommand("solve")) return cmd_solve(opt, tol);
    if (app.got_subcommand("decay")) return cmd_decay(opt, tol);
    if (app.got_subcommand("verify")) return cmd_verify(opt, tol);
    if (app.got_subcommand("report")) return cmd_report(opt, tol);
    std::cerr << "error: no command selected\n";
    return kExitValidation;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const GeometryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}
