// Micro-benchmark of the two data-parallel kernels against their serial
// reference implementations: the truncated-lattice stationary sweep and the
// boundary-curve sampler.  Also verifies that the parallel results are
// bitwise identical to the serial ones, which is what makes them safe to use
// inside byte-stable reports.
//
// Usage: bench_kernels [model.json] [N] [curve points]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qbd2d/model.hpp"
#include "qbd2d/oracle.hpp"
#include "qbd2d/spectral.hpp"

using namespace qbd2d;

namespace {

// Default workload: the coordinate-symmetric scalar random walk with
// reflecting boundary folds (product-form stationary distribution).
ModelSpec default_model() {
  ModelSpec m = ModelSpec::zero(1);
  auto set = [](Matrix& M, double v) { M(0, 0) = v; };
  set(m.Aint(1, 0), 0.2);
  set(m.Aint(-1, 0), 0.3);
  set(m.Aint(0, 1), 0.2);
  set(m.Aint(0, -1), 0.3);
  set(m.Ab1(-1, 0), 0.3);
  set(m.Ab1(0, 0), 0.3);
  set(m.Ab1(1, 0), 0.2);
  set(m.Ab1(0, 1), 0.2);
  set(m.Ab2(0, -1), 0.3);
  set(m.Ab2(0, 0), 0.3);
  set(m.Ab2(0, 1), 0.2);
  set(m.Ab2(1, 0), 0.2);
  set(m.Aorg(0, 0), 0.6);
  set(m.Aorg(1, 0), 0.2);
  set(m.Aorg(0, 1), 0.2);
  return m;
}

template <typename F>
double time_s(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int run(int argc, char** argv) {
  const ModelSpec m = argc > 1 ? load_model(argv[1]) : default_model();
  const int N = argc > 2 ? std::atoi(argv[2]) : 60;
  const int points = argc > 3 ? std::atoi(argv[3]) : 201;

#ifdef _OPENMP
  std::printf("openmp: enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("openmp: disabled (serial build)\n");
#endif
  std::printf("model: s0 = %d, oracle N = %d, curve points = %d\n\n", m.s0, N,
              points);

  // Kernel 1: stationary sweep over the truncated lattice.
  TruncatedDistribution serial_d, parallel_d;
  const double t_ser = time_s([&] {
    serial_d = truncated_stationary(m, N, Tolerances{}, false);
  });
  const double t_par = time_s([&] {
    parallel_d = truncated_stationary(m, N, Tolerances{}, true);
  });
  double max_diff = 0.0;
  for (int i = 0; i < serial_d.nu.size(); ++i)
    max_diff = std::max(max_diff,
                        std::abs(serial_d.nu[i] - parallel_d.nu[i]));
  std::printf("stationary sweep  (%ld sweeps, residual %.3e)\n",
              serial_d.solver_iterations, serial_d.residual);
  std::printf("  serial   %8.3f s\n", t_ser);
  std::printf("  parallel %8.3f s   speedup %.2fx   max |diff| %.3g %s\n\n",
              t_par, t_ser / t_par, max_diff,
              max_diff == 0.0 ? "(bitwise identical)" : "(MISMATCH)");

  // Kernel 2: boundary-curve sampling.
  std::vector<CurveSample> cs_ser, cs_par;
  const double c_ser =
      time_s([&] { cs_ser = sample_curve(m, points, Tolerances{}, false); });
  const double c_par =
      time_s([&] { cs_par = sample_curve(m, points, Tolerances{}, true); });
  bool same = cs_ser.size() == cs_par.size();
  for (size_t i = 0; same && i < cs_ser.size(); ++i)
    same = cs_ser[i].s1 == cs_par[i].s1 &&
           cs_ser[i].s2_lower == cs_par[i].s2_lower &&
           cs_ser[i].s2_upper == cs_par[i].s2_upper;
  std::printf("curve sampling    (%zu grid points)\n", cs_ser.size());
  std::printf("  serial   %8.3f s\n", c_ser);
  std::printf("  parallel %8.3f s   speedup %.2fx   %s\n", c_par,
              c_ser / c_par,
              same ? "(bitwise identical)" : "(MISMATCH)");

  return (max_diff == 0.0 && same) ? 0 : 1;
}

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "bench_kernels: %s\n", e.what());
    return 2;
  }
}
