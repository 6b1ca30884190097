// Shared helpers for the test suite: fixture paths and in-code scalar model
// construction for the drift-sign classification table.
#pragma once

#include <cmath>
#include <string>

#include "qbd2d/model.hpp"

inline std::string fixture_path(const std::string& name) {
  return std::string(QBD2D_FIXTURE_DIR) + "/" + name;
}

inline qbd2d::ModelSpec load_fixture(const std::string& name) {
  return qbd2d::load_model(fixture_path(name));
}

#define CHECK_NEAR(a, b, tol) CHECK(std::abs((a) - (b)) <= (tol))
#define REQUIRE_NEAR(a, b, tol) REQUIRE(std::abs((a) - (b)) <= (tol))

namespace tu {

// Scalar (s0 = 1) model from transition rates; every family's self-loop
// absorbs the remaining probability.
//   interior: up/down along each coordinate
//   A1 (x1-axis): x1-up, x1-down, x2-up
//   A2 (x2-axis): x2-up, x2-down, x1-up
//   A0 (origin):  x1-up, x2-up
inline qbd2d::ModelSpec scalar_model(double i_up1, double i_down1, double i_up2,
                                     double i_down2, double b1_up1,
                                     double b1_down1, double b1_up2,
                                     double b2_up2, double b2_down2,
                                     double b2_up1, double o_up1, double o_up2) {
  using qbd2d::ModelSpec;
  ModelSpec m = ModelSpec::zero(1);
  auto set = [](qbd2d::Matrix& M, double v) { M(0, 0) = v; };
  set(m.Aint(1, 0), i_up1);
  set(m.Aint(-1, 0), i_down1);
  set(m.Aint(0, 1), i_up2);
  set(m.Aint(0, -1), i_down2);
  set(m.Aint(0, 0), 1.0 - i_up1 - i_down1 - i_up2 - i_down2);
  set(m.Ab1(1, 0), b1_up1);
  set(m.Ab1(-1, 0), b1_down1);
  set(m.Ab1(0, 1), b1_up2);
  set(m.Ab1(0, 0), 1.0 - b1_up1 - b1_down1 - b1_up2);
  set(m.Ab2(0, 1), b2_up2);
  set(m.Ab2(0, -1), b2_down2);
  set(m.Ab2(1, 0), b2_up1);
  set(m.Ab2(0, 0), 1.0 - b2_up2 - b2_down2 - b2_up1);
  set(m.Aorg(1, 0), o_up1);
  set(m.Aorg(0, 1), o_up2);
  set(m.Aorg(0, 0), 1.0 - o_up1 - o_up2);
  return m;
}

// The nine stability-table models.  Cases 1-8 exercise the four sign
// quadrants of the interior drift with both boundary-drift outcomes where the
// table consults one; case 9 is the zero-drift model.
//   1: (-,-) inward boundaries            -> positive_recurrent
//   2: (-,-) outward x1-axis chain        -> transient
//   3: (-,-) outward x2-axis chain        -> transient
//   4: (+,-) wall-hugging x1-axis chain   -> positive_recurrent
//   5: (+,-) outward x1-axis chain        -> transient
//   6: (-,+) wall-hugging x2-axis chain   -> positive_recurrent
//   7: (-,+) outward x2-axis chain        -> transient
//   8: (+,+)                              -> transient
//   9: zero interior drift                -> indeterminate
inline qbd2d::ModelSpec stability_case(int n) {
  switch (n) {
    case 1:
      return scalar_model(0.2, 0.3, 0.2, 0.3, 0.2, 0.3, 0.2, 0.2, 0.3, 0.2,
                          0.2, 0.2);
    case 2:
      return scalar_model(0.2, 0.3, 0.2, 0.3, 0.55, 0.05, 0.1, 0.2, 0.3, 0.2,
                          0.2, 0.2);
    case 3:
      return scalar_model(0.2, 0.3, 0.2, 0.3, 0.2, 0.3, 0.2, 0.55, 0.05, 0.1,
                          0.2, 0.2);
    case 4:
      return scalar_model(0.3, 0.2, 0.2, 0.3, 0.02, 0.68, 0.1, 0.2, 0.3, 0.2,
                          0.2, 0.2);
    case 5:
      return scalar_model(0.3, 0.2, 0.2, 0.3, 0.3, 0.2, 0.2, 0.2, 0.3, 0.2,
                          0.2, 0.2);
    case 6:
      return scalar_model(0.2, 0.3, 0.3, 0.2, 0.2, 0.3, 0.2, 0.02, 0.68, 0.1,
                          0.2, 0.2);
    case 7:
      return scalar_model(0.2, 0.3, 0.3, 0.2, 0.2, 0.3, 0.2, 0.3, 0.2, 0.2,
                          0.2, 0.2);
    case 8:
      return scalar_model(0.3, 0.2, 0.3, 0.2, 0.3, 0.2, 0.2, 0.3, 0.2, 0.2,
                          0.2, 0.2);
    case 9:
      return scalar_model(0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25,
                          0.25, 0.25, 0.25, 0.25);
    default:
      throw std::runtime_error("no such stability case");
  }
}

}  // namespace tu
