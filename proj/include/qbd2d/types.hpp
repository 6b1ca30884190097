// Common linear-algebra aliases and error types shared across the toolkit.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace qbd2d {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;           // column vector
using RowVector = Eigen::RowVectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

// Malformed or inconsistent model input (parse error, negative entry,
// dimension mismatch).
struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// An argument lies outside the mathematical domain of the operation
// (e.g. a level parameter outside the interval where the matrix equation
// has a nonnegative solution).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative solver hit its iteration cap before reaching tolerance.
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// The spectral geometry is unusable (degenerate region, bracket failure).
struct GeometryError : std::runtime_error {
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qbd2d
