#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cavity {

/// Bad or inconsistent user configuration. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Mesh deformation or classification failure (tangled cells, roof above the
/// domain top). CLI exit code 4.
class GeometryError : public std::runtime_error {
public:
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

/// NaN/Inf encountered during assembly or evaluation.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Base for solver failures. CLI exit code 3.
class SolverError : public std::runtime_error {
public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Direct factorization hit a (numerically) singular matrix.
class SingularMatrixError : public SolverError {
public:
  explicit SingularMatrixError(const std::string& what) : SolverError(what) {}
};

/// The traction boundary condition leaves a rigid mode uncontrolled
/// (e.g. no attached edges under a Neumann top boundary).
class NullSpaceError : public SolverError {
public:
  explicit NullSpaceError(const std::string& what) : SolverError(what) {}
};

/// Newton iteration exhausted max_iter; carries the residual history.
class NonconvergenceError : public SolverError {
public:
  NonconvergenceError(const std::string& what, std::vector<double> history)
      : SolverError(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

}  // namespace cavity
