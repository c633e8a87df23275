#pragma once

#include <stdexcept>
#include <string>

namespace pafnet {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// -- expression graph --------------------------------------------------------
class UnboundVariable : public Error {
public:
  explicit UnboundVariable(const std::string& name)
      : Error("unbound variable: " + name) {}
};

class DomainViolation : public Error {
public:
  DomainViolation(const std::string& op, double value)
      : Error("domain violation in op '" + op + "' at value " + std::to_string(value)) {}
};

class UnsupportedOp : public Error {
public:
  explicit UnsupportedOp(const std::string& op)
      : Error("no derivative rule registered for op '" + op + "'") {}
};

// -- activations / network ---------------------------------------------------
class ArityMismatch : public Error {
public:
  explicit ArityMismatch(const std::string& what) : Error(what) {}
};

class ShapeMismatch : public Error {
public:
  explicit ShapeMismatch(const std::string& what) : Error(what) {}
};

// -- physics -----------------------------------------------------------------
class EmptyBatch : public Error {
public:
  explicit EmptyBatch(const std::string& term)
      : Error("loss term '" + term + "' has positive weight but no points") {}
};

class InvalidRange : public Error {
public:
  explicit InvalidRange(const std::string& what) : Error(what) {}
};

// -- optimizers --------------------------------------------------------------
class LengthMismatch : public Error {
public:
  explicit LengthMismatch(const std::string& what) : Error(what) {}
};

class LineSearchFailed : public Error {
public:
  explicit LineSearchFailed(const std::string& what) : Error(what) {}
};

class NonFiniteLoss : public Error {
public:
  explicit NonFiniteLoss(const std::string& what) : Error(what) {}
};

// -- reference solvers -------------------------------------------------------
class Overdamped : public Error {
public:
  Overdamped(double delta, double omega0)
      : Error("oscillator is not underdamped: delta=" + std::to_string(delta) +
              " >= omega0=" + std::to_string(omega0)) {}
};

class UnstableStep : public Error {
public:
  explicit UnstableStep(const std::string& what) : Error(what) {}
};

class NonPositiveD : public Error {
public:
  NonPositiveD(double x, double value)
      : Error("diffusion coefficient is not positive: D(" + std::to_string(x) +
              ") = " + std::to_string(value)) {}
};

class NoConvergence : public Error {
public:
  explicit NoConvergence(const std::string& what) : Error(what) {}
};

class RangeOutsideOracle : public Error {
public:
  explicit RangeOutsideOracle(const std::string& what) : Error(what) {}
};

// -- metrics / harness -------------------------------------------------------
class DegenerateTargets : public Error {
public:
  DegenerateTargets() : Error("targets have zero variance; R^2 undefined") {}
};

class ZeroTruth : public Error {
public:
  ZeroTruth() : Error("relative error undefined for zero truth value") {}
};

class SpecHashMismatch : public Error {
public:
  explicit SpecHashMismatch(const std::string& what) : Error(what) {}
};

class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

class IoError : public Error {
public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace pafnet
