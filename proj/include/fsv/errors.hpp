#pragma once

#include <stdexcept>
#include <string>

namespace fsv {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntervalError : Error {
  using Error::Error;
};

struct DivisionByZeroInterval : Error {
  DivisionByZeroInterval() : Error("interval division by an interval containing 0") {}
};

struct DomainError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t pos)
      : Error(msg + " at position " + std::to_string(pos)), position(pos) {}
  std::size_t position;
};

struct UnknownSymbol : Error {
  explicit UnknownSymbol(const std::string& name)
      : Error("unknown symbol '" + name + "'"), symbol(name) {}
  std::string symbol;
};

struct NumericallySingular : Error {
  using Error::Error;
};

struct EigSolverFailed : Error {
  using Error::Error;
};

struct HyperbolicityViolated : Error {
  using Error::Error;
};

struct FamilyValidationFailed : Error {
  FamilyValidationFailed(int idx, const std::string& msg)
      : Error("eigenpair " + std::to_string(idx) + ": " + msg), index(idx) {}
  int index;
};

struct ConfigError : Error {
  using Error::Error;
};

// Pipeline failures, naming the offending cell.
struct CellFailed : Error {
  CellFailed(std::size_t cell, const std::string& stage, const std::string& msg)
      : Error("cell " + std::to_string(cell) + " failed at " + stage + ": " + msg), cell(cell), stage(stage) {}
  std::size_t cell;
  std::string stage;
};

struct InclusionFailed : CellFailed {
  InclusionFailed(std::size_t cell, const std::string& msg)
      : CellFailed(cell, "inclusion", msg + " (shrink the seed cells or enlarge eta)") {}
};

struct ConeFailed : CellFailed {
  ConeFailed(std::size_t cell, const std::string& kind, const std::string& msg) : CellFailed(cell, kind + " cone", msg) {}
};

struct GlueFailed : Error {
  GlueFailed(std::size_t a, std::size_t b, const std::string& msg)
      : Error("cells " + std::to_string(a) + " and " + std::to_string(b) + " do not glue: " + msg), a(a), b(b) {}
  std::size_t a, b;
};

}  // namespace fsv
