#ifndef HGD_ERRORS_HPP
#define HGD_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hgd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands built over different variable tables.
class VarTableMismatch : public Error {
 public:
  VarTableMismatch() : Error("variable-table mismatch") {}
};

class UnknownVariable : public Error {
 public:
  explicit UnknownVariable(const std::string& name)
      : Error("unknown variable '" + name + "'") {}
};

class DivisionByZero : public Error {
 public:
  DivisionByZero() : Error("division by zero rational function") {}
};

/// |den(point)| fell below the guard threshold.
class DenominatorNearZero : public Error {
 public:
  DenominatorNearZero(std::string denominator, std::vector<double> point,
                      double value)
      : Error("denominator " + denominator + " is near zero (" +
              std::to_string(value) + ")"),
        denominator_(std::move(denominator)),
        point_(std::move(point)),
        value_(value) {}

  const std::string& denominator() const { return denominator_; }
  const std::vector<double>& point() const { return point_; }
  double value() const { return value_; }

 private:
  std::string denominator_;
  std::vector<double> point_;
  double value_;
};

class ZeroOperator : public Error {
 public:
  ZeroOperator() : Error("leading term of the zero operator") {}
};

/// The staircase of the initial ideal is unbounded.
class InfiniteRank : public Error {
 public:
  InfiniteRank() : Error("ideal is not zero-dimensional (infinite holonomic rank)") {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A transport segment approaches the singular locus.
class SingularCrossing : public Error {
 public:
  SingularCrossing(const DenominatorNearZero& cause, double t)
      : Error("transport crosses the singular guard of " + cause.denominator() +
              " at path parameter " + std::to_string(t)),
        denominator_(cause.denominator()),
        point_(cause.point()),
        t_(t) {}

  const std::string& denominator() const { return denominator_; }
  const std::vector<double>& point() const { return point_; }
  double parameter() const { return t_; }

 private:
  std::string denominator_;
  std::vector<double> point_;
  double t_;
};

class StepBudgetExceeded : public Error {
 public:
  explicit StepBudgetExceeded(std::size_t steps)
      : Error("transport needs more than " + std::to_string(steps) + " steps") {}
};

class SingularBlocked : public Error {
 public:
  SingularBlocked(std::string denominator)
      : Error("no admissible direction avoids the singular locus (" +
              denominator + ")"),
        denominator_(std::move(denominator)) {}
  const std::string& denominator() const { return denominator_; }

 private:
  std::string denominator_;
};

class NonDescent : public Error {
 public:
  NonDescent() : Error("line search found no decrease") {}
};

class ToleranceNotReached : public Error {
 public:
  using Error::Error;
};

class EmptySample : public Error {
 public:
  EmptySample() : Error("empty sample") {}
};

class NonUnitPoint : public Error {
 public:
  NonUnitPoint(std::size_t row, double norm)
      : Error("sample row " + std::to_string(row) + " has norm " +
              std::to_string(norm) + ", expected 1"),
        row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

}  // namespace hgd

#endif  // HGD_ERRORS_HPP
