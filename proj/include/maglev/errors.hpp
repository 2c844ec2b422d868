#pragma once

#include <stdexcept>
#include <string>

namespace maglev {

/// A queried quantity left its admissible interval [lo, hi].
class BoundsError : public std::domain_error {
 public:
  BoundsError(const std::string& what_arg, double value, double lo, double hi)
      : std::domain_error(what_arg), value_(value), lo_(lo), hi_(hi) {}

  double value() const { return value_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double value_, lo_, hi_;
};

/// The simulated air gap left the physical validity window; carries the
/// offending state so callers can report where the run blew up.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what_arg, double z, double zdot, double current)
      : std::runtime_error(what_arg), z_(z), zdot_(zdot), current_(current) {}

  double z() const { return z_; }
  double zdot() const { return zdot_; }
  double current() const { return current_; }

 private:
  double z_, zdot_, current_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what_arg, int line)
      : std::runtime_error(what_arg + " (line " + std::to_string(line) + ")"), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

class InfeasibleEquilibriumError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class UnstabilizableModelError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class MetricError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace maglev
