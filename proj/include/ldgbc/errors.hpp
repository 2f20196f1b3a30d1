#pragma once

#include <stdexcept>
#include <string>

namespace ldgbc {

/// Raised for malformed input: bad refinement counts, non-convex polygons,
/// inconsistent dimensions, inverted bounds.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A linear system could not be factorized or solved to tolerance.
class SingularSystem : public std::runtime_error {
 public:
  SingularSystem(const std::string& what, long pivot = -1)
      : std::runtime_error(what), pivot_(pivot) {}
  long pivot() const noexcept { return pivot_; }

 private:
  long pivot_;
};

/// The active-set iteration hit its cap before two consecutive sets agreed.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad run configuration (unknown keys, unreadable file, invalid sequences).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An output file could not be written or an input file could not be parsed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ldgbc
