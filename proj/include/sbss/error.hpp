#pragma once

#include <stdexcept>
#include <string>

namespace sbss {

// Parse and usage problems: malformed config files, bad CLI values.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem and serialization problems.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failures and contract violations inside library operations.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sbss
