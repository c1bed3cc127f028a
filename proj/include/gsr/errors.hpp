#pragma once

#include <stdexcept>
#include <string>

namespace gsr {

/// Bad arguments: dimension mismatches, out-of-range parameters, non-finite input.
class InputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or unusable data files.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed to reach its accuracy target.
class NumericalError : public std::runtime_error {
public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

namespace detail {

inline void require(bool ok, const char* msg) {
  if (!ok) throw InputError(msg);
}

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InputError(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                     std::to_string(b) + ")");
  }
}

}  // namespace detail
}  // namespace gsr
