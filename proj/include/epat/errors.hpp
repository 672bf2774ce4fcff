#pragma once

#include <stdexcept>
#include <string>

namespace epat {

/// Base class for every error raised by the library. `exit_code()` follows the
/// CLI convention: 1 for violated preconditions, 2 for numerical failures.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

/// Fields, traces or configs that do not live on the same grid / axis.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// Invalid configuration (CFL violation, bad option values, ...).
class ConfigError : public Error {
public:
  using Error::Error;
};

/// A documented operation precondition does not hold.
class ContractError : public Error {
public:
  using Error::Error;
};

/// Malformed input file or unparsable specification string.
class FormatError : public Error {
public:
  using Error::Error;
};

/// A normalisation constant vanished (e.g. zero total impedance).
class DegenerateError : public Error {
public:
  using Error::Error;
};

/// Non-finite iterate or residual inside an iterative solver.
class DivergenceError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

namespace detail {
template <class E>
inline void require(bool ok, const std::string &what) {
  if (!ok) throw E(what);
}
} // namespace detail

} // namespace epat
