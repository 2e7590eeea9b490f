#pragma once

#include <stdexcept>
#include <string>

namespace hprox {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (mismatched bases, bad sizes).
class ContractError : public Error {
public:
  using Error::Error;
};

/// A point left the manifold or the open set the objective lives on.
class DomainError : public Error {
public:
  using Error::Error;
};

/// A closed form would overflow the floating-point range.
class RangeError : public Error {
public:
  using Error::Error;
};

/// An algorithm parameter violates its admissible range.
class ParameterError : public Error {
public:
  using Error::Error;
};

/// An iterate violated the level-set guard f(p) <= f(q).
class LevelSetError : public Error {
public:
  using Error::Error;
};

/// Configuration could not be parsed or failed validation.
class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace hprox
