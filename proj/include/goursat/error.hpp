#ifndef GOURSAT_ERROR_HPP
#define GOURSAT_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace goursat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset()` is the byte offset of the
/// offending token in the source string.
class ParseError : public Error {
 public:
  enum class Kind { Syntax, UnknownIdentifier, VariableOutOfRange, InvalidName };

  ParseError(Kind kind, std::size_t offset, const std::string& what)
      : Error(what + " (at offset " + std::to_string(offset) + ")"),
        kind_(kind),
        offset_(offset) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// ln/sqrt/pow of an out-of-domain argument, or division by zero.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a structural contract (mismatched jet shapes, bad index).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A first partial F_alpha vanishes (|F_alpha| below the regularity threshold).
class RegularityError : public Error {
 public:
  RegularityError(int alpha, double value)
      : Error("regularity violation: |F_" + std::to_string(alpha) + "| = " + std::to_string(value) +
              " below threshold"),
        alpha_(alpha) {}
  /// 1-based index of the vanishing partial.
  int alpha() const noexcept { return alpha_; }

 private:
  int alpha_;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// The envelope constraint has (numerically) zero slope in the parameter.
class SingularEnvelope : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Sampling could not find enough regular points in the requested box.
class SamplingError : public Error {
 public:
  using Error::Error;
};

}  // namespace goursat

#endif  // GOURSAT_ERROR_HPP
