#pragma once

#include <stdexcept>
#include <string>

namespace bellext {

// Global comparison slack for probabilities, moments and operator identities.
inline constexpr double kTolerance = 1e-9;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownVariable : public Error {
 public:
  explicit UnknownVariable(const std::string& name)
      : Error("unknown variable '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class InvalidDistribution : public Error {
 public:
  using Error::Error;
};

class IncompleteMoments : public Error {
 public:
  using Error::Error;
};

class NotRealizable : public Error {
 public:
  using Error::Error;
};

class InvalidMoments : public Error {
 public:
  using Error::Error;
};

class DomainMismatch : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonHermitian : public Error {
 public:
  using Error::Error;
};

class InvalidObservable : public Error {
 public:
  using Error::Error;
};

class NonCommutingContext : public Error {
 public:
  using Error::Error;
};

class NotATree : public Error {
 public:
  using Error::Error;
};

class InvalidGraph : public Error {
 public:
  using Error::Error;
};

class DegenerateParameters : public Error {
 public:
  using Error::Error;
};

// A classical model failed to reproduce a prediction it was built to match.
class VerificationFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace bellext
