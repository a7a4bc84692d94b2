#pragma once

#include <stdexcept>
#include <string>

namespace qdilog {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Raised when an argument lands on a pole; (k, l) is the lattice label of
// whichever frame was used for the evaluation.
class PoleError : public Error {
 public:
  PoleError(int k, int l)
      : Error("pole at k=" + std::to_string(k) + ",l=" + std::to_string(l)), k_(k), l_(l) {}
  int k() const { return k_; }
  int l() const { return l_; }

 private:
  int k_;
  int l_;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class AccuracyError : public Error {
 public:
  using Error::Error;
};

class RoutingError : public Error {
 public:
  using Error::Error;
};

class TailError : public Error {
 public:
  using Error::Error;
};

class MismatchError : public Error {
 public:
  using Error::Error;
};

class UnsupportedArg : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class ConventionUnresolved : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qdilog
