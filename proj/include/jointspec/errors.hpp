#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace jointspec {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class EigensolverError : public Error {
 public:
  using Error::Error;
};

/// A1 failed the normality test where a spectral resolution was required.
class NotNormalError : public Error {
 public:
  using Error::Error;
};

class UnknownEigenvalue : public Error {
 public:
  using Error::Error;
};

/// Two tracked branches could not be told apart along the ladder.
class BranchCollision : public Error {
 public:
  using Error::Error;
};

class NonconvergentError : public Error {
 public:
  using Error::Error;
};

/// An eigenvalue of the matrix lies on (or numerically on) the contour.
class ContourError : public Error {
 public:
  using Error::Error;
};

/// The branch's own eigenvalue cluster is not isolated from the rest.
class SeparationFailure : public Error {
 public:
  using Error::Error;
};

/// A theorem hypothesis needed by a verification is not met (e.g. m_j > 1).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

class InconsistentAssignment : public Error {
 public:
  using Error::Error;
};

class EmptySubspaceError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Component projections grow without bound as t -> 0. Carries the
/// measured norm profile and the fitted power-law exponent.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double exponent,
              std::vector<std::pair<double, double>> profile)
      : Error(what), exponent_(exponent), profile_(std::move(profile)) {}

  double exponent() const noexcept { return exponent_; }
  const std::vector<std::pair<double, double>>& profile() const noexcept {
    return profile_;
  }

 private:
  double exponent_;
  std::vector<std::pair<double, double>> profile_;
};

}  // namespace jointspec
