#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lel {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input has the wrong shape or symmetry (non-Hermitian, size mismatch).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// A matrix function or inverse was requested on a (near-)singular operand.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, double eigenvalue)
      : Error(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const { return eigenvalue_; }

 private:
  double eigenvalue_;
};

// Parameter outside the domain of an operation (alpha <= 0, s > 1/2, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

struct ValidationFailure {
  std::string condition;
  int index = -1;
  std::string message;
};

// A state or generator failed a defining condition.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
  explicit ValidationError(std::vector<ValidationFailure> failures);
  const std::vector<ValidationFailure>& failures() const { return failures_; }

 private:
  std::vector<ValidationFailure> failures_;
};

// Time stepping could not keep the state positive.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace lel
