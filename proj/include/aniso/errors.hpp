#pragma once

#include <stdexcept>
#include <string>

namespace aniso {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateElement : public Error {
 public:
  explicit DegenerateElement(const std::string& what) : Error("degenerate element: " + what) {}
};

class EvaluationAtSingularity : public Error {
 public:
  explicit EvaluationAtSingularity(const std::string& what)
      : Error("evaluation at singularity: " + what) {}
};

class SolverDivergence : public Error {
 public:
  explicit SolverDivergence(const std::string& what) : Error("solver divergence: " + what) {}
};

class NonpositiveDiagonal : public Error {
 public:
  explicit NonpositiveDiagonal(const std::string& what) : Error("nonpositive diagonal: " + what) {}
};

class FactorizationFailure : public Error {
 public:
  explicit FactorizationFailure(const std::string& what)
      : Error("factorization failure: " + what) {}
};

// All Hessians vanish; the caller falls back to the identity metric.
class UniformField : public Error {
 public:
  UniformField() : Error("uniform field: every element Hessian is zero") {}
};

class MalformedCsv : public Error {
 public:
  explicit MalformedCsv(const std::string& what) : Error("malformed csv: " + what) {}
};

class MalformedMesh : public Error {
 public:
  explicit MalformedMesh(const std::string& what) : Error("malformed mesh file: " + what) {}
};

}  // namespace aniso
