#pragma once

#include <stdexcept>
#include <string>

namespace dyadic {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class StepBudgetExceeded : public Error {
 public:
  StepBudgetExceeded(double reached, long steps)
      : Error("step budget of " + std::to_string(steps) +
              " exhausted at t = " + std::to_string(reached)),
        reached_time(reached) {}
  double reached_time;
};

class StiffnessFailure : public Error {
 public:
  StiffnessFailure(double at, double h)
      : Error("step size underflow (h = " + std::to_string(h) + ") at t = " +
              std::to_string(at) +
              "; reduce the number of shells or use the stabilized method"),
        time(at),
        step(h) {}
  double time;
  double step;
};

class GammaUndefined : public Error {
 public:
  explicit GammaUndefined(double radicand)
      : Error("x1^2 - eps * sum(a) = " + std::to_string(radicand) +
              " is not positive; eps too large for this x0 and C"),
        radicand(radicand) {}
  double radicand;
};

}  // namespace dyadic
