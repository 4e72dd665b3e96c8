#pragma once
// The inviscid dyadic system on a finite set of shells:
//
//   X_n' = k_{n-1} X_{n-1}^2 - k_n X_n X_{n+1},   k_0 = 0,  k_n = 2^(beta n)
//
// truncated at N shells. The missing X_{N+1} is supplied by the closure.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace dyadic {

enum class Closure {
  GalerkinZero,  // X_{N+1} = 0; E_N is conserved exactly
  Mirror,        // X_{N+1} = X_N; energy leaves through the last shell
};

std::string_view closure_name(Closure c);
Closure parse_closure(std::string_view s);

class ModelParams {
 public:
  ModelParams(double beta, std::size_t n_max, Closure closure);

  double beta() const { return beta_; }
  std::size_t n_max() const { return n_max_; }
  Closure closure() const { return closure_; }

  // k_n for 0 <= n <= N+1 (shells are 1-based).
  double k(std::size_t n) const { return k_[n]; }
  std::span<const double> k_sequence() const { return k_; }

  // Value standing in for X_{N+1}.
  double closure_value(std::span<const double> x) const {
    return closure_ == Closure::Mirror ? x.back() : 0.0;
  }

  // Kernel coefficient vectors: F_i = gain[i] X_{i-1}^2 - loss[i] X_i X_{i+1}
  // in 0-based storage (gain[i] = k_i, loss[i] = k_{i+1}).
  std::span<const double> gain() const { return {k_.data(), n_max_}; }
  std::span<const double> loss() const { return {k_.data() + 1, n_max_}; }

  friend bool operator==(const ModelParams& a, const ModelParams& b) {
    return a.beta_ == b.beta_ && a.n_max_ == b.n_max_ && a.closure_ == b.closure_;
  }

 private:
  double beta_;
  std::size_t n_max_;
  Closure closure_;
  std::vector<double> k_;
};

// 2^(beta n), exact when beta*n is an integer.
double dyadic_coefficient(double beta, double n);

// Coefficient of the rescaled system Y_n = 2^((beta-1)n/3) X_n:
//   Y_n' = c_n (Y_{n-1}^2 - 2 Y_n Y_{n+1}),  c_n = 2^((2 beta + 1) n / 3 - (beta + 2) / 3).
double rescaled_coefficient(double beta, std::size_t n);

// Y_n = k_n^(1/3 - 1/(3 beta)) X_n = 2^((beta-1) n / 3) X_n.
double rescaling_weight(double beta, std::size_t n);

struct State {
  double t = 0.0;
  std::vector<double> x;
};

struct EnergyProfile {
  std::vector<double> E;  // E_n = sum_{i<=n} X_i^2
  double total = 0.0;
};

// F_n = k_{n-1} X_{n-1}^2 - k_n X_n X~_{n+1}. Throws DimensionMismatch.
void vector_field(const ModelParams& p, std::span<const double> x, std::span<double> out);
std::vector<double> vector_field(const ModelParams& p, std::span<const double> x);

EnergyProfile energy_profile(std::span<const double> x);

// E_n' = -2 k_n X_n^2 X~_{n+1}, n is 1-based; n = N uses the closure value.
double energy_derivative(const ModelParams& p, std::span<const double> x, std::size_t n);

double l2_norm(std::span<const double> x);
double sup_norm(std::span<const double> x);

}  // namespace dyadic
