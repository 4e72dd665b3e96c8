#include "dyadic/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dyadic/errors.hpp"
#include "dyadic/simd/kernels.hpp"

namespace dyadic {

std::string_view closure_name(Closure c) {
  return c == Closure::Mirror ? "mirror" : "galerkin_zero";
}

Closure parse_closure(std::string_view s) {
  if (s == "mirror") return Closure::Mirror;
  if (s == "galerkin_zero" || s == "zero") return Closure::GalerkinZero;
  throw InvalidArgument("unknown closure '" + std::string(s) + "'");
}

double dyadic_coefficient(double beta, double n) {
  const double e = beta * n;
  if (e == std::nearbyint(e) && std::fabs(e) < 1000.0) {
    return std::ldexp(1.0, static_cast<int>(e));
  }
  return std::exp2(e);
}

double rescaled_coefficient(double beta, std::size_t n) {
  const double nn = static_cast<double>(n);
  return dyadic_coefficient(1.0, (2.0 * beta + 1.0) * nn / 3.0 - (beta + 2.0) / 3.0);
}

double rescaling_weight(double beta, std::size_t n) {
  return dyadic_coefficient(1.0, (beta - 1.0) * static_cast<double>(n) / 3.0);
}

ModelParams::ModelParams(double beta, std::size_t n_max, Closure closure)
    : beta_(beta), n_max_(n_max), closure_(closure) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidArgument("beta must be positive, got " + std::to_string(beta));
  }
  if (n_max < 2) throw InvalidArgument("n_max must be at least 2");
  k_.resize(n_max + 2);
  k_[0] = 0.0;
  for (std::size_t n = 1; n < k_.size(); ++n) {
    k_[n] = dyadic_coefficient(beta, static_cast<double>(n));
  }
}

void vector_field(const ModelParams& p, std::span<const double> x, std::span<double> out) {
  if (x.size() != p.n_max() || out.size() != p.n_max()) {
    throw DimensionMismatch("state has " + std::to_string(x.size()) +
                            " components, model has " + std::to_string(p.n_max()));
  }
  simd::active().quadratic_chain(p.gain().data(), p.loss().data(), x.data(),
                                 x.size(), p.closure_value(x), out.data());
}

std::vector<double> vector_field(const ModelParams& p, std::span<const double> x) {
  std::vector<double> out(x.size());
  vector_field(p, x, out);
  return out;
}

EnergyProfile energy_profile(std::span<const double> x) {
  EnergyProfile e;
  e.E.resize(x.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc += x[i] * x[i];
    e.E[i] = acc;
  }
  e.total = acc;
  return e;
}

double energy_derivative(const ModelParams& p, std::span<const double> x, std::size_t n) {
  if (x.size() != p.n_max()) throw DimensionMismatch("state length differs from n_max");
  if (n < 1 || n > p.n_max()) {
    throw InvalidArgument("shell index " + std::to_string(n) + " outside 1.." +
                          std::to_string(p.n_max()));
  }
  const double next = n == p.n_max() ? p.closure_value(x) : x[n];
  const double xn = x[n - 1];
  return -2.0 * p.k(n) * xn * xn * next;
}

double l2_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double sup_norm(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace dyadic
