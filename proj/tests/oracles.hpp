#pragma once
// Reference computations written independently of the library.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

inline double k(double beta, std::size_t n) { return n == 0 ? 0.0 : std::pow(2.0, beta * n); }

// Direct transcription of X_n' = k_{n-1} X_{n-1}^2 - k_n X_n X_{n+1}.
inline std::vector<double> field(double beta, const std::vector<double>& x, bool mirror) {
  const std::size_t N = x.size();
  std::vector<double> f(N);
  for (std::size_t n = 1; n <= N; ++n) {
    const double prev = n == 1 ? 0.0 : x[n - 2];
    const double next = n == N ? (mirror ? x[N - 1] : 0.0) : x[n];
    f[n - 1] = k(beta, n - 1) * prev * prev - k(beta, n) * x[n - 1] * next;
  }
  return f;
}

// Classical fixed-step fourth-order Runge-Kutta to time T.
inline std::vector<double> rk4(double beta, std::vector<double> x, bool mirror, double T, double h) {
  const long steps = std::lround(T / h);
  const double dt = T / static_cast<double>(steps);
  const std::size_t N = x.size();
  std::vector<double> tmp(N);
  for (long s = 0; s < steps; ++s) {
    const auto k1 = field(beta, x, mirror);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    const auto k2 = field(beta, tmp, mirror);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    const auto k3 = field(beta, tmp, mirror);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + dt * k3[i];
    const auto k4 = field(beta, tmp, mirror);
    for (std::size_t i = 0; i < N; ++i) {
      x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
  }
  return x;
}

inline double waiting(double beta, double eta, double a, std::size_t n) {
  return (std::pow(2.0, 2.0 * beta) * eta * eta + std::pow(a, 4)) /
         (k(beta, n + 1) * std::pow(a, 4) * std::sqrt(eta));
}

// Row-by-row evaluation of t_1 = v_1(x_1), t_{n+1} = t_n + s_n / eps^2 + v_{n+1}(gamma),
// with sum(a) accumulated term by term; returns t_{N-1}.
inline double tau_bound(double beta, const std::vector<double>& x0, double C, double delta,
                        double eps) {
  double eta = 0.0;
  for (double v : x0) eta += v * v;
  double a_sum = 0.0;
  for (std::size_t i = 1; i < 100000; ++i) {
    const double a = C * std::pow(k(beta, i), -(1.0 - delta) / 3.0);
    a_sum += a;
    if (a < 1e-20 * a_sum) break;
  }
  const double x1 = x0[0];
  const double gamma = std::sqrt(x1 * x1 - eps * a_sum);
  double t = waiting(beta, eta, x1, 1);
  for (std::size_t n = 1; n + 1 < x0.size(); ++n) {
    const double s = std::pow(2.0, 1.0 + beta) / x1 * std::pow(k(beta, n), -(1.0 - delta) / 3.0);
    t += s / (eps * eps) + waiting(beta, eta, gamma, n + 1);
  }
  return t;
}

}  // namespace oracle
