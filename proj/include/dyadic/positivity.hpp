#pragma once
// Finite-time positivization of finite-energy solutions.
//
// Waiting times v_n(a) bound how long X_{n+1} can stay negative while X_n >= a;
// the schedule t_1 = v_1(x_1), t_{n+1} = t_n + s_n / eps^2 + v_{n+1}(gamma)
// gives an upper estimate of the time after which every shell is nonnegative.
// Only the finite-energy branch is implemented, where eta_n = |x|^2.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dyadic/integrator.hpp"

namespace dyadic {

// (2^(2 beta) eta^2 + a^4) / (k_{n+1} a^4 sqrt(eta)); n is 1-based and may
// exceed n_max (k is extended as 2^(beta n)).
double waiting_time(const ModelParams& p, double eta, double a, std::size_t n);

struct ScheduleOptions {
  double C = 1.0;
  double delta = 1.0 / 12.0;
  double eps = 0.1;
};

struct PositivitySchedule {
  std::vector<std::size_t> omega;  // omega_n = min{i >= n : x_{i+1} >= 0}, capped at N
  std::vector<double> eta;         // E_{omega_n}(0), equal to |x|^2 here
  std::vector<double> v;           // v_n(a) at the requested level
  std::vector<double> s;           // (2^(1+beta) / x_1) k_n^(-(1-delta)/3)
  std::vector<double> a_seq;       // C k_n^(-(1-delta)/3)
  std::vector<double> t;           // t_1 .. t_{N-1}
  double level = 0.0;              // a
  double a_sum = 0.0;              // sum over all n >= 1 of a_n
  double gamma = 0.0;
  double tau_bound = 0.0;          // t_{N-1}: every shell of the truncation is >= 0
  ScheduleOptions options;
};

// Throws PreconditionError if x_1 <= 0 or an option is out of range, and
// GammaUndefined when x_1^2 - eps * sum(a) <= 0.
PositivitySchedule build_schedule(const ModelParams& p, std::span<const double> x0, double a,
                                  const ScheduleOptions& opt = {});

// Earliest time after which min_n X_n >= 0 on the rest of the trajectory.
std::optional<double> measure_tau(const Trajectory& traj);

// Most negative component over stored samples and dense probes in [t_from, T].
double min_component_after(const Trajectory& traj, double t_from);

}  // namespace dyadic
