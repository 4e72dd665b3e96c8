#pragma once
// Regularity diagnostics for positive solutions: occupation measures of
// superlevel sets, weighted sup functionals, cube integrals of single shells,
// the gap functional between two solutions, and energy decay rates.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "dyadic/integrator.hpp"

namespace dyadic {

// Threshold profile a_1 >= a_2 >= ... > 0 and horizon T.
class OccupationQuery {
 public:
  OccupationQuery(std::vector<double> a, double horizon);
  const std::vector<double>& a() const { return a_; }
  double horizon() const { return horizon_; }

  // a_n = M k_n^(-power)
  static OccupationQuery power_profile(const ModelParams& p, double M, double power, double horizon);

 private:
  std::vector<double> a_;
  double horizon_;
};

struct Interval {
  double lo, hi;
};

// Maximal intervals of (0, T] on which X_n(t) > levels[n], per shell, from
// sign scans of the dense output refined by bisection.
std::vector<std::vector<Interval>> superlevel_intervals(const Trajectory& traj,
                                                        std::span<const double> levels, double T);

// Sorted union; returns the merged list.
std::vector<Interval> merge_intervals(std::vector<Interval> v);
double total_length(std::span<const Interval> v);

// Constant of the occupation bound, 2^(7+beta), and of its per-shell form, 2^(8+beta).
double occupation_constant(double beta);
double shell_occupation_constant(double beta);

struct OccupationResult {
  double measured = 0.0;  // |{t in (0,T] : X_n(t) > a_n for some n}|
  double bound = 0.0;     // 2^(7+beta) |x0|^2 sum 1/(k_n a_n^3)
  std::vector<double> per_shell;
};

// Requires nonnegative initial data.
OccupationResult occupation_measure(const Trajectory& traj, const OccupationQuery& q);

struct ShellOccupation {
  std::size_t shell;  // 1-based
  double measured;    // |{X_n > M}|
  double bound;       // 2^(8+beta) |x|^2 / (k_n M^3)
};

// Per-shell occupation of {X_n > M} on (0, T].
std::vector<ShellOccupation> shell_occupation(const Trajectory& traj, double M, double T);

enum class SupWeightKind { AlphaLog, BetaCritical, EpsSuper };

struct SupWeight {
  SupWeightKind kind = SupWeightKind::BetaCritical;
  double param = 0.0;  // alpha or eps
  static SupWeight alpha_log(double alpha) { return {SupWeightKind::AlphaLog, alpha}; }
  static SupWeight beta_critical() { return {SupWeightKind::BetaCritical, 0.0}; }
  static SupWeight eps_super(double eps) { return {SupWeightKind::EpsSuper, eps}; }

  // n^(-alpha) k_n^(1/3), k_n^(1/3 - 1/(3 beta)) or k_n^(1/3 + eps).
  double weight(const ModelParams& p, std::size_t n) const;
};

// max_n w_n x_n and the first index attaining it (1-based).
std::pair<double, std::size_t> sup_functional(const ModelParams& p, std::span<const double> x,
                                              SupWeight w);

struct CubeReport {
  std::size_t shell = 0;
  double integral = 0.0;       // int_0^T X_n^3
  double bound = 0.0;          // (c |x|^2 / k_n)(1 + log(|x| T / c) + n beta log 2)
  double flux_integral = 0.0;  // int_0^T X_n^2 X~_{n+1}
  double flux_bound = 0.0;     // |x|^2 / k_n
  bool hypothesis = false;     // k_n T > c / |x| and nonnegative data
};

// Gauss-Legendre quadrature on every step; exact for the degree of the integrands.
CubeReport cube_integral_check(const Trajectory& traj, std::size_t n, double T);

// sum_n (Y_n - X_n)^2 / 2^n at time t.
double psi_gap(const Trajectory& a, const Trajectory& b, double t);

struct EnergySample {
  double t;
  double E;
};

// Records the total energy at every accepted step and stops once it falls
// below E(0) / drop.
class EnergyRecorder final : public StepObserver {
 public:
  explicit EnergyRecorder(double drop = 0.0) : drop_(drop) {}
  void on_start(double t0, std::span<const double> x0) override;
  void on_step(const StepView& step) override;
  bool stop_requested() const override;
  const std::vector<EnergySample>& samples() const { return samples_; }

 private:
  double drop_;
  std::vector<EnergySample> samples_;
};

// Least-squares slope of log E against log t over samples with E in [E_lo, E_hi] and t > 0.
double loglog_slope(std::span<const EnergySample> samples, double E_lo, double E_hi);

}  // namespace dyadic
