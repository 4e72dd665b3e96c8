#pragma once
// Adaptive explicit integration of the truncated systems.
//
// ERK45 is the Dormand-Prince 5(4) pair with FSAL, a PI step controller and
// the pair's quartic continuous extension. The step is additionally capped by
// an explicit-stability limit cfl / (rho(x) + atol), where rho is a rate bound
// supplied by the system. ERK45Stabilized takes the same steps while the
// accuracy proposal fits under the cap and switches to a damped second-order
// Runge-Kutta-Chebyshev step (cubic Hermite dense output) once the cap starves
// progress.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dyadic/model.hpp"

namespace dyadic {

enum class Method { ERK45, ERK45Stabilized };

std::string_view method_name(Method m);
Method parse_method(std::string_view s);

struct IntegratorConfig {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_init = 0.0;  // 0 selects the initial step automatically
  double cfl = 0.5;
  long max_steps = 20'000'000;
  Method method = Method::ERK45;

  void validate() const;
  friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

// Right-hand side seen by the integrator.
class OdeSystem {
 public:
  virtual ~OdeSystem() = default;
  virtual std::size_t dim() const = 0;
  virtual void rhs(std::span<const double> x, std::span<double> out) const = 0;
  // Upper bound on the spectral radius of the Jacobian at x.
  virtual double rate_bound(std::span<const double> x) const = 0;
};

// Systems of the form
//   F_i = gain[i] x_{i-1}^2 - loss[i] x_i x_{i+1},  x_{-1} = 0,  x_N from the closure,
// which covers both the dyadic X-system and the rescaled Y-system.
class ChainSystem final : public OdeSystem {
 public:
  ChainSystem(std::vector<double> gain, std::vector<double> loss, Closure closure);
  std::size_t dim() const override { return gain_.size(); }
  void rhs(std::span<const double> x, std::span<double> out) const override;
  // Gershgorin row-sum bound of the Jacobian.
  double rate_bound(std::span<const double> x) const override;

 private:
  std::vector<double> gain_;
  std::vector<double> loss_;
  Closure closure_;
};

// Which equations a trajectory solves: the dyadic X-system or the rescaled
// Y-system Y_n = 2^((beta-1)n/3) X_n.
enum class SystemKind { Dyadic, Rescaled };

ChainSystem make_system(const ModelParams& p, SystemKind kind);

struct TrajectoryEvent {
  enum class Kind { StabilizedOn, StabilizedOff };
  Kind kind;
  double time;
};

struct IntegrationStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
  long stabilized_steps = 0;
};

// One accepted step as delivered to observers. `dense` holds five coefficient
// vectors r1..r5 (5 * dim doubles) of the continuous extension
//   x(t0 + s h) = r1 + s (r2 + (1-s)(r3 + s (r4 + (1-s) r5))).
struct StepView {
  double t0;
  double h;
  std::span<const double> x0;
  std::span<const double> x1;
  std::span<const double> dense;
};

class StepObserver {
 public:
  virtual ~StepObserver() = default;
  virtual void on_start(double t0, std::span<const double> x0) = 0;
  virtual void on_step(const StepView& step) = 0;
  // Checked after every accepted step; true ends the integration early.
  virtual bool stop_requested() const { return false; }
};

// Evaluates the continuous extension of a step at s in [0, 1].
void dense_extension(std::span<const double> dense, double s, std::span<double> out);

class Trajectory {
 public:
  Trajectory(ModelParams params, SystemKind kind, IntegratorConfig config);

  const ModelParams& params() const { return params_; }
  SystemKind system() const { return kind_; }
  const IntegratorConfig& config() const { return config_; }
  std::size_t dim() const { return dim_; }

  std::size_t size() const { return times_.size(); }
  std::size_t steps() const { return times_.empty() ? 0 : times_.size() - 1; }
  double time(std::size_t i) const { return times_[i]; }
  std::span<const double> times() const { return times_; }
  std::span<const double> state(std::size_t i) const {
    return {states_.data() + i * dim_, dim_};
  }
  std::span<const double> dense(std::size_t step) const {
    return {dense_.data() + step * 5 * dim_, 5 * dim_};
  }
  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }

  const std::vector<TrajectoryEvent>& events() const { return events_; }
  const IntegrationStats& stats() const { return stats_; }

  // Index of the step containing t (t_i <= t <= t_{i+1}); t must be in range.
  std::size_t step_index(double t) const;

  void eval(double t, std::span<double> out) const;

  // Construction interface (integrator, transforms).
  void start(double t0, std::span<const double> x0);
  void append(double t1, std::span<const double> x1, std::span<const double> dense);
  void add_event(TrajectoryEvent e) { events_.push_back(e); }
  void set_stats(const IntegrationStats& s) { stats_ = s; }

 private:
  ModelParams params_;
  SystemKind kind_;
  IntegratorConfig config_;
  std::size_t dim_;
  std::vector<double> times_;
  std::vector<double> states_;
  std::vector<double> dense_;
  std::vector<TrajectoryEvent> events_;
  IntegrationStats stats_;
};

struct IntegrationResult {
  State final_state;
  IntegrationStats stats;
  std::vector<TrajectoryEvent> events;
};

// Core driver: integrates from (0, x0) to t_end and reports each accepted step.
IntegrationResult integrate_system(const OdeSystem& sys, const IntegratorConfig& cfg,
                                   std::span<const double> x0, double t_end,
                                   StepObserver& observer);

// Stores the whole solution with dense output.
Trajectory integrate_system(const OdeSystem& sys, const ModelParams& params,
                            SystemKind kind, const IntegratorConfig& cfg,
                            std::span<const double> x0, double t_end);

Trajectory integrate(const ModelParams& p, const IntegratorConfig& cfg,
                     std::span<const double> x0, double t_end);

// Streams a stored trajectory through an observer, step by step.
void replay(const Trajectory& traj, StepObserver& observer);

State dense_eval(const Trajectory& traj, double t);

// Scalar functional of the state with a threshold; the predicate holds when
// value(x) > 0 (strict) or value(x) >= 0.
struct StatePredicate {
  std::function<double(std::span<const double>)> value;
  bool strict = true;
  bool holds(std::span<const double> x) const {
    const double v = value(x);
    return strict ? v > 0.0 : v >= 0.0;
  }
};

// Sub-intervals probed per step when scanning dense output for sign changes.
inline constexpr int kScanPointsPerStep = 16;

// Earliest time at which the predicate holds, localized by bisection on the
// dense output to relative width 1e-10.
std::optional<double> detect_event(const Trajectory& traj, const StatePredicate& pred);

// Earliest time after which the predicate holds for the rest of the trajectory;
// empty if it fails at the final time.
std::optional<double> detect_final_entry(const Trajectory& traj, const StatePredicate& pred);

}  // namespace dyadic
