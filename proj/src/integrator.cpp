#include "dyadic/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "dyadic/errors.hpp"
#include "dyadic/simd/kernels.hpp"

namespace dyadic {

std::string_view method_name(Method m) {
  return m == Method::ERK45 ? "erk45" : "erk45_stabilized";
}

Method parse_method(std::string_view s) {
  if (s == "erk45") return Method::ERK45;
  if (s == "erk45_stabilized") return Method::ERK45Stabilized;
  throw InvalidArgument("unknown integration method '" + std::string(s) + "'");
}

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw InvalidArgument("rtol and atol must be positive");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw InvalidArgument("cfl must lie in (0, 1]");
  if (max_steps < 1) throw InvalidArgument("max_steps must be at least 1");
  if (h_init < 0.0) throw InvalidArgument("h_init must be nonnegative");
}

ChainSystem::ChainSystem(std::vector<double> gain, std::vector<double> loss, Closure closure)
    : gain_(std::move(gain)), loss_(std::move(loss)), closure_(closure) {
  if (gain_.size() != loss_.size() || gain_.empty()) {
    throw DimensionMismatch("gain and loss coefficient vectors differ in length");
  }
}

void ChainSystem::rhs(std::span<const double> x, std::span<double> out) const {
  const double right = closure_ == Closure::Mirror ? x.back() : 0.0;
  simd::active().quadratic_chain(gain_.data(), loss_.data(), x.data(), x.size(), right,
                                 out.data());
}

double ChainSystem::rate_bound(std::span<const double> x) const {
  // |dF_i/dx_{i-1}| + |dF_i/dx_i| + |dF_i/dx_{i+1}|
  //   = 2 gain_i |x_{i-1}| + loss_i (|x~_{i+1}| + |x_i|)
  const std::size_t n = x.size();
  const double tail = closure_ == Closure::Mirror ? std::fabs(x.back()) : 0.0;
  double rho = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i == 0 ? 0.0 : std::fabs(x[i - 1]);
    const double right = i + 1 == n ? tail : std::fabs(x[i + 1]);
    const double row = 2.0 * std::fabs(gain_[i]) * left + std::fabs(loss_[i]) * (right + std::fabs(x[i]));
    rho = std::max(rho, row);
  }
  return rho;
}

ChainSystem make_system(const ModelParams& p, SystemKind kind) {
  const std::size_t n = p.n_max();
  if (kind == SystemKind::Dyadic) {
    return ChainSystem({p.gain().begin(), p.gain().end()}, {p.loss().begin(), p.loss().end()},
                       p.closure());
  }
  std::vector<double> gain(n), loss(n);
  for (std::size_t i = 0; i < n; ++i) {
    gain[i] = rescaled_coefficient(p.beta(), i + 1);
    loss[i] = 2.0 * gain[i];
  }
  return ChainSystem(std::move(gain), std::move(loss), p.closure());
}

void dense_extension(std::span<const double> dense, double s, std::span<double> out) {
  simd::active().dense_quartic(dense.data(), s, out.size(), out.data());
}

// ---------------------------------------------------------------------------
// Trajectory

Trajectory::Trajectory(ModelParams params, SystemKind kind, IntegratorConfig config)
    : params_(std::move(params)), kind_(kind), config_(config), dim_(params_.n_max()) {}

void Trajectory::start(double t0, std::span<const double> x0) {
  if (x0.size() != dim_) throw DimensionMismatch("initial state length differs from n_max");
  times_.assign(1, t0);
  states_.assign(x0.begin(), x0.end());
  dense_.clear();
}

void Trajectory::append(double t1, std::span<const double> x1, std::span<const double> dense) {
  if (!(t1 > times_.back())) throw Error("trajectory times must increase strictly");
  times_.push_back(t1);
  states_.insert(states_.end(), x1.begin(), x1.end());
  dense_.insert(dense_.end(), dense.begin(), dense.end());
}

std::size_t Trajectory::step_index(double t) const {
  if (times_.size() < 2) return 0;
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - times_.begin());
  i = i == 0 ? 0 : i - 1;
  return std::min(i, times_.size() - 2);
}

void Trajectory::eval(double t, std::span<double> out) const {
  if (times_.empty() || t < times_.front() || t > times_.back() || std::isnan(t)) {
    throw InvalidArgument("time " + std::to_string(t) + " outside trajectory range");
  }
  if (times_.size() == 1) {
    std::copy_n(states_.begin(), dim_, out.begin());
    return;
  }
  const std::size_t i = step_index(t);
  if (t == times_[i]) {
    std::copy_n(states_.begin() + static_cast<std::ptrdiff_t>(i * dim_), dim_, out.begin());
    return;
  }
  if (t == times_[i + 1]) {
    std::copy_n(states_.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim_), dim_, out.begin());
    return;
  }
  const double s = (t - times_[i]) / (times_[i + 1] - times_[i]);
  dense_extension(dense(i), s, out);
}

State dense_eval(const Trajectory& traj, double t) {
  State s{t, std::vector<double>(traj.dim())};
  traj.eval(t, s.x);
  return s;
}

void replay(const Trajectory& traj, StepObserver& observer) {
  observer.on_start(traj.time(0), traj.state(0));
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const double t0 = traj.time(i);
    observer.on_step({t0, traj.time(i + 1) - t0, traj.state(i), traj.state(i + 1), traj.dense(i)});
  }
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)

namespace {

namespace dp {
constexpr std::array<double, 1> a2{1.0 / 5.0};
constexpr std::array<double, 2> a3{3.0 / 40.0, 9.0 / 40.0};
constexpr std::array<double, 3> a4{44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0};
constexpr std::array<double, 4> a5{19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0,
                                   -212.0 / 729.0};
constexpr std::array<double, 5> a6{9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                                   49.0 / 176.0, -5103.0 / 18656.0};
constexpr std::array<double, 6> a7{35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0,
                                   -2187.0 / 6784.0, 11.0 / 84.0};
constexpr std::array<double, 7> e{71.0 / 57600.0,   0.0,           -71.0 / 16695.0, 71.0 / 1920.0,
                                  -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0};
constexpr std::array<double, 7> d{-12715105075.0 / 11282082432.0, 0.0,
                                  87487479700.0 / 32700410799.0,  -10690763975.0 / 1880347072.0,
                                  701980252875.0 / 199316789632.0, -1453857185.0 / 822651844.0,
                                  69997945.0 / 29380423.0};
}  // namespace dp

constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;   // h_new >= 0.2 h
constexpr double kFacMax = 10.0;  // h_new <= 10 h
constexpr double kBetaPI = 0.04;
constexpr double kExpo = 0.2 - kBetaPI * 0.75;
constexpr double kStabilizedSwitch = 2.0;  // proposal / cap ratio that engages RKC
constexpr int kMaxChebyshevStages = 200;

struct Workspace {
  explicit Workspace(std::size_t n)
      : n(n), x(n), x1(n), tmp(n), err(n), dense(5 * n), rkc_prev(n), rkc_prev2(n) {
    for (auto& k : stage) k.assign(n, 0.0);
  }
  std::size_t n;
  std::vector<double> x, x1, tmp, err, dense;
  std::array<std::vector<double>, 7> stage;
  std::vector<double> rkc_prev, rkc_prev2;
};

double initial_step(const OdeSystem& sys, const IntegratorConfig& cfg, Workspace& w,
                    double t_span, long& rhs_evals) {
  const auto& kt = simd::active();
  const std::size_t n = w.n;
  const auto& f0 = w.stage[0];
  const double d0 = kt.scaled_error_max(w.x.data(), w.x.data(), w.x.data(), cfg.rtol, cfg.atol, n);
  const double d1 = kt.scaled_error_max(f0.data(), w.x.data(), w.x.data(), cfg.rtol, cfg.atol, n);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, t_span);
  const double* stages[] = {f0.data()};
  const double one[] = {1.0};
  kt.linear_combination(w.tmp.data(), w.x.data(), h0, one, stages, 1, n);
  auto& f1 = w.stage[1];
  sys.rhs(w.tmp, f1);
  ++rhs_evals;
  for (std::size_t i = 0; i < n; ++i) w.err[i] = f1[i] - f0[i];
  const double d2 = kt.scaled_error_max(w.err.data(), w.x.data(), w.x.data(), cfg.rtol, cfg.atol, n) / h0;
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h0, h1, t_span});
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

// One Dormand-Prince step from w.x with stage[0] = f(w.x). Fills w.x1,
// stage[6] = f(w.x1), w.err and w.dense (on acceptance the caller uses them).
double dp_step(const OdeSystem& sys, const IntegratorConfig& cfg, Workspace& w, double h) {
  const auto& kt = simd::active();
  const std::size_t n = w.n;
  auto& k = w.stage;
  const double* s[7] = {k[0].data(), k[1].data(), k[2].data(), k[3].data(),
                        k[4].data(), k[5].data(), k[6].data()};

  kt.linear_combination(w.tmp.data(), w.x.data(), h, dp::a2.data(), s, 1, n);
  sys.rhs(w.tmp, k[1]);
  kt.linear_combination(w.tmp.data(), w.x.data(), h, dp::a3.data(), s, 2, n);
  sys.rhs(w.tmp, k[2]);
  kt.linear_combination(w.tmp.data(), w.x.data(), h, dp::a4.data(), s, 3, n);
  sys.rhs(w.tmp, k[3]);
  kt.linear_combination(w.tmp.data(), w.x.data(), h, dp::a5.data(), s, 4, n);
  sys.rhs(w.tmp, k[4]);
  kt.linear_combination(w.tmp.data(), w.x.data(), h, dp::a6.data(), s, 5, n);
  sys.rhs(w.tmp, k[5]);
  kt.linear_combination(w.x1.data(), w.x.data(), h, dp::a7.data(), s, 6, n);
  sys.rhs(w.x1, k[6]);

  kt.linear_combination(w.err.data(), nullptr, h, dp::e.data(), s, 7, n);
  return kt.scaled_error_max(w.err.data(), w.x.data(), w.x1.data(), cfg.rtol, cfg.atol, n);
}

void dp_dense(Workspace& w, double h) {
  const auto& kt = simd::active();
  const std::size_t n = w.n;
  auto& k = w.stage;
  const double* s[7] = {k[0].data(), k[1].data(), k[2].data(), k[3].data(),
                        k[4].data(), k[5].data(), k[6].data()};
  double* r1 = w.dense.data();
  double* r2 = r1 + n;
  double* r3 = r2 + n;
  double* r4 = r3 + n;
  double* r5 = r4 + n;
  for (std::size_t i = 0; i < n; ++i) {
    const double ydiff = w.x1[i] - w.x[i];
    const double bspl = h * k[0][i] - ydiff;
    r1[i] = w.x[i];
    r2[i] = ydiff;
    r3[i] = bspl;
    r4[i] = ydiff - h * k[6][i] - bspl;
  }
  kt.linear_combination(r5, nullptr, h, dp::d.data(), s, 7, n);
}

// Damped second-order Runge-Kutta-Chebyshev step with `stages` stages.
// Uses stage[0] = f(w.x); leaves f(w.x1) in stage[6] and the error in w.err.
double rkc_step(const OdeSystem& sys, const IntegratorConfig& cfg, Workspace& w, double h,
                int stages, long& rhs_evals) {
  const auto& kt = simd::active();
  const std::size_t n = w.n;
  const double sq = static_cast<double>(stages) * stages;
  const double w0 = 1.0 + 2.0 / (13.0 * sq);
  // Chebyshev T_j(w0) and derivatives by recurrence.
  std::vector<double> T(stages + 1), dT(stages + 1), ddT(stages + 1);
  T[0] = 1.0, dT[0] = 0.0, ddT[0] = 0.0;
  T[1] = w0, dT[1] = 1.0, ddT[1] = 0.0;
  for (int j = 2; j <= stages; ++j) {
    T[j] = 2.0 * w0 * T[j - 1] - T[j - 2];
    dT[j] = 2.0 * T[j - 1] + 2.0 * w0 * dT[j - 1] - dT[j - 2];
    ddT[j] = 4.0 * dT[j - 1] + 2.0 * w0 * ddT[j - 1] - ddT[j - 2];
  }
  const double w1 = dT[stages] / ddT[stages];
  std::vector<double> b(stages + 1);
  for (int j = 2; j <= stages; ++j) b[j] = ddT[j] / (dT[j] * dT[j]);
  b[0] = b[1] = b[2];

  const auto& f0 = w.stage[0];
  auto& prev2 = w.rkc_prev2;  // Y_{j-2}
  auto& prev = w.rkc_prev;    // Y_{j-1}
  auto& fj = w.stage[1];
  prev2 = w.x;
  const double mu1 = b[1] * w1;
  for (std::size_t i = 0; i < n; ++i) prev[i] = w.x[i] + mu1 * h * f0[i];
  for (int j = 2; j <= stages; ++j) {
    sys.rhs(prev, fj);
    ++rhs_evals;
    const double mu = 2.0 * b[j] * w0 / b[j - 1];
    const double nu = -b[j] / b[j - 2];
    const double mut = 2.0 * b[j] * w1 / b[j - 1];
    const double gamt = -(1.0 - b[j - 1] * T[j - 1]) * mut;
    const double keep = 1.0 - mu - nu;
    for (std::size_t i = 0; i < n; ++i) {
      w.tmp[i] = keep * w.x[i] + mu * prev[i] + nu * prev2[i] + mut * h * fj[i] +
                 gamt * h * f0[i];
    }
    std::swap(prev2, prev);
    std::swap(prev, w.tmp);
  }
  w.x1 = prev;
  sys.rhs(w.x1, w.stage[6]);
  ++rhs_evals;
  const auto& f1 = w.stage[6];
  for (std::size_t i = 0; i < n; ++i) {
    w.err[i] = (12.0 * (w.x[i] - w.x1[i]) + 6.0 * h * (f0[i] + f1[i])) / 15.0;
  }
  return kt.scaled_error_max(w.err.data(), w.x.data(), w.x1.data(), cfg.rtol, cfg.atol, n);
}

void hermite_dense(Workspace& w, double h) {
  const std::size_t n = w.n;
  double* r1 = w.dense.data();
  double* r2 = r1 + n;
  double* r3 = r2 + n;
  double* r4 = r3 + n;
  double* r5 = r4 + n;
  for (std::size_t i = 0; i < n; ++i) {
    const double ydiff = w.x1[i] - w.x[i];
    const double a = h * w.stage[0][i] - ydiff;
    r1[i] = w.x[i];
    r2[i] = ydiff;
    r3[i] = a;
    r4[i] = ydiff - h * w.stage[6][i] - a;
    r5[i] = 0.0;
  }
}

class Recorder final : public StepObserver {
 public:
  explicit Recorder(Trajectory& t) : traj_(t) {}
  void on_start(double t0, std::span<const double> x0) override { traj_.start(t0, x0); }
  void on_step(const StepView& s) override { traj_.append(s.t0 + s.h, s.x1, s.dense); }

 private:
  Trajectory& traj_;
};

}  // namespace

IntegrationResult integrate_system(const OdeSystem& sys, const IntegratorConfig& cfg,
                                   std::span<const double> x0, double t_end,
                                   StepObserver& observer) {
  cfg.validate();
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be positive");
  const std::size_t n = sys.dim();
  if (x0.size() != n) {
    throw DimensionMismatch("initial condition has " + std::to_string(x0.size()) +
                            " components, system has " + std::to_string(n));
  }
  if (!all_finite(x0)) throw InvalidArgument("initial condition is not finite");

  Workspace w(n);
  IntegrationResult result;
  auto& st = result.stats;
  w.x.assign(x0.begin(), x0.end());
  sys.rhs(w.x, w.stage[0]);
  st.rhs_evals = 1;

  double t = 0.0;
  observer.on_start(t, w.x);

  double h = cfg.h_init > 0.0 ? std::min(cfg.h_init, t_end)
                              : initial_step(sys, cfg, w, t_end, st.rhs_evals);
  double err_old = 1e-4;
  bool stabilized = false;
  bool rejected_last = false;
  const double eps = std::numeric_limits<double>::epsilon();

  while (t < t_end) {
    if (st.accepted + st.rejected >= cfg.max_steps) throw StepBudgetExceeded(t, cfg.max_steps);

    const double rho = sys.rate_bound(w.x);
    const double cap = cfg.cfl / (rho + cfg.atol);

    bool use_rkc = false;
    if (cfg.method == Method::ERK45Stabilized) {
      const bool want = h > kStabilizedSwitch * cap;
      if (want != stabilized) {
        stabilized = want;
        result.events.push_back({want ? TrajectoryEvent::Kind::StabilizedOn
                                      : TrajectoryEvent::Kind::StabilizedOff,
                                 t});
      }
      use_rkc = stabilized;
    }

    double step = use_rkc ? h : std::min(h, cap);
    int stages = 0;
    if (use_rkc) {
      // Real stability interval of the damped scheme is about 0.653 s^2.
      const double reach = std::max(step * rho, 1.0);
      stages = 2 + static_cast<int>(std::ceil(std::sqrt(reach / 0.653)));
      if (stages > kMaxChebyshevStages) {
        stages = kMaxChebyshevStages;
        step = 0.653 * (stages - 1.0) * (stages - 1.0) / rho;
      }
    }
    bool last = false;
    if (t + step >= t_end * (1.0 - 4.0 * eps)) {
      step = t_end - t;
      last = true;
    }
    if (step <= 16.0 * eps * std::max(std::fabs(t), 1e-300) || step <= 0.0) {
      throw StiffnessFailure(t, step);
    }

    double err;
    if (use_rkc) {
      err = rkc_step(sys, cfg, w, step, stages, st.rhs_evals);
    } else {
      err = dp_step(sys, cfg, w, step);
      st.rhs_evals += 6;
    }
    if (!std::isfinite(err) || !all_finite(w.x1)) err = std::numeric_limits<double>::infinity();

    if (err <= 1.0) {
      if (use_rkc) {
        hermite_dense(w, step);
        ++st.stabilized_steps;
      } else {
        dp_dense(w, step);
      }
      const double t_new = last ? t_end : t + step;
      if (!(t_new > t)) throw StiffnessFailure(t, step);
      observer.on_step({t, t_new - t, w.x, w.x1, w.dense});
      ++st.accepted;
      t = t_new;
      std::swap(w.x, w.x1);
      std::swap(w.stage[0], w.stage[6]);
      if (observer.stop_requested()) break;

      double h_new;
      if (use_rkc) {
        const double fac = 0.8 * std::pow(std::max(err, 1e-10), -1.0 / 3.0);
        h_new = step * std::clamp(fac, 0.1, 5.0);
      } else {
        const double fac11 = std::pow(std::max(err, 1e-10), kExpo);
        double fac = fac11 / std::pow(err_old, kBetaPI);
        fac = std::clamp(fac / kSafety, 1.0 / kFacMax, 1.0 / kFacMin);
        h_new = step / fac;
        err_old = std::max(err, 1e-4);
      }
      if (rejected_last) h_new = std::min(h_new, step);
      rejected_last = false;
      h = h_new;
    } else {
      ++st.rejected;
      rejected_last = true;
      if (use_rkc) {
        const double fac = std::isfinite(err) ? 0.8 * std::pow(err, -1.0 / 3.0) : 0.1;
        h = step * std::clamp(fac, 0.1, 0.9);
      } else {
        const double fac11 = std::isfinite(err) ? std::pow(err, kExpo) : kFacMax;
        h = step / std::min(1.0 / kFacMin, fac11 / kSafety);
      }
    }
  }
  result.final_state = State{t, w.x};
  return result;
}

Trajectory integrate_system(const OdeSystem& sys, const ModelParams& params, SystemKind kind,
                            const IntegratorConfig& cfg, std::span<const double> x0,
                            double t_end) {
  Trajectory traj(params, kind, cfg);
  Recorder rec(traj);
  auto res = integrate_system(sys, cfg, x0, t_end, rec);
  for (const auto& e : res.events) traj.add_event(e);
  traj.set_stats(res.stats);
  return traj;
}

Trajectory integrate(const ModelParams& p, const IntegratorConfig& cfg,
                     std::span<const double> x0, double t_end) {
  if (x0.size() != p.n_max()) {
    throw DimensionMismatch("initial condition has " + std::to_string(x0.size()) +
                            " components, model has " + std::to_string(p.n_max()));
  }
  const ChainSystem sys = make_system(p, SystemKind::Dyadic);
  return integrate_system(sys, p, SystemKind::Dyadic, cfg, x0, t_end);
}

// ---------------------------------------------------------------------------
// Event localization

namespace {

double bisect_first_true(const Trajectory& traj, const StatePredicate& pred, double lo,
                         double hi, std::vector<double>& buf) {
  // invariant: predicate false at lo, true at hi
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= 1e-10 * std::max(std::fabs(hi), 1e-300)) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    traj.eval(mid, buf);
    if (pred.holds(buf)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

std::optional<double> detect_event(const Trajectory& traj, const StatePredicate& pred) {
  std::vector<double> buf(traj.dim());
  if (pred.holds(traj.state(0))) return traj.time(0);
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const double t0 = traj.time(i);
    const double h = traj.time(i + 1) - t0;
    double prev_t = t0;
    for (int j = 1; j <= kScanPointsPerStep; ++j) {
      const double t = j == kScanPointsPerStep ? traj.time(i + 1) : t0 + h * j / kScanPointsPerStep;
      traj.eval(t, buf);
      if (pred.holds(buf)) return bisect_first_true(traj, pred, prev_t, t, buf);
      prev_t = t;
    }
  }
  return std::nullopt;
}

std::optional<double> detect_final_entry(const Trajectory& traj, const StatePredicate& pred) {
  std::vector<double> buf(traj.dim());
  if (!pred.holds(traj.state(traj.size() - 1))) return std::nullopt;
  // Walk backwards to the last probe point where the predicate fails.
  for (std::size_t i = traj.size() - 1; i-- > 0;) {
    const double t0 = traj.time(i);
    const double h = traj.time(i + 1) - t0;
    double next_t = traj.time(i + 1);
    for (int j = kScanPointsPerStep - 1; j >= 0; --j) {
      const double t = j == 0 ? t0 : t0 + h * j / kScanPointsPerStep;
      traj.eval(t, buf);
      if (!pred.holds(buf)) return bisect_first_true(traj, pred, t, next_t, buf);
      next_t = t;
    }
  }
  return traj.time(0);
}

}  // namespace dyadic
