#include "dyadic/regularity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "dyadic/errors.hpp"

namespace dyadic {

OccupationQuery::OccupationQuery(std::vector<double> a, double horizon)
    : a_(std::move(a)), horizon_(horizon) {
  if (a_.empty()) throw InvalidArgument("threshold profile is empty");
  if (!(horizon_ > 0.0)) throw InvalidArgument("occupation horizon must be positive");
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (!(a_[i] > 0.0)) throw InvalidArgument("thresholds must be positive");
    if (i > 0 && a_[i] > a_[i - 1]) throw InvalidArgument("thresholds must be nonincreasing");
  }
}

OccupationQuery OccupationQuery::power_profile(const ModelParams& p, double M, double power,
                                               double horizon) {
  std::vector<double> a(p.n_max());
  for (std::size_t n = 1; n <= p.n_max(); ++n) a[n - 1] = M * std::pow(p.k(n), -power);
  return OccupationQuery(std::move(a), horizon);
}

namespace {

void require_horizon(const Trajectory& traj, double T) {
  if (!(T > traj.t_begin()) || T > traj.t_end()) {
    throw PreconditionError("horizon " + std::to_string(T) + " outside the trajectory range");
  }
}

void require_nonnegative(std::span<const double> x0) {
  for (double v : x0) {
    if (v < 0.0) throw PreconditionError("initial data must be nonnegative");
  }
}

double component_at(const Trajectory& traj, std::size_t n, double t, std::vector<double>& buf) {
  traj.eval(t, buf);
  return buf[n];
}

// Crossing of X_n through level between lo (side `above_lo`) and hi.
double bisect_crossing(const Trajectory& traj, std::size_t n, double level, double lo, double hi,
                       bool above_lo, std::vector<double>& buf) {
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= 1e-10 * std::max(std::fabs(hi), 1e-300)) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const bool above = component_at(traj, n, mid, buf) > level;
    if (above == above_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<std::vector<Interval>> superlevel_intervals(const Trajectory& traj,
                                                        std::span<const double> levels, double T) {
  const std::size_t N = traj.dim();
  if (levels.size() != N) throw DimensionMismatch("one level per shell is required");
  require_horizon(traj, T);
  std::vector<std::vector<Interval>> out(N);
  std::vector<double> x(N), buf(N);
  std::vector<char> above(N);
  std::vector<double> start(N, 0.0);
  const double t0 = traj.t_begin();
  traj.eval(t0, x);
  for (std::size_t n = 0; n < N; ++n) above[n] = x[n] > levels[n];
  double prev_t = t0;
  for (std::size_t i = 0; i + 1 < traj.size() && traj.time(i) < T; ++i) {
    const double ts = traj.time(i);
    const double h = traj.time(i + 1) - ts;
    for (int j = 1; j <= kScanPointsPerStep; ++j) {
      double t = j == kScanPointsPerStep ? traj.time(i + 1) : ts + h * j / kScanPointsPerStep;
      t = std::min(t, T);
      if (t <= prev_t) continue;
      traj.eval(t, x);
      for (std::size_t n = 0; n < N; ++n) {
        const bool now = x[n] > levels[n];
        if (now == static_cast<bool>(above[n])) continue;
        const double tc = bisect_crossing(traj, n, levels[n], prev_t, t, above[n], buf);
        if (now) {
          start[n] = tc;
        } else {
          out[n].push_back({start[n], tc});
        }
        above[n] = now;
      }
      prev_t = t;
    }
  }
  for (std::size_t n = 0; n < N; ++n) {
    if (above[n]) out[n].push_back({start[n], T});
  }
  return out;
}

std::vector<Interval> merge_intervals(std::vector<Interval> v) {
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

double total_length(std::span<const Interval> v) {
  double s = 0.0;
  for (const auto& iv : v) s += iv.hi - iv.lo;
  return s;
}

double occupation_constant(double beta) { return std::exp2(7.0 + beta); }
double shell_occupation_constant(double beta) { return std::exp2(8.0 + beta); }

OccupationResult occupation_measure(const Trajectory& traj, const OccupationQuery& q) {
  const auto& p = traj.params();
  if (q.a().size() != traj.dim()) {
    throw DimensionMismatch("threshold profile has " + std::to_string(q.a().size()) +
                            " entries, model has " + std::to_string(traj.dim()));
  }
  require_nonnegative(traj.state(0));
  const auto per = superlevel_intervals(traj, q.a(), q.horizon());
  OccupationResult r;
  std::vector<Interval> all;
  for (const auto& v : per) {
    r.per_shell.push_back(total_length(v));
    all.insert(all.end(), v.begin(), v.end());
  }
  r.measured = total_length(merge_intervals(std::move(all)));
  double sum = 0.0;
  for (std::size_t n = 1; n <= traj.dim(); ++n) {
    const double a = q.a()[n - 1];
    sum += 1.0 / (p.k(n) * a * a * a);
  }
  r.bound = occupation_constant(p.beta()) * energy_profile(traj.state(0)).total * sum;
  return r;
}

std::vector<ShellOccupation> shell_occupation(const Trajectory& traj, double M, double T) {
  if (!(M > 0.0)) throw InvalidArgument("occupation level must be positive");
  require_nonnegative(traj.state(0));
  const auto& p = traj.params();
  const std::vector<double> levels(traj.dim(), M);
  const auto per = superlevel_intervals(traj, levels, T);
  const double e0 = energy_profile(traj.state(0)).total;
  std::vector<ShellOccupation> out;
  for (std::size_t n = 1; n <= traj.dim(); ++n) {
    out.push_back({n, total_length(per[n - 1]),
                   shell_occupation_constant(p.beta()) * e0 / (p.k(n) * M * M * M)});
  }
  return out;
}

double SupWeight::weight(const ModelParams& p, std::size_t n) const {
  const double kn = p.k(n);
  switch (kind) {
    case SupWeightKind::AlphaLog:
      return std::pow(static_cast<double>(n), -param) * std::cbrt(kn);
    case SupWeightKind::BetaCritical:
      return rescaling_weight(p.beta(), n);
    case SupWeightKind::EpsSuper:
      return std::pow(kn, 1.0 / 3.0 + param);
  }
  return 0.0;
}

std::pair<double, std::size_t> sup_functional(const ModelParams& p, std::span<const double> x,
                                              SupWeight w) {
  if (x.size() != p.n_max()) throw DimensionMismatch("state length differs from n_max");
  double best = w.weight(p, 1) * x[0];
  std::size_t arg = 1;
  for (std::size_t n = 2; n <= x.size(); ++n) {
    const double v = w.weight(p, n) * x[n - 1];
    if (v > best) {
      best = v;
      arg = n;
    }
  }
  return {best, arg};
}

namespace {

// 8-point Gauss-Legendre on [-1, 1], exact through degree 15.
constexpr std::array<double, 8> kGlNode{-0.9602898564975363, -0.7966664774136267,
                                        -0.5255324099163290, -0.1834346424956498,
                                        0.1834346424956498,  0.5255324099163290,
                                        0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeight{0.1012285362903763, 0.2223810344533745,
                                          0.3137066458778873, 0.3626837833783620,
                                          0.3626837833783620, 0.3137066458778873,
                                          0.2223810344533745, 0.1012285362903763};

}  // namespace

CubeReport cube_integral_check(const Trajectory& traj, std::size_t n, double T) {
  const auto& p = traj.params();
  const std::size_t N = traj.dim();
  if (n < 1 || n > N) throw InvalidArgument("shell index out of range");
  require_horizon(traj, T);
  CubeReport r;
  r.shell = n;
  const auto x0 = traj.state(0);
  const double norm = l2_norm(x0);
  const double c = shell_occupation_constant(p.beta());
  const double kn = p.k(n);
  const bool nonneg = std::all_of(x0.begin(), x0.end(), [](double v) { return v >= 0.0; });
  r.hypothesis = nonneg && kn * T * norm > c;
  r.bound = norm > 0.0 ? c * norm * norm / kn *
                             (1.0 + std::log(norm * T / c) +
                              static_cast<double>(n) * p.beta() * std::log(2.0))
                       : 0.0;
  r.flux_bound = norm * norm / kn;

  std::vector<double> x(N);
  for (std::size_t i = 0; i + 1 < traj.size() && traj.time(i) < T; ++i) {
    const double ts = traj.time(i);
    const double h = traj.time(i + 1) - ts;
    const double span = std::min(traj.time(i + 1), T) - ts;
    const double frac = span / h;
    const auto dense = traj.dense(i);
    double cube = 0.0, flux = 0.0;
    for (std::size_t q = 0; q < kGlNode.size(); ++q) {
      const double s = 0.5 * frac * (kGlNode[q] + 1.0);
      dense_extension(dense, s, x);
      const double xn = x[n - 1];
      const double next = n == N ? p.closure_value(x) : x[n];
      cube += kGlWeight[q] * xn * xn * xn;
      flux += kGlWeight[q] * xn * xn * next;
    }
    r.integral += 0.5 * span * cube;
    r.flux_integral += 0.5 * span * flux;
  }
  return r;
}

double psi_gap(const Trajectory& a, const Trajectory& b, double t) {
  if (!(a.params() == b.params()) || a.system() != b.system()) {
    throw InvalidArgument("psi gap needs trajectories of the same model");
  }
  const auto xa = a.state(0);
  const auto xb = b.state(0);
  if (!std::equal(xa.begin(), xa.end(), xb.begin(), xb.end())) {
    throw InvalidArgument("psi gap needs trajectories from the same initial condition");
  }
  std::vector<double> ya(a.dim()), yb(b.dim());
  a.eval(t, ya);
  b.eval(t, yb);
  double psi = 0.0;
  for (std::size_t n = 1; n <= ya.size(); ++n) {
    const double z = ya[n - 1] - yb[n - 1];
    psi += z * z * std::ldexp(1.0, -static_cast<int>(n));
  }
  return psi;
}

void EnergyRecorder::on_start(double t0, std::span<const double> x0) {
  samples_.assign(1, {t0, energy_profile(x0).total});
}

void EnergyRecorder::on_step(const StepView& s) {
  samples_.push_back({s.t0 + s.h, energy_profile(s.x1).total});
}

bool EnergyRecorder::stop_requested() const {
  return drop_ > 0.0 && samples_.back().E * drop_ <= samples_.front().E;
}

double loglog_slope(std::span<const EnergySample> samples, double E_lo, double E_hi) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t m = 0;
  for (const auto& s : samples) {
    if (!(s.t > 0.0) || s.E < E_lo || s.E > E_hi) continue;
    const double lx = std::log(s.t);
    const double ly = std::log(s.E);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mm = static_cast<double>(m);
  const double den = mm * sxx - sx * sx;
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (mm * sxy - sx * sy) / den;
}

}  // namespace dyadic
