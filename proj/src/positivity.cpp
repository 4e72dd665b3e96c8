#include "dyadic/positivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dyadic/errors.hpp"

namespace dyadic {

namespace {

double k_of(const ModelParams& p, std::size_t n) {
  return n <= p.n_max() + 1 ? p.k(n) : dyadic_coefficient(p.beta(), static_cast<double>(n));
}

}  // namespace

double waiting_time(const ModelParams& p, double eta, double a, std::size_t n) {
  if (!(a > 0.0)) throw InvalidArgument("waiting time needs a > 0");
  if (!(eta > 0.0)) throw InvalidArgument("waiting time needs eta > 0");
  if (n < 1) throw InvalidArgument("shell index is 1-based");
  const double a4 = a * a * a * a;
  const double num = std::exp2(2.0 * p.beta()) * eta * eta + a4;
  return num / (k_of(p, n + 1) * a4 * std::sqrt(eta));
}

PositivitySchedule build_schedule(const ModelParams& p, std::span<const double> x0, double a,
                                  const ScheduleOptions& opt) {
  const std::size_t N = p.n_max();
  if (x0.size() != N) throw DimensionMismatch("initial condition length differs from n_max");
  if (!(x0[0] > 0.0)) throw PreconditionError("positivity schedule needs x_1 > 0");
  if (!(opt.delta > 0.0 && opt.delta < 1.0)) throw PreconditionError("delta must lie in (0, 1)");
  if (!(opt.C > 0.0)) throw PreconditionError("C must be positive");
  if (!(opt.eps > 0.0 && opt.eps <= 1.0)) throw PreconditionError("eps must lie in (0, 1]");

  PositivitySchedule s;
  s.options = opt;
  s.level = a;
  const double x1 = x0[0];
  const double norm2 = energy_profile(x0).total;
  const double expo = -(1.0 - opt.delta) / 3.0;

  s.omega.resize(N);
  for (std::size_t n = 1; n <= N; ++n) {
    std::size_t i = n;
    while (i < N && x0[i] < 0.0) ++i;  // x0[i] is x_{i+1}
    s.omega[n - 1] = i;
  }
  s.eta.assign(N, norm2);
  s.v.resize(N);
  s.s.resize(N);
  s.a_seq.resize(N);
  for (std::size_t n = 1; n <= N; ++n) {
    const double kn = p.k(n);
    s.v[n - 1] = waiting_time(p, norm2, a, n);
    s.s[n - 1] = std::exp2(1.0 + p.beta()) / x1 * std::pow(kn, expo);
    s.a_seq[n - 1] = opt.C * std::pow(kn, expo);
  }
  // a_n = C r^n with r = 2^(-beta (1-delta)/3)
  const double r = std::exp2(p.beta() * expo);
  s.a_sum = opt.C * r / (1.0 - r);
  const double radicand = x1 * x1 - opt.eps * s.a_sum;
  if (!(radicand > 0.0)) throw GammaUndefined(radicand);
  s.gamma = std::sqrt(radicand);

  const double inv_eps2 = 1.0 / (opt.eps * opt.eps);
  s.t.resize(N - 1);
  s.t[0] = waiting_time(p, norm2, x1, 1);
  for (std::size_t n = 1; n + 1 < N; ++n) {
    s.t[n] = s.t[n - 1] + inv_eps2 * s.s[n - 1] + waiting_time(p, norm2, s.gamma, n + 1);
  }
  s.tau_bound = s.t.back();
  return s;
}

std::optional<double> measure_tau(const Trajectory& traj) {
  StatePredicate nonneg{[](std::span<const double> x) { return *std::min_element(x.begin(), x.end()); },
                        false};
  return detect_final_entry(traj, nonneg);
}

double min_component_after(const Trajectory& traj, double t_from) {
  double lo = std::numeric_limits<double>::infinity();
  std::vector<double> buf(traj.dim());
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    if (traj.time(i + 1) < t_from) continue;
    const double t0 = traj.time(i);
    const double h = traj.time(i + 1) - t0;
    for (int j = 0; j <= kScanPointsPerStep; ++j) {
      const double t = t0 + h * j / kScanPointsPerStep;
      if (t < t_from) continue;
      traj.eval(std::min(t, traj.time(i + 1)), buf);
      lo = std::min(lo, *std::min_element(buf.begin(), buf.end()));
    }
  }
  if (traj.size() == 1) {
    const auto x = traj.state(0);
    lo = *std::min_element(x.begin(), x.end());
  }
  return lo;
}

}  // namespace dyadic
