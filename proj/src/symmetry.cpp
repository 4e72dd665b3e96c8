#include "dyadic/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dyadic/errors.hpp"

namespace dyadic {

namespace {

std::size_t first_nonzero(std::span<const double> x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) return i + 1;
  }
  return 0;
}

// Copies events and stats with event times mapped by t -> t * time_factor.
void carry_over(const Trajectory& from, Trajectory& to, double time_factor) {
  for (auto e : from.events()) {
    e.time *= time_factor;
    to.add_event(e);
  }
  to.set_stats(from.stats());
}

}  // namespace

Trajectory transform_sign_flip(const Trajectory& sol, std::size_t nbar) {
  const std::size_t first = first_nonzero(sol.state(0));
  if (first == 0) throw PreconditionError("sign flip needs a nonzero initial state");
  if (nbar != first) {
    throw PreconditionError("sign flip index " + std::to_string(nbar) +
                            " is not the first nonzero shell (" + std::to_string(first) + ")");
  }
  const std::size_t n = sol.dim();
  const std::size_t j = nbar - 1;
  Trajectory out(sol.params(), sol.system(), sol.config());
  std::vector<double> x(n), dense(5 * n);
  auto flip = [&](std::span<const double> src) {
    std::copy(src.begin(), src.end(), x.begin());
    x[j] = -x[j];
  };
  flip(sol.state(0));
  out.start(sol.time(0), x);
  for (std::size_t i = 0; i + 1 < sol.size(); ++i) {
    flip(sol.state(i + 1));
    const auto d = sol.dense(i);
    std::copy(d.begin(), d.end(), dense.begin());
    for (std::size_t r = 0; r < 5; ++r) dense[r * n + j] = -dense[r * n + j];
    out.append(sol.time(i + 1), x, dense);
  }
  carry_over(sol, out, 1.0);
  return out;
}

Trajectory transform_shift(const Trajectory& sol, std::size_t nbar) {
  if (sol.system() != SystemKind::Dyadic) {
    throw PreconditionError("index shift applies to the dyadic system only");
  }
  const auto& p = sol.params();
  const std::size_t n = sol.dim();
  if (nbar < 2 || nbar > n) {
    throw PreconditionError("shift index must lie in [2, n_max], got " + std::to_string(nbar));
  }
  const auto x0 = sol.state(0);
  for (std::size_t i = 0; i + 1 < nbar; ++i) {
    if (x0[i] != 0.0) {
      throw PreconditionError("shift by " + std::to_string(nbar - 1) + " needs X_" +
                              std::to_string(i + 1) + " = 0 initially");
    }
  }
  const std::size_t m = n - nbar + 1;
  const double kt = p.k(nbar - 1);
  ModelParams q(p.beta(), m, p.closure());
  Trajectory out(q, SystemKind::Dyadic, sol.config());
  const std::size_t off = nbar - 1;
  std::vector<double> dense(5 * m);
  out.start(sol.time(0) * kt, sol.state(0).subspan(off, m));
  for (std::size_t i = 0; i + 1 < sol.size(); ++i) {
    const auto d = sol.dense(i);
    for (std::size_t r = 0; r < 5; ++r) {
      std::copy_n(d.begin() + static_cast<std::ptrdiff_t>(r * n + off), m,
                  dense.begin() + static_cast<std::ptrdiff_t>(r * m));
    }
    out.append(sol.time(i + 1) * kt, sol.state(i + 1).subspan(off, m), dense);
  }
  carry_over(sol, out, kt);
  return out;
}

Trajectory transform_scale(const Trajectory& sol, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw PreconditionError("scale factor must be positive and finite");
  }
  IntegratorConfig cfg = sol.config();
  cfg.atol *= alpha;
  Trajectory out(sol.params(), sol.system(), cfg);
  const std::size_t n = sol.dim();
  std::vector<double> x(n), dense(5 * n);
  auto scaled = [&](std::span<const double> src, std::vector<double>& dst) {
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = alpha * src[i];
  };
  scaled(sol.state(0), x);
  out.start(sol.time(0) / alpha, x);
  for (std::size_t i = 0; i + 1 < sol.size(); ++i) {
    scaled(sol.state(i + 1), x);
    scaled(sol.dense(i), dense);
    out.append(sol.time(i + 1) / alpha, x, dense);
  }
  carry_over(sol, out, 1.0 / alpha);
  return out;
}

ResidualReport residual_check(const Trajectory& traj) {
  const ChainSystem sys = make_system(traj.params(), traj.system());
  const auto& cfg = traj.config();
  const std::size_t n = traj.dim();
  ResidualReport rep;
  constexpr double kDelta = 1e-3;
  std::vector<double> xm(n), f(n), a(n), b(n), c(n), d(n);
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const auto dense = traj.dense(i);
    const double h = traj.time(i + 1) - traj.time(i);
    dense_extension(dense, 0.5, xm);
    dense_extension(dense, 0.5 - 2.0 * kDelta, a);
    dense_extension(dense, 0.5 - kDelta, b);
    dense_extension(dense, 0.5 + kDelta, c);
    dense_extension(dense, 0.5 + 2.0 * kDelta, d);
    sys.rhs(xm, f);
    const double tol = cfg.atol + cfg.rtol * sup_norm(xm);
    for (std::size_t k = 0; k < n; ++k) {
      // d/ds of the extension; h * F is the same quantity from the vector field
      const double ds = (a[k] - 8.0 * b[k] + 8.0 * c[k] - d[k]) / (12.0 * kDelta);
      const double defect = std::fabs(ds - h * f[k]) / tol;
      if (defect > rep.max_defect || std::isnan(defect)) {
        rep.max_defect = std::isnan(defect) ? HUGE_VAL : defect;
        rep.worst_time = traj.time(i) + 0.5 * h;
        rep.worst_shell = k + 1;
      }
    }
    ++rep.probes;
  }
  return rep;
}

}  // namespace dyadic
