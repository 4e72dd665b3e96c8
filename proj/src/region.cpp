#include "dyadic/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dyadic/errors.hpp"

namespace dyadic {

void RegionParams::validate() const {
  if (!(delta > 0 && delta < 1)) throw InvalidArgument("region delta must lie in (0, 1)");
  if (!(c >= 0 && c < 1)) throw InvalidArgument("region c must lie in [0, 1)");
  if (!(theta > 0 && theta < 1)) throw InvalidArgument("region theta must lie in (0, 1)");
  if (!(m > 0 && m < 1)) throw InvalidArgument("region m must lie in (0, 1)");
}

Polynomial RegionParams::h() const {
  const Rational w = 1 - delta;
  const Polynomial u = Polynomial::linear(1, -delta);
  return (c / (w * w * w)) * (u * u * u);
}

Polynomial RegionParams::g() const { return Polynomial::linear(m, theta); }

Rational RegionParams::g_domain_end() const { return (1 - theta) / m; }

ControlPolynomials build_polynomials(const RegionParams& r) {
  r.validate();
  const Polynomial x = Polynomial::monomial(1, 1);
  const Polynomial h = r.h();
  const Polynomial g = r.g();
  const Polynomial one = Polynomial::constant(1);

  const Polynomial phi1 = x * x - Rational(2) * (h * g.compose(h));
  const Polynomial phi2 = -(h.derivative() * (one - Rational(2) * (x * h))) + Rational(2) * phi1;
  const Polynomial phi3 = x * x - Rational(2) * (g * h.compose(g));
  const Polynomial phi4 = -(Rational(2) * r.m) * (x * g) - Rational(2) * phi3;

  const Rational end = r.g_domain_end();
  return {
      {"phi1", phi1, r.delta, 1, true},
      {"phi2", phi2, r.delta, 1, true},
      {"phi3", phi3, 0, end, false},
      {"phi4", phi4, 0, end, true},
  };
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::CertifiedPositive: return "certified_positive";
    case Verdict::CertifiedNegative: return "certified_negative";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Certificate certify_sign(const ControlPolynomial& cp, std::size_t grid) {
  if (grid < 2) throw InvalidArgument("certification grid needs at least two points");
  Certificate cert;
  cert.name = cp.name;
  cert.poly = cp.poly;
  cert.lo = cp.lo;
  cert.hi = cp.hi;
  cert.grid_points = grid;
  const double lo = to_double(cp.lo);
  const double hi = to_double(cp.hi);
  cert.spacing = (hi - lo) / static_cast<double>(grid - 1);
  cert.lipschitz = cp.poly.lipschitz_bound(lo, hi);
  // Every point of the domain is within spacing/2 of a node; the full spacing
  // also absorbs rounding of the nodes themselves.
  cert.slack = cert.lipschitz * cert.spacing * (1.0 + 1e-12);
  double lower = std::numeric_limits<double>::infinity();
  double upper = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid; ++i) {
    const double x = i + 1 == grid ? hi : lo + static_cast<double>(i) * cert.spacing;
    const double v = cp.poly.eval(x);
    const double e = cp.poly.eval_error_bound(x);
    lower = std::min(lower, v - e);
    upper = std::max(upper, v + e);
  }
  cert.grid_min = lower;
  cert.grid_max = upper;
  if (lower > cert.slack) {
    cert.verdict = Verdict::CertifiedPositive;
  } else if (upper < -cert.slack) {
    cert.verdict = Verdict::CertifiedNegative;
  }
  return cert;
}

CertificateReport certify_signs(const ControlPolynomials& cp, std::size_t grid) {
  CertificateReport rep;
  rep.all_expected = true;
  for (const auto* p : cp.all()) {
    rep.certificates.push_back(certify_sign(*p, grid));
    const Verdict want = p->expect_positive ? Verdict::CertifiedPositive : Verdict::CertifiedNegative;
    rep.all_expected = rep.all_expected && rep.certificates.back().verdict == want;
  }
  return rep;
}

std::vector<double> y_vector_field(const ModelParams& p, std::span<const double> y) {
  if (y.size() != p.n_max()) {
    throw DimensionMismatch("state has " + std::to_string(y.size()) + " components, model has " +
                            std::to_string(p.n_max()));
  }
  const ModelParams mirror(p.beta(), p.n_max(), Closure::Mirror);
  const ChainSystem sys = make_system(mirror, SystemKind::Rescaled);
  std::vector<double> out(y.size());
  sys.rhs(y, out);
  return out;
}

std::vector<double> to_rescaled(double beta, std::span<const double> x) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = rescaling_weight(beta, i + 1) * x[i];
  return y;
}

std::vector<double> from_rescaled(double beta, std::span<const double> y) {
  std::vector<double> x(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) x[i] = y[i] / rescaling_weight(beta, i + 1);
  return x;
}

RegionBounds::RegionBounds(const RegionParams& r)
    : delta_(to_double(r.delta)),
      c_(to_double(r.c)),
      theta_(to_double(r.theta)),
      m_(to_double(r.m)),
      inv_width_(1.0 / (1.0 - delta_)) {
  r.validate();
}

double RegionBounds::h(double x) const {
  const double u = (x - delta_) * inv_width_;
  return c_ * u * u * u;
}

Membership region_membership(const RegionBounds& b, std::span<const double> y) {
  if (y.size() < 2) throw DimensionMismatch("region membership needs at least two shells");
  Membership w;
  w.margin = std::numeric_limits<double>::infinity();
  auto consider = [&](double margin, std::size_t idx, const char* what) {
    if (margin < w.margin || std::isnan(margin)) {
      w.margin = std::isnan(margin) ? -HUGE_VAL : margin;
      w.index = idx;
      w.constraint = what;
    }
  };
  for (std::size_t i = 0; i < y.size(); ++i) {
    consider(y[i], i + 1, "lower");
    consider(1.0 - y[i], i + 1, "upper");
  }
  for (std::size_t i = 0; i + 1 < y.size(); ++i) {
    consider(y[i + 1] - b.h(y[i]), i + 1, "h");
    consider(b.g(y[i]) - y[i + 1], i + 1, "g");
  }
  w.inside = w.margin >= 0.0;
  return w;
}

Membership region_membership(const RegionParams& r, std::span<const double> y) {
  return region_membership(RegionBounds(r), y);
}

std::vector<double> sample_region(const RegionParams& r, std::size_t n, std::mt19937_64& rng) {
  const RegionBounds b(r);
  std::vector<double> y(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  y[0] = unit(rng);
  for (std::size_t i = 1; i < n; ++i) {
    const double lo = std::max(0.0, b.h(y[i - 1]));
    const double hi = std::min(1.0, b.g(y[i - 1]));
    y[i] = std::clamp(lo + (hi - lo) * unit(rng), lo, hi);
  }
  return y;
}

namespace {

// Y_n' / c_n at a sampled point may exceed zero by this much near Y_n = 1.
constexpr double kBoundarySlack = 1e-5;
constexpr double kBoundaryBand = 1e-6;

class InvarianceObserver final : public StepObserver {
 public:
  InvarianceObserver(const RegionBounds& b, std::size_t n, InvarianceReport& rep)
      : bounds_(b), buf_(n), rep_(rep) {}

  void on_start(double t0, std::span<const double> y0) override { sample(t0, y0); }

  void on_step(const StepView& s) override {
    ++rep_.steps;
    dense_extension(s.dense, 0.5, buf_);
    sample(s.t0 + 0.5 * s.h, buf_);
    sample(s.t0 + s.h, s.x1);
  }

 private:
  void sample(double t, std::span<const double> y) {
    ++rep_.samples;
    const Membership m = region_membership(bounds_, y);
    if (m.margin < rep_.min_margin) {
      rep_.min_margin = m.margin;
      rep_.worst_time = t;
      rep_.worst_index = m.index;
      rep_.worst_constraint = m.constraint;
    }
    if (m.margin < -kRegionTolerance) return;
    const std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] < 1.0 - kBoundaryBand) continue;
      ++rep_.boundary_checks;
      const double left = i == 0 ? 0.0 : y[i - 1];
      const double right = i + 1 == n ? y[i] : y[i + 1];
      // Y_n' / c_n
      const double bracket = left * left - 2.0 * y[i] * right;
      if (bracket > kBoundarySlack) ++rep_.boundary_violations;
    }
  }

  const RegionBounds& bounds_;
  std::vector<double> buf_;
  InvarianceReport& rep_;
};

}  // namespace

InvarianceReport check_invariance(const ModelParams& p, const RegionParams& r,
                                  std::span<const double> y0, double t_end,
                                  const IntegratorConfig& cfg) {
  if (y0.size() != p.n_max()) {
    throw DimensionMismatch("initial condition has " + std::to_string(y0.size()) +
                            " components, model has " + std::to_string(p.n_max()));
  }
  const RegionBounds b(r);
  const Membership start = region_membership(b, y0);
  if (!start.inside) {
    throw PreconditionError("initial data outside B: constraint " + start.constraint + " at " +
                            std::to_string(start.index) + " has margin " +
                            std::to_string(start.margin));
  }
  const ModelParams mirror(p.beta(), p.n_max(), Closure::Mirror);
  const ChainSystem sys = make_system(mirror, SystemKind::Rescaled);
  InvarianceReport rep;
  rep.min_margin = std::numeric_limits<double>::infinity();
  rep.within_hypothesis = p.beta() >= 1.0;
  InvarianceObserver obs(b, p.n_max(), rep);
  integrate_system(sys, cfg, y0, t_end, obs);
  return rep;
}

double decay_constant(double beta) { return 13.0 * std::exp2((8.0 + beta) / 3.0); }

DecayAccumulator::DecayAccumulator(const ModelParams& p, double t_min)
    : weight_(p.n_max()), constant_(decay_constant(p.beta())), buf_(p.n_max()) {
  for (std::size_t i = 0; i < weight_.size(); ++i) weight_[i] = rescaling_weight(p.beta(), i + 1);
  rep_.t_min = t_min;
  rep_.within_hypothesis = p.beta() >= 1.0;
}

void DecayAccumulator::on_start(double t0, std::span<const double> x0) {
  double sup = 0.0;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    sup = std::max(sup, weight_[i] * x0[i]);
    if (x0[i] < 0.0) rep_.within_hypothesis = false;
  }
  rep_.initial_sup = sup;
  rep_.norm = l2_norm(x0);
  sample(t0, x0);
}

void DecayAccumulator::on_step(const StepView& s) {
  dense_extension(s.dense, 0.5, buf_);
  sample(s.t0 + 0.5 * s.h, buf_);
  sample(s.t0 + s.h, s.x1);
}

void DecayAccumulator::sample(double t, std::span<const double> x) {
  ++rep_.samples;
  double sup = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sup = std::max(sup, weight_[i] * x[i]);
  rep_.max_sup = std::max(rep_.max_sup, sup);
  if (rep_.initial_sup > 0.0) rep_.max_uniform_ratio = rep_.max_sup / rep_.initial_sup;
  if (t >= rep_.t_min) {
    const double bound = constant_ * std::cbrt(rep_.norm * rep_.norm) / std::cbrt(t);
    const double ratio = bound > 0.0 ? sup / bound : (sup > 0.0 ? HUGE_VAL : 0.0);
    if (ratio > rep_.max_decay_ratio) {
      rep_.max_decay_ratio = ratio;
      rep_.worst_decay_time = t;
    }
  }
}

DecayReport decay_bounds_check(const Trajectory& traj, double t_min) {
  if (traj.system() != SystemKind::Dyadic) {
    throw PreconditionError("decay bounds apply to trajectories of the X-system");
  }
  DecayAccumulator acc(traj.params(), t_min);
  replay(traj, acc);
  return acc.report();
}

}  // namespace dyadic
