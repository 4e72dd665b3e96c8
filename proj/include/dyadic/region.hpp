#pragma once
// Invariant region for the rescaled system Y_n = 2^((beta-1)n/3) X_n.
//
//   A = {(x, y) in [0,1]^2 : h(x) <= y <= g(x)},  g(x) = m x + theta,
//   h(x) = c ((x - delta) / (1 - delta))^3,  B = {z in [0,1]^N : (z_n, z_{n+1}) in A}.
//
// Forward invariance of B reduces to the signs of four control polynomials,
// which are built with exact rational coefficients and certified on a grid
// with a Lipschitz slack.

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dyadic/integrator.hpp"
#include "dyadic/polynomial.hpp"

namespace dyadic {

struct RegionParams {
  Rational delta{1, 12};
  Rational c{1, 2};
  Rational theta{1, 2};
  Rational m{4, 5};

  // 0 < delta < 1, 0 <= c < 1, 0 < theta < 1, 0 < m < 1.
  void validate() const;

  Polynomial h() const;
  Polynomial g() const;
  // Right end of the domain of the lower control pair, (1 - theta) / m.
  Rational g_domain_end() const;

  friend bool operator==(const RegionParams&, const RegionParams&) = default;
};

struct ControlPolynomial {
  std::string name;
  Polynomial poly;
  Rational lo, hi;
  bool expect_positive;
};

struct ControlPolynomials {
  ControlPolynomial phi1, phi2, phi3, phi4;
  std::vector<const ControlPolynomial*> all() const { return {&phi1, &phi2, &phi3, &phi4}; }
};

ControlPolynomials build_polynomials(const RegionParams& r);

enum class Verdict { CertifiedPositive, CertifiedNegative, Inconclusive };
std::string_view verdict_name(Verdict v);

struct Certificate {
  std::string name;
  Polynomial poly;
  Rational lo, hi;
  Verdict verdict = Verdict::Inconclusive;
  std::size_t grid_points = 0;
  double lipschitz = 0.0;
  double spacing = 0.0;
  double grid_min = 0.0, grid_max = 0.0;  // extremes net of rounding error
  double slack = 0.0;                     // lipschitz * spacing
};

struct CertificateReport {
  std::vector<Certificate> certificates;
  // Every polynomial carries the sign the invariance argument needs.
  bool all_expected = false;
};

inline constexpr std::size_t kCertificationGrid = 10'000;

Certificate certify_sign(const ControlPolynomial& cp, std::size_t grid = kCertificationGrid);
CertificateReport certify_signs(const ControlPolynomials& cp,
                                std::size_t grid = kCertificationGrid);

// Y_n' = c_n (Y_{n-1}^2 - 2 Y_n Y_{n+1}) with the mirror closure Y_{N+1} = Y_N.
std::vector<double> y_vector_field(const ModelParams& p, std::span<const double> y);

// Y_n = 2^((beta-1)n/3) X_n and back.
std::vector<double> to_rescaled(double beta, std::span<const double> x);
std::vector<double> from_rescaled(double beta, std::span<const double> y);

// Floating-point boundaries evaluated once per query.
class RegionBounds {
 public:
  explicit RegionBounds(const RegionParams& r);
  double h(double x) const;
  double g(double x) const { return m_ * x + theta_; }
  double delta() const { return delta_; }

 private:
  double delta_, c_, theta_, m_, inv_width_;
};

struct Membership {
  bool inside = true;
  std::size_t index = 0;  // 1-based shell (or first shell of the pair)
  std::string constraint;  // "lower", "upper", "h", "g"
  double margin = 0.0;     // smallest signed slack; negative means violated
};

Membership region_membership(const RegionParams& r, std::span<const double> y);
Membership region_membership(const RegionBounds& b, std::span<const double> y);

// Random point of B drawn shell by shell: y_1 uniform in [0,1], then y_{n+1}
// uniform in [max(0, h(y_n)), min(1, g(y_n))].
std::vector<double> sample_region(const RegionParams& r, std::size_t n, std::mt19937_64& rng);

inline constexpr double kRegionTolerance = 1e-8;

struct InvarianceReport {
  double min_margin = 0.0;
  double worst_time = 0.0;
  std::size_t worst_index = 0;
  std::string worst_constraint;
  std::size_t samples = 0;
  // Samples inside B with Y_n >= 1 - 1e-6, and those among them where
  // Y_n' / c_n exceeds 1e-5 (the field must point inward at Y_n = 1).
  std::size_t boundary_checks = 0;
  std::size_t boundary_violations = 0;
  bool within_hypothesis = true;  // beta >= 1
  long steps = 0;
  bool passes() const { return min_margin >= -kRegionTolerance && boundary_violations == 0; }
};

// Integrates the Y-system (mirror closure) from y0 and tracks the membership
// margin at every accepted state and at each step midpoint.
InvarianceReport check_invariance(const ModelParams& p, const RegionParams& r,
                                  std::span<const double> y0, double t_end,
                                  const IntegratorConfig& cfg = {});

// Constant in the t^(-1/3) decay bound: 13 * 2^((8+beta)/3).
double decay_constant(double beta);

struct DecayReport {
  double initial_sup = 0.0;   // sup_n k_n^(1/3 - 1/(3 beta)) x_n
  double max_sup = 0.0;       // over every sample
  double max_uniform_ratio = 0.0;  // max_sup / initial_sup
  double norm = 0.0;               // |x0|
  double max_decay_ratio = 0.0;    // max over t >= t_min of sup(t) / (C |x|^(2/3) t^(-1/3))
  double worst_decay_time = 0.0;
  double t_min = 1e-3;
  std::size_t samples = 0;
  bool within_hypothesis = true;  // nonnegative data, beta >= 1
  bool uniform_ok(double rel = 1e-6) const {
    return max_sup <= 12.0 * initial_sup * (1.0 + rel);
  }
  bool decay_ok() const { return max_decay_ratio <= 1.0; }
};

// Streaming version: feed it to integrate_system() to avoid storing the run.
class DecayAccumulator final : public StepObserver {
 public:
  DecayAccumulator(const ModelParams& p, double t_min = 1e-3);
  void on_start(double t0, std::span<const double> x0) override;
  void on_step(const StepView& step) override;
  const DecayReport& report() const { return rep_; }

 private:
  void sample(double t, std::span<const double> x);
  std::vector<double> weight_;
  double constant_;
  DecayReport rep_;
  std::vector<double> buf_;
};

DecayReport decay_bounds_check(const Trajectory& traj, double t_min = 1e-3);

}  // namespace dyadic
