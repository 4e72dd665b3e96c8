#include <catch_amalgamated.hpp>
#include <cmath>
#include <cstring>
#include <vector>

#include "dyadic/errors.hpp"
#include "dyadic/integrator.hpp"
#include "oracles.hpp"

using namespace dyadic;
using V = std::vector<double>;

namespace {

double energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

V at(const Trajectory& tr, double t) { return dense_eval(tr, t).x; }

}  // namespace

TEST_CASE("zero data stays at rest") {
  const ModelParams p(1.0, 6, Closure::Mirror);
  const auto tr = integrate(p, {}, V(6, 0.0), 3.0);
  CHECK(tr.t_end() == 3.0);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    for (double v : tr.state(i)) CHECK(v == 0.0);
  }
}

TEST_CASE("galerkin truncation conserves energy") {
  for (double beta : {1.0, 2.0}) {
    const ModelParams p(beta, 8, Closure::GalerkinZero);
    const V x0{1.0, -0.5, 0.25, 0.1, 0.0, 0.3, -0.2, 0.05};
    IntegratorConfig cfg;
    cfg.rtol = 1e-10;
    cfg.atol = 1e-13;
    const auto tr = integrate(p, cfg, x0, 5.0);
    const double e0 = energy(x0);
    for (std::size_t i = 0; i < tr.size(); i += 1 + tr.size() / 50) {
      CHECK(std::fabs(energy(tr.state(i)) - e0) <= 1e-8 * e0);
    }
    CHECK(std::fabs(energy(tr.state(tr.size() - 1)) - e0) <= 1e-8 * e0);
  }
}

TEST_CASE("mirror closure dissipates nonnegative data") {
  const ModelParams p(1.0, 6, Closure::Mirror);
  const V x0{1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125};
  const auto tr = integrate(p, {}, x0, 4.0);
  double prev = energy(x0);
  for (std::size_t i = 1; i < tr.size(); ++i) {
    const double e = energy(tr.state(i));
    CHECK(e <= prev * (1.0 + 1e-9));
    prev = e;
  }
  CHECK(prev < energy(x0));
}

TEST_CASE("final state matches a fixed-step RK4 reference") {
  const V x0{1.0, 0.0, 0.0, 0.0, 0.0};
  for (bool mirror : {false, true}) {
    const ModelParams p(1.0, 5, mirror ? Closure::Mirror : Closure::GalerkinZero);
    IntegratorConfig cfg;
    cfg.rtol = 1e-11;
    cfg.atol = 1e-14;
    const auto tr = integrate(p, cfg, x0, 2.0);
    const auto ref = oracle::rk4(1.0, x0, mirror, 2.0, 1e-4);
    const auto end = tr.state(tr.size() - 1);
    for (std::size_t i = 0; i < 5; ++i) CHECK(end[i] == Catch::Approx(ref[i]).margin(1e-8));
  }
}

TEST_CASE("dense output reproduces samples and interior values") {
  const ModelParams p(1.5, 4, Closure::GalerkinZero);
  const V x0{1.0, 0.2, -0.1, 0.0};
  IntegratorConfig cfg;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-13;
  const auto tr = integrate(p, cfg, x0, 1.0);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const auto x = at(tr, tr.time(i));
    for (std::size_t k = 0; k < 4; ++k) CHECK(x[k] == Catch::Approx(tr.state(i)[k]).margin(1e-15));
  }
  REQUIRE(tr.steps() >= 2);
  const double tm = 0.5 * (tr.time(1) + tr.time(2));
  const auto ref = oracle::rk4(1.5, x0, false, tm, tm / 2000.0);
  const auto x = at(tr, tm);
  for (std::size_t k = 0; k < 4; ++k) CHECK(x[k] == Catch::Approx(ref[k]).margin(1e-8));
  CHECK_THROWS(at(tr, 1.5));
}

TEST_CASE("dense output converges at fourth order or better") {
  // interior error at step midpoints against RK4 with a tiny step
  const ModelParams p(1.0, 3, Closure::GalerkinZero);
  const V x0{1.0, 0.0, 0.0};
  auto mid_error = [&](double h) {
    IntegratorConfig cfg;
    cfg.h_init = h;
    cfg.rtol = 1.0;  // accept every step at the initial size
    cfg.atol = 1.0;
    cfg.cfl = 1.0;
    const auto tr = integrate(p, cfg, x0, 4.0 * h);
    const double tm = 0.5 * (tr.time(0) + tr.time(1));
    const auto ref = oracle::rk4(1.0, x0, false, tm, tm / 400.0);
    const auto x = at(tr, tm);
    double e = 0.0;
    for (std::size_t k = 0; k < 3; ++k) e = std::max(e, std::fabs(x[k] - ref[k]));
    return e;
  };
  const double e1 = mid_error(0.1), e2 = mid_error(0.05);
  CHECK(std::log2(e1 / e2) > 3.5);
}

TEST_CASE("event detection") {
  const ModelParams p(1.0, 3, Closure::GalerkinZero);
  const V x0{1.0, 0.0, 0.0};
  IntegratorConfig cfg;
  cfg.rtol = 1e-11;
  cfg.atol = 1e-14;
  const auto tr = integrate(p, cfg, x0, 3.0);

  SECTION("holds initially") {
    const auto t = detect_event(tr, {[](std::span<const double> x) { return x[0] - 0.5; }, true});
    REQUIRE(t);
    CHECK(*t == 0.0);
  }
  SECTION("never holds") {
    const auto t = detect_event(tr, {[](std::span<const double> x) { return x[1] - 2.0; }, true});
    CHECK_FALSE(t);
  }
  SECTION("crossing agrees with a fine RK4 scan") {
    const StatePredicate pred{[](std::span<const double> x) { return x[1] - 0.5; }, true};
    const auto t = detect_event(tr, pred);
    REQUIRE(t);
    const double dt = 1e-4;
    V x = x0;
    double t_ref = -1.0;
    for (int s = 1; s <= 30000; ++s) {
      const V y = oracle::rk4(1.0, x, false, dt, dt);
      if (y[1] > 0.5) {
        t_ref = (s - 1) * dt + dt * (0.5 - x[1]) / (y[1] - x[1]);
        break;
      }
      x = y;
    }
    REQUIRE(t_ref > 0.0);
    CHECK(*t == Catch::Approx(t_ref).margin(1e-6));
    CHECK(at(tr, *t)[1] == Catch::Approx(0.5).margin(1e-9));
  }
  SECTION("final entry") {
    // X_1 decreases monotonically from 1
    const StatePredicate pred{[](std::span<const double> x) { return 0.5 - x[0]; }, false};
    const auto first = detect_event(tr, pred);
    const auto last = detect_final_entry(tr, pred);
    REQUIRE(first);
    REQUIRE(last);
    CHECK(*first == Catch::Approx(*last).margin(1e-9));
    const StatePredicate never{[](std::span<const double> x) { return x[0] - 2.0; }, true};
    CHECK_FALSE(detect_final_entry(tr, never));
  }
}

TEST_CASE("integration is deterministic and time is increasing") {
  const ModelParams p(2.0, 10, Closure::Mirror);
  V x0(10);
  for (std::size_t i = 0; i < 10; ++i) x0[i] = std::pow(2.0, -static_cast<double>(i));
  const auto a = integrate(p, {}, x0, 1.0);
  const auto b = integrate(p, {}, x0, 1.0);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.time(i) == b.time(i));
    CHECK(std::memcmp(a.state(i).data(), b.state(i).data(), 10 * sizeof(double)) == 0);
    if (i > 0) CHECK(a.time(i) > a.time(i - 1));
  }
  CHECK(a.t_end() == 1.0);
}

TEST_CASE("step budget") {
  const ModelParams p(1.0, 6, Closure::Mirror);
  IntegratorConfig cfg;
  cfg.max_steps = 5;
  const V x0{1, 1, 1, 1, 1, 1};
  try {
    integrate(p, cfg, x0, 100.0);
    FAIL("expected StepBudgetExceeded");
  } catch (const StepBudgetExceeded& e) {
    CHECK(e.reached_time > 0.0);
    CHECK(e.reached_time < 100.0);
  }
}

TEST_CASE("stabilized method follows the explicit solution") {
  const ModelParams p(2.0, 12, Closure::Mirror);
  V x0(12, 0.0);
  x0[0] = 1.0;
  IntegratorConfig a, b;
  b.method = Method::ERK45Stabilized;
  const auto ta = integrate(p, a, x0, 2.0);
  const auto tb = integrate(p, b, x0, 2.0);
  const auto ea = ta.state(ta.size() - 1), eb = tb.state(tb.size() - 1);
  for (std::size_t i = 0; i < 12; ++i) CHECK(eb[i] == Catch::Approx(ea[i]).margin(1e-6));
  CHECK(tb.stats().accepted <= ta.stats().accepted);
}

TEST_CASE("configuration and input validation") {
  const ModelParams p(1.0, 3, Closure::Mirror);
  IntegratorConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.rtol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.cfl = 1.5;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.max_steps = 0;
  CHECK_THROWS_AS(integrate(p, cfg, V{1, 0, 0}, 1.0), InvalidArgument);
  CHECK_THROWS_AS(integrate(p, {}, V{1, 0}, 1.0), DimensionMismatch);
  CHECK_THROWS_AS(integrate(p, {}, V{1, 0, 0}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(integrate(p, {}, V{NAN, 0, 0}, 1.0), InvalidArgument);
  CHECK(parse_method(method_name(Method::ERK45Stabilized)) == Method::ERK45Stabilized);
  CHECK_THROWS_AS(parse_method("euler"), InvalidArgument);
}
