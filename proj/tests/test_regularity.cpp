#include <catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "dyadic/errors.hpp"
#include "dyadic/regularity.hpp"

using namespace dyadic;
using V = std::vector<double>;

namespace {

Trajectory run(double beta, std::size_t N, const V& x0, double T, double rtol = 1e-10) {
  IntegratorConfig cfg;
  cfg.rtol = rtol;
  cfg.atol = rtol * 1e-3;
  return integrate(ModelParams(beta, N, Closure::Mirror), cfg, x0, T);
}

// Time spent above each level, counted on a uniform grid of dense evaluations.
std::vector<double> scan_lengths(const Trajectory& tr, const V& levels, double T, int samples) {
  std::vector<double> len(levels.size(), 0.0);
  const double dt = T / samples;
  for (int j = 0; j < samples; ++j) {
    const auto x = dense_eval(tr, (j + 0.5) * dt).x;
    for (std::size_t n = 0; n < levels.size(); ++n) {
      if (x[n] > levels[n]) len[n] += dt;
    }
  }
  return len;
}

}  // namespace

TEST_CASE("query validation") {
  CHECK_THROWS_AS(OccupationQuery({}, 1.0), InvalidArgument);
  CHECK_THROWS_AS(OccupationQuery({1.0, 2.0}, 1.0), InvalidArgument);
  CHECK_THROWS_AS(OccupationQuery({1.0, 0.0}, 1.0), InvalidArgument);
  CHECK_THROWS_AS(OccupationQuery({1.0}, 0.0), InvalidArgument);
  const ModelParams p(1.0, 4, Closure::Mirror);
  const auto q = OccupationQuery::power_profile(p, 2.0, 1.0 / 3.0, 5.0);
  REQUIRE(q.a().size() == 4);
  CHECK(q.a()[2] == Catch::Approx(1.0));
  CHECK(q.horizon() == 5.0);
}

TEST_CASE("interval merging") {
  const auto m = merge_intervals({{3, 4}, {0, 1}, {0.5, 2}, {4, 5}});
  REQUIRE(m.size() == 2);
  CHECK(m[0].lo == 0);
  CHECK(m[0].hi == 2);
  CHECK(m[1].lo == 3);
  CHECK(m[1].hi == 5);
  CHECK(total_length(m) == 4.0);
  CHECK(merge_intervals({}).empty());
}

TEST_CASE("constants") {
  CHECK(occupation_constant(1.0) == 256.0);
  CHECK(shell_occupation_constant(2.0) == 1024.0);
}

TEST_CASE("levels above the data norm are never reached") {
  const V x0{1.0, 0.5, 0.25, 0.125, 0.0};
  const auto tr = run(1.0, 5, x0, 5.0);
  const double twice = 2.0 * l2_norm(x0);
  const auto res = occupation_measure(tr, OccupationQuery(V(5, twice), 5.0));
  CHECK(res.measured == 0.0);
  CHECK(res.bound > 0.0);
  for (double v : res.per_shell) CHECK(v == 0.0);
}

TEST_CASE("superlevel sets agree with a dense scan") {
  const V x0{1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  const double T = 4.0;
  const auto tr = run(1.0, 6, x0, T);
  const V levels{0.3, 0.2, 0.15, 0.1, 0.05, 0.02};
  const auto iv = superlevel_intervals(tr, levels, T);
  const auto ref = scan_lengths(tr, levels, T, 400000);
  for (std::size_t n = 0; n < 6; ++n) {
    CHECK(total_length(iv[n]) == Catch::Approx(ref[n]).margin(1e-4));
    for (const auto& i : iv[n]) {
      CHECK(i.lo < i.hi);
      CHECK(dense_eval(tr, 0.5 * (i.lo + i.hi)).x[n] > levels[n]);
    }
  }
  const auto res = occupation_measure(tr, OccupationQuery(levels, T));
  double any = 0.0;
  for (int j = 0; j < 400000; ++j) {
    const auto x = dense_eval(tr, (j + 0.5) * T / 400000).x;
    for (std::size_t n = 0; n < 6; ++n) {
      if (x[n] > levels[n]) {
        any += T / 400000;
        break;
      }
    }
  }
  CHECK(res.measured == Catch::Approx(any).margin(1e-4));
  CHECK(res.measured <= res.bound);
  const auto sh = shell_occupation(tr, 0.2, T);
  REQUIRE(sh.size() == 6);
  for (const auto& s : sh) CHECK(s.measured <= s.bound);
}

TEST_CASE("occupation needs nonnegative data and a covered horizon") {
  const auto tr = run(1.0, 3, V{1.0, -0.1, 0.0}, 1.0);
  CHECK_THROWS_AS(occupation_measure(tr, OccupationQuery(V(3, 1.0), 1.0)), PreconditionError);
  const auto ok = run(1.0, 3, V{1.0, 0.1, 0.0}, 1.0);
  CHECK_THROWS_AS(occupation_measure(ok, OccupationQuery(V(3, 1.0), 2.0)), PreconditionError);
  CHECK_THROWS_AS(occupation_measure(ok, OccupationQuery(V(2, 1.0), 1.0)), DimensionMismatch);
}

TEST_CASE("sup functional") {
  const ModelParams p1(1.0, 3, Closure::Mirror);
  CHECK(sup_functional(p1, V{0, 0, 0}, SupWeight::beta_critical()) == std::pair<double, std::size_t>{0.0, 1});
  CHECK(sup_functional(p1, V{1, 0, 0}, SupWeight::beta_critical()) == std::pair<double, std::size_t>{1.0, 1});
  const ModelParams p4(4.0, 3, Closure::Mirror);
  const auto [v, n] = sup_functional(p4, V{0.0, 0.0, 1.0 / 12.0}, SupWeight::beta_critical());
  CHECK(v == Catch::Approx(2.0 / 3.0));
  CHECK(n == 3);
  // ties resolve to the first index
  CHECK(sup_functional(p1, V{1, 1, 1}, SupWeight::beta_critical()).second == 1);
  const ModelParams p3(3.0, 2, Closure::Mirror);
  CHECK(SupWeight::alpha_log(1.0).weight(p3, 2) == Catch::Approx(2.0));
  CHECK(SupWeight::eps_super(0.0).weight(p3, 2) == Catch::Approx(4.0));
  CHECK_THROWS_AS(sup_functional(p1, V{1, 0}, SupWeight::beta_critical()), DimensionMismatch);
}

TEST_CASE("cube integral against trapezoid quadrature") {
  const V x0{1.0, 0.3, 0.1, 0.0, 0.0};
  const double T = 3.0;
  const auto tr = run(1.0, 5, x0, T);
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto rep = cube_integral_check(tr, n, T);
    const int m = 200000;
    double cube = 0.0, flux = 0.0;
    for (int j = 0; j <= m; ++j) {
      const double w = (j == 0 || j == m) ? 0.5 : 1.0;
      const auto x = dense_eval(tr, T * j / m).x;
      const double xn = x[n - 1];
      const double next = n == 5 ? x[4] : x[n];
      cube += w * xn * xn * xn;
      flux += w * xn * xn * next;
    }
    cube *= T / m;
    flux *= T / m;
    CHECK(rep.integral == Catch::Approx(cube).epsilon(1e-7).margin(1e-12));
    CHECK(rep.flux_integral == Catch::Approx(flux).epsilon(1e-7).margin(1e-12));
    CHECK(rep.flux_integral <= rep.flux_bound);
    CHECK(rep.shell == n);
  }
  CHECK_THROWS_AS(cube_integral_check(tr, 0, T), InvalidArgument);
  CHECK_THROWS_AS(cube_integral_check(tr, 6, T), InvalidArgument);
}

TEST_CASE("psi gap") {
  const V x0{1.0, 0.5, 0.0};
  const auto a = run(1.0, 3, x0, 2.0, 1e-6);
  const auto b = run(1.0, 3, x0, 2.0, 1e-10);
  CHECK(psi_gap(a, a, 1.0) == 0.0);
  CHECK(psi_gap(a, b, 0.0) == 0.0);
  const double g = psi_gap(a, b, 2.0);
  CHECK(g >= 0.0);
  CHECK(g < 1e-10);
  const auto c = run(1.0, 3, V{1.0, 0.5, 1e-3}, 2.0);
  CHECK_THROWS_AS(psi_gap(a, c, 1.0), InvalidArgument);
  const auto d = run(2.0, 3, x0, 2.0);
  CHECK_THROWS_AS(psi_gap(a, d, 1.0), InvalidArgument);
}

TEST_CASE("energy recorder and decay slope") {
  const std::vector<EnergySample> s{{0.0, 5.0}, {1.0, 1.0}, {2.0, 0.25}, {4.0, 1.0 / 16}};
  CHECK(loglog_slope(s, 0.0, 10.0) == Catch::Approx(-2.0));
  CHECK(std::isnan(loglog_slope(s, 2.0, 3.0)));

  const ModelParams p(1.0, 8, Closure::Mirror);
  V x0(8, 0.0);
  x0[0] = 1.0;
  EnergyRecorder rec(10.0);
  const auto ch = make_system(p, SystemKind::Dyadic);
  const auto res = integrate_system(ch, {}, x0, 1e6, rec);
  CHECK(res.final_state.t < 1e6);
  CHECK(rec.samples().front().E == 1.0);
  CHECK(rec.samples().back().E <= 0.1);
  CHECK(rec.samples()[rec.samples().size() - 2].E > 0.1);
}
