#include <catch_amalgamated.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "dyadic/errors.hpp"
#include "dyadic/model.hpp"
#include "oracles.hpp"

using namespace dyadic;
using V = std::vector<double>;

TEST_CASE("model parameters") {
  const ModelParams p(1.5, 6, Closure::Mirror);
  CHECK(p.k(0) == 0.0);
  CHECK(p.k(1) == Catch::Approx(std::pow(2.0, 1.5)));
  for (std::size_t n = 1; n <= 6; ++n) CHECK(p.k(n + 1) == Catch::Approx(std::pow(2.0, 1.5) * p.k(n)));
  CHECK(ModelParams(2.0, 3, Closure::GalerkinZero).k(3) == 64.0);
  CHECK_THROWS_AS(ModelParams(0.0, 4, Closure::Mirror), InvalidArgument);
  CHECK_THROWS_AS(ModelParams(-1.0, 4, Closure::Mirror), InvalidArgument);
  CHECK_THROWS_AS(ModelParams(1.0, 1, Closure::Mirror), InvalidArgument);
  CHECK(parse_closure("mirror") == Closure::Mirror);
  CHECK(parse_closure(closure_name(Closure::GalerkinZero)) == Closure::GalerkinZero);
  CHECK_THROWS_AS(parse_closure("periodic"), InvalidArgument);
}

TEST_CASE("vector field examples") {
  CHECK(vector_field(ModelParams(1.0, 3, Closure::GalerkinZero), V{1, 0, 0}) == V{0, 2, 0});
  CHECK(vector_field(ModelParams(1.0, 2, Closure::Mirror), V{1, 1}) == V{-2, -2});
  CHECK(vector_field(ModelParams(2.0, 3, Closure::GalerkinZero), V{1, 1, 1}) == V{-4, -12, 16});
  CHECK_THROWS_AS(vector_field(ModelParams(1.0, 3, Closure::Mirror), V{1, 2}), DimensionMismatch);
}

TEST_CASE("vector field agrees with an independent transcription") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (double beta : {0.5, 1.0, 1.7, 3.0}) {
    for (bool mirror : {false, true}) {
      for (std::size_t N : {2u, 5u, 9u, 17u}) {
        V x(N);
        for (auto& v : x) v = d(rng);
        const ModelParams p(beta, N, mirror ? Closure::Mirror : Closure::GalerkinZero);
        const auto f = vector_field(p, x);
        const auto g = oracle::field(beta, x, mirror);
        for (std::size_t i = 0; i < N; ++i) CHECK(f[i] == Catch::Approx(g[i]).epsilon(1e-13).margin(1e-13));
      }
    }
  }
}

TEST_CASE("energy profile") {
  CHECK(energy_profile(V{0, 0, 0}).E == V{0, 0, 0});
  CHECK(energy_profile(V{1, 2, 2}).E == V{1, 5, 9});
  CHECK(energy_profile(V{3, 4}).total == 25.0);
  CHECK(l2_norm(V{3, 4}) == 5.0);
  CHECK(sup_norm(V{-3, 2}) == 3.0);
}

TEST_CASE("energy derivative") {
  const ModelParams p(1.0, 4, Closure::GalerkinZero);
  CHECK(energy_derivative(p, V{1, 1, 1, 1}, 1) == -4.0);
  CHECK(energy_derivative(p, V{1, 1, 0, 1}, 2) == 0.0);
  CHECK(energy_derivative(p, V{1, 1, 1, 1}, 4) == 0.0);
  CHECK(energy_derivative(ModelParams(1.0, 2, Closure::Mirror), V{1, 1}, 2) == -8.0);
  CHECK_THROWS_AS(energy_derivative(p, V{1, 1, 1, 1}, 0), InvalidArgument);
  CHECK_THROWS_AS(energy_derivative(p, V{1, 1, 1, 1}, 5), InvalidArgument);
}

TEST_CASE("energy derivative equals the sum of X_i F_i") {
  const ModelParams p(1.3, 6, Closure::Mirror);
  const V x{0.3, -0.2, 0.5, 0.1, 0.7, -0.4};
  const auto f = vector_field(p, x);
  double acc = 0.0;
  for (std::size_t n = 1; n <= 6; ++n) {
    acc += 2.0 * x[n - 1] * f[n - 1];
    CHECK(energy_derivative(p, x, n) == Catch::Approx(acc).margin(1e-12));
  }
}

TEST_CASE("rescaled coefficients") {
  CHECK(rescaled_coefficient(1.0, 1) == 1.0);
  CHECK(rescaled_coefficient(1.0, 2) == 2.0);
  CHECK(rescaled_coefficient(2.0, 3) == Catch::Approx(std::exp2(5.0 * 3 / 3 - 4.0 / 3)));
  CHECK(rescaling_weight(1.0, 7) == 1.0);
  CHECK(rescaling_weight(4.0, 2) == 4.0);
}
