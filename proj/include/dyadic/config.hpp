#pragma once
// Experiment configuration in a flat "key = value" format:
//
//   # comment
//   model.beta = 1
//   model.n_max = 8
//   model.closure = mirror
//   initial.kind = power        # explicit | power | critical
//   initial.p = 1
//   initial.scale = 1
//   horizon = 2
//
// Lists are comma separated. Unknown keys are errors.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dyadic/errors.hpp"
#include "dyadic/integrator.hpp"
#include "dyadic/region.hpp"

namespace dyadic {

class ConfigError : public Error {
 public:
  ConfigError(std::string source, std::size_t line, std::string key, const std::string& what);
  std::string source;
  std::size_t line;  // 0 when the error is not tied to a line
  std::string key;
};

enum class InitialKind { Explicit, Power, Critical };
std::string_view initial_kind_name(InitialKind k);

struct InitialCondition {
  InitialKind kind = InitialKind::Power;
  std::vector<double> values;  // explicit
  double p = 1.0;              // power: scale * 2^(-p n)
  double scale = 1.0;          // power and critical: scale * k_n^(-1/3 + 1/(3 beta))

  std::vector<double> build(const ModelParams& m) const;
  friend bool operator==(const InitialCondition&, const InitialCondition&) = default;
};

struct ExperimentConfig {
  double beta = 1.0;
  std::size_t n_max = 8;
  Closure closure = Closure::Mirror;
  IntegratorConfig integrator;
  InitialCondition initial;
  double horizon = 1.0;
  std::vector<std::string> diagnostics;
  std::uint64_t seed = 0;
  std::string output = "out";

  // regularity: a_n = M k_n^(-(1-eps)/3); cube integrals for the listed shells
  double regularity_M = 2.0;
  double regularity_eps = 0.1;
  std::vector<std::size_t> regularity_shells;

  // positivity schedule
  double positivity_C = 1.0;
  double positivity_delta = 1.0 / 12.0;
  double positivity_eps = 0.1;
  double positivity_level = 0.0;  // 0 uses x_1

  RegionParams region;

  // sweep: one run per beta and seed index
  std::vector<double> sweep_betas;
  std::size_t sweep_seeds = 0;

  ModelParams model() const { return ModelParams(beta, n_max, closure); }
  std::vector<double> initial_state() const { return initial.build(model()); }
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline const std::vector<std::string>& known_diagnostics() {
  static const std::vector<std::string> names{
      "energy", "positivity", "occupation", "shell_occupation", "cube_integral",
      "decay_bounds", "residual", "tau"};
  return names;
}

ExperimentConfig parse_config(std::string_view text, std::string_view source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize(const ExperimentConfig& cfg);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace dyadic
