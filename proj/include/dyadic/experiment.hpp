#pragma once
// Orchestration behind the command-line tool: each subcommand runs one
// experiment, writes its artifacts under an output directory and reports
// whether every asserted invariant held.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>

#include "dyadic/config.hpp"

namespace dyadic {

using Json = nlohmann::ordered_json;

struct RunOutcome {
  Json report;
  bool ok = true;  // false iff an asserted invariant failed
};

// "t,X1,...,XN" header, one row per stored sample, 17 significant digits.
void write_csv(const Trajectory& traj, std::ostream& os);

// FNV-1a of the serialized configuration, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

// Runs the configured diagnostics on an already integrated trajectory.
RunOutcome run_diagnostics(const ExperimentConfig& cfg, const Trajectory& traj);

RunOutcome simulate(const ExperimentConfig& cfg, const std::filesystem::path& out);
RunOutcome verify_region(const RegionParams& r, const std::filesystem::path& out);
RunOutcome positivity(const ExperimentConfig& cfg, const std::filesystem::path& out);
RunOutcome regularity(const ExperimentConfig& cfg, const std::filesystem::path& out);
// One run per (beta, seed index); random nonnegative unit-norm initial data
// when sweep.seeds > 0. Reports are named by the hash of each run's config.
RunOutcome sweep(const ExperimentConfig& cfg, const std::filesystem::path& out, unsigned threads);
// psi_N(t) between the two runs on a uniform grid of 201 times.
RunOutcome compare(const ExperimentConfig& a, const ExperimentConfig& b,
                   const std::filesystem::path& out);

// Random nonnegative unit vector of length n, deterministic in the seed.
std::vector<double> random_unit_nonnegative(std::size_t n, std::uint64_t seed);

void write_json(const Json& j, const std::filesystem::path& path);

}  // namespace dyadic
