// dyadic: command-line front end.
//
//   dyadic simulate --config run.cfg --out results/
//   dyadic verify-region --defaults
//   dyadic sweep --config sweep.cfg --threads 4
//   dyadic compare --config a.cfg --config b.cfg

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dyadic/experiment.hpp"
#include "dyadic/simd/kernels.hpp"

namespace {

struct Common {
  std::vector<std::string> configs;
  std::string out;
  unsigned threads = 0;
  long long seed = -1;
  double tol_scale = 1.0;
};

void add_common(CLI::App* app, Common& c, bool many_configs = false) {
  if (many_configs) {
    app->add_option("--config", c.configs, "configuration file (twice for compare)")
        ->required()
        ->expected(2);
  } else {
    app->add_option("--config", c.configs, "configuration file")->required()->expected(1);
  }
  app->add_option("--out", c.out, "output directory (overrides the config)");
  app->add_option("--threads", c.threads, "worker threads (default: DYADIC_THREADS or 1)");
  app->add_option("--seed", c.seed, "random seed (overrides the config)");
  app->add_option("--tol-scale", c.tol_scale, "multiply rtol and atol by this factor")
      ->check(CLI::PositiveNumber);
}

dyadic::ExperimentConfig load(const std::string& path, const Common& c) {
  auto cfg = dyadic::load_config(path);
  if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
  cfg.integrator.rtol *= c.tol_scale;
  cfg.integrator.atol *= c.tol_scale;
  if (!c.out.empty()) cfg.output = c.out;
  cfg.validate();
  return cfg;
}

unsigned thread_count(const Common& c) {
  if (c.threads > 0) return c.threads;
  if (const char* env = std::getenv("DYADIC_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring DYADIC_THREADS='" << env << "'\n";
  }
  return 1;
}

int finish(const dyadic::RunOutcome& r, const std::string& what) {
  std::cout << what << ": " << (r.ok ? "ok" : "FAILED") << '\n';
  if (!r.ok && r.report.contains("failed")) std::cout << "failed: " << r.report["failed"].dump() << '\n';
  return r.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and verification workbench for the inviscid dyadic model"};
  app.require_subcommand(1);
  bool show_isa = false;
  app.add_flag("--isa", show_isa, "print the selected SIMD kernels");

  Common sim_opts, pos_opts, reg_opts, sweep_opts, cmp_opts;
  auto* sim = app.add_subcommand("simulate", "integrate and run the configured diagnostics");
  add_common(sim, sim_opts);
  auto* pos = app.add_subcommand("positivity", "measure the positivization time");
  add_common(pos, pos_opts);
  auto* reg = app.add_subcommand("regularity", "occupation, cube-integral and decay diagnostics");
  add_common(reg, reg_opts);
  auto* swp = app.add_subcommand("sweep", "parallel runs over sweep.betas x sweep.seeds");
  add_common(swp, sweep_opts);
  auto* cmp = app.add_subcommand("compare", "psi_N(t) between two runs from one initial state");
  add_common(cmp, cmp_opts, true);

  auto* region = app.add_subcommand("verify-region", "certify the control polynomial signs");
  bool defaults = false;
  std::string region_config, region_out = "out";
  region->add_flag("--defaults", defaults, "use delta=1/12, c=1/2, theta=1/2, m=4/5");
  region->add_option("--config", region_config, "read region.* keys from a configuration file");
  region->add_option("--out", region_out, "output directory");

  CLI11_PARSE(app, argc, argv);
  if (show_isa) std::cerr << "simd: " << dyadic::simd::isa_name(dyadic::simd::active().isa) << '\n';

  try {
    if (*sim) {
      const auto cfg = load(sim_opts.configs[0], sim_opts);
      return finish(dyadic::simulate(cfg, cfg.output), "simulate");
    }
    if (*pos) {
      const auto cfg = load(pos_opts.configs[0], pos_opts);
      const auto r = dyadic::positivity(cfg, cfg.output);
      std::cout << "tau = " << r.report["positivity"]["tau"].dump()
                << ", tau_bound = " << r.report["positivity"]["tau_bound"].dump() << '\n';
      return finish(r, "positivity");
    }
    if (*reg) {
      const auto cfg = load(reg_opts.configs[0], reg_opts);
      return finish(dyadic::regularity(cfg, cfg.output), "regularity");
    }
    if (*swp) {
      const auto cfg = load(sweep_opts.configs[0], sweep_opts);
      return finish(dyadic::sweep(cfg, cfg.output, thread_count(sweep_opts)), "sweep");
    }
    if (*cmp) {
      const auto a = load(cmp_opts.configs[0], cmp_opts);
      const auto b = load(cmp_opts.configs[1], cmp_opts);
      const auto r = dyadic::compare(a, b, a.output);
      std::cout << "psi(T) = " << r.report["psi_T"].dump() << '\n';
      return finish(r, "compare");
    }
    if (*region) {
      dyadic::RegionParams params;
      if (!region_config.empty()) {
        params = dyadic::load_config(region_config).region;
      } else if (!defaults) {
        std::cerr << "verify-region: pass --defaults or --config\n";
        return 2;
      }
      const auto r = dyadic::verify_region(params, region_out);
      for (const auto& c : r.report["certificates"]) {
        std::cout << c["name"].get<std::string>() << ": " << c["verdict"].get<std::string>() << '\n';
      }
      return finish(r, "verify-region");
    }
  } catch (const dyadic::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
