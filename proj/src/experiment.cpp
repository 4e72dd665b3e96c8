#include "dyadic/experiment.hpp"

#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include "dyadic/positivity.hpp"
#include "dyadic/regularity.hpp"
#include "dyadic/symmetry.hpp"

namespace dyadic {

namespace fs = std::filesystem;

void write_csv(const Trajectory& traj, std::ostream& os) {
  os << 't';
  for (std::size_t n = 1; n <= traj.dim(); ++n) os << ",X" << n;
  os << '\n';
  char buf[40];
  for (std::size_t i = 0; i < traj.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", traj.time(i));
    os << buf;
    for (double v : traj.state(i)) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << ',' << buf;
    }
    os << '\n';
  }
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : serialize(cfg)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

void write_json(const Json& j, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed for " + path.string());
}

std::vector<double> random_unit_nonnegative(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> x(n);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& v : x) {
      v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      norm2 += v * v;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& v : x) v *= inv;
  return x;
}

namespace {

Json vec(std::span<const double> v) { return Json(std::vector<double>(v.begin(), v.end())); }

Json run_header(const ExperimentConfig& cfg) {
  Json j;
  j["beta"] = cfg.beta;
  j["n_max"] = cfg.n_max;
  j["closure"] = std::string(closure_name(cfg.closure));
  j["method"] = std::string(method_name(cfg.integrator.method));
  j["rtol"] = cfg.integrator.rtol;
  j["atol"] = cfg.integrator.atol;
  j["horizon"] = cfg.horizon;
  j["config_hash"] = config_hash(cfg);
  return j;
}

Json stats_json(const Trajectory& traj) {
  const auto& s = traj.stats();
  Json j;
  j["accepted"] = s.accepted;
  j["rejected"] = s.rejected;
  j["rhs_evals"] = s.rhs_evals;
  j["stabilized_steps"] = s.stabilized_steps;
  j["events"] = traj.events().size();
  return j;
}

struct Check {
  Json entry;
  bool asserted = false;
  bool passed = true;
};

bool nonnegative(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return v >= 0.0; });
}

Check energy_check(const ExperimentConfig& cfg, const Trajectory& traj) {
  Check c;
  const double e0 = energy_profile(traj.state(0)).total;
  double max_dev = 0.0, max_rise = 0.0, prev = e0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double e = energy_profile(traj.state(i)).total;
    max_dev = std::max(max_dev, std::fabs(e - e0));
    max_rise = std::max(max_rise, e - prev);
    prev = e;
  }
  const double eT = prev;
  const double tol = cfg.integrator.rtol * e0 + cfg.integrator.atol;
  c.entry["E0"] = e0;
  c.entry["ET"] = eT;
  c.entry["relative_change"] = e0 > 0.0 ? (eT - e0) / e0 : 0.0;
  if (cfg.closure == Closure::GalerkinZero) {
    c.entry["property"] = "conservation";
    c.entry["max_deviation"] = max_dev;
    c.entry["allowed"] = 1000.0 * tol;
    c.asserted = true;
    c.passed = max_dev <= 1000.0 * tol;
  } else if (nonnegative(traj.state(0))) {
    c.entry["property"] = "nonincreasing";
    c.entry["max_rise"] = max_rise;
    c.entry["allowed"] = 100.0 * tol;
    c.asserted = true;
    c.passed = max_rise <= 100.0 * tol;
  }
  return c;
}

Check positivity_check(const Trajectory& traj) {
  Check c;
  const auto x0 = traj.state(0);
  const double floor = -1e-10 * l2_norm(x0);
  const double lo = min_component_after(traj, traj.t_begin());
  c.entry["min_component"] = lo;
  c.entry["floor"] = floor;
  if (nonnegative(x0)) {
    c.asserted = true;
    c.passed = lo >= floor;
  } else {
    c.entry["note"] = "initial data has negative entries; not asserted";
  }
  return c;
}

Check occupation_check(const ExperimentConfig& cfg, const Trajectory& traj) {
  Check c;
  const auto q = OccupationQuery::power_profile(traj.params(), cfg.regularity_M,
                                                (1.0 - cfg.regularity_eps) / 3.0, cfg.horizon);
  c.entry["M"] = cfg.regularity_M;
  c.entry["eps"] = cfg.regularity_eps;
  if (!nonnegative(traj.state(0))) {
    c.entry["note"] = "needs nonnegative initial data";
    return c;
  }
  const auto r = occupation_measure(traj, q);
  c.entry["measured"] = r.measured;
  c.entry["bound"] = r.bound;
  c.entry["per_shell"] = r.per_shell;
  c.asserted = true;
  c.passed = r.measured <= r.bound + 1e-6 * cfg.horizon;
  return c;
}

Check shell_occupation_check(const ExperimentConfig& cfg, const Trajectory& traj) {
  Check c;
  c.entry["M"] = cfg.regularity_M;
  if (!nonnegative(traj.state(0))) {
    c.entry["note"] = "needs nonnegative initial data";
    return c;
  }
  c.asserted = true;
  Json rows = Json::array();
  for (const auto& s : shell_occupation(traj, cfg.regularity_M, cfg.horizon)) {
    rows.push_back({{"shell", s.shell}, {"measured", s.measured}, {"bound", s.bound}});
    c.passed = c.passed && s.measured <= s.bound + 1e-6 * cfg.horizon;
  }
  c.entry["shells"] = rows;
  return c;
}

Check cube_check(const ExperimentConfig& cfg, const Trajectory& traj) {
  Check c;
  std::vector<std::size_t> shells = cfg.regularity_shells;
  if (shells.empty()) shells.push_back(cfg.n_max);
  Json rows = Json::array();
  for (auto n : shells) {
    const auto r = cube_integral_check(traj, n, cfg.horizon);
    Json row{{"shell", n},
             {"integral", r.integral},
             {"bound", r.bound},
             {"flux_integral", r.flux_integral},
             {"flux_bound", r.flux_bound},
             {"hypothesis", r.hypothesis}};
    if (r.hypothesis) {
      c.asserted = true;
      c.passed = c.passed && r.integral <= r.bound && r.flux_integral <= r.flux_bound;
    } else {
      row["note"] = "hypothesis not satisfied";
    }
    rows.push_back(row);
  }
  c.entry["shells"] = rows;
  return c;
}

Check decay_check(const Trajectory& traj) {
  Check c;
  const auto r = decay_bounds_check(traj);
  c.entry["initial_sup"] = r.initial_sup;
  c.entry["max_sup"] = r.max_sup;
  c.entry["uniform_ratio"] = r.max_uniform_ratio;
  c.entry["decay_ratio"] = r.max_decay_ratio;
  c.entry["decay_constant"] = decay_constant(traj.params().beta());
  c.entry["within_hypothesis"] = r.within_hypothesis;
  if (r.within_hypothesis) {
    c.asserted = true;
    c.passed = r.uniform_ok() && r.decay_ok();
  }
  return c;
}

Check residual_diag(const Trajectory& traj) {
  Check c;
  const auto r = residual_check(traj);
  c.entry["max_defect"] = r.max_defect;
  c.entry["worst_time"] = r.worst_time;
  c.entry["worst_shell"] = r.worst_shell;
  c.asserted = true;
  c.passed = r.passes();
  return c;
}

Json tau_json(const ExperimentConfig& cfg, const Trajectory& traj, bool& ok) {
  Json j;
  const auto tau = measure_tau(traj);
  j["tau"] = tau ? Json(*tau) : Json(nullptr);
  if (tau) {
    const double lo = min_component_after(traj, *tau);
    j["min_component_after_tau"] = lo;
    ok = lo >= -1e-10 * l2_norm(traj.state(0));
  }
  const auto x0 = traj.state(0);
  if (x0[0] > 0.0) {
    ScheduleOptions opt{cfg.positivity_C, cfg.positivity_delta, cfg.positivity_eps};
    try {
      const double level = cfg.positivity_level > 0.0 ? cfg.positivity_level : x0[0];
      const auto s = build_schedule(traj.params(), x0, level, opt);
      j["tau_bound"] = s.tau_bound;
      j["tau_bound_note"] = "conditional on the admissibility of C";
      j["gamma"] = s.gamma;
      j["schedule_t"] = s.t;
    } catch (const GammaUndefined& e) {
      j["tau_bound"] = nullptr;
      j["tau_bound_note"] = e.what();
    }
  } else {
    j["tau_bound"] = nullptr;
    j["tau_bound_note"] = "schedule needs x_1 > 0";
  }
  return j;
}

Trajectory run_integration(const ExperimentConfig& cfg) {
  return integrate(cfg.model(), cfg.integrator, cfg.initial_state(), cfg.horizon);
}

void write_trajectory(const Trajectory& traj, const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_csv(traj, out);
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace

RunOutcome run_diagnostics(const ExperimentConfig& cfg, const Trajectory& traj) {
  RunOutcome out;
  out.report = run_header(cfg);
  out.report["stats"] = stats_json(traj);
  out.report["final_state"] = vec(traj.state(traj.size() - 1));
  Json diags = Json::object();
  std::vector<std::string> failed;
  for (const auto& name : cfg.diagnostics) {
    Check c;
    if (name == "energy") {
      c = energy_check(cfg, traj);
    } else if (name == "positivity") {
      c = positivity_check(traj);
    } else if (name == "occupation") {
      c = occupation_check(cfg, traj);
    } else if (name == "shell_occupation") {
      c = shell_occupation_check(cfg, traj);
    } else if (name == "cube_integral") {
      c = cube_check(cfg, traj);
    } else if (name == "decay_bounds") {
      c = decay_check(traj);
    } else if (name == "residual") {
      c = residual_diag(traj);
    } else if (name == "tau") {
      bool ok = true;
      c.entry = tau_json(cfg, traj, ok);
      c.asserted = c.entry["tau"] != nullptr;
      c.passed = ok;
    }
    c.entry["asserted"] = c.asserted;
    c.entry["passed"] = c.passed;
    if (c.asserted && !c.passed) failed.push_back(name);
    diags[name] = c.entry;
  }
  out.report["diagnostics"] = diags;
  out.report["failed"] = failed;
  out.ok = failed.empty();
  return out;
}

RunOutcome simulate(const ExperimentConfig& cfg, const fs::path& out) {
  const Trajectory traj = run_integration(cfg);
  write_trajectory(traj, out / "trajectory.csv");
  RunOutcome r = run_diagnostics(cfg, traj);
  write_json(r.report, out / "report.json");
  return r;
}

RunOutcome verify_region(const RegionParams& params, const fs::path& out) {
  const auto cp = build_polynomials(params);
  const auto rep = certify_signs(cp);
  RunOutcome r;
  Json certs = Json::array();
  for (const auto& c : rep.certificates) {
    std::vector<std::string> coeffs;
    for (const auto& q : c.poly.coeffs()) coeffs.push_back(to_string(q));
    certs.push_back({{"name", c.name},
                     {"coefficients", coeffs},
                     {"domain", {to_string(c.lo), to_string(c.hi)}},
                     {"verdict", std::string(verdict_name(c.verdict))},
                     {"grid_points", c.grid_points},
                     {"lipschitz", c.lipschitz},
                     {"spacing", c.spacing},
                     {"grid_min", c.grid_min},
                     {"grid_max", c.grid_max},
                     {"slack", c.slack}});
  }
  r.report["region"] = {{"delta", to_string(params.delta)},
                        {"c", to_string(params.c)},
                        {"theta", to_string(params.theta)},
                        {"m", to_string(params.m)}};
  r.report["certificates"] = certs;
  r.report["all_expected"] = rep.all_expected;
  r.ok = rep.all_expected;
  write_json(r.report, out / "certificates.json");
  return r;
}

RunOutcome positivity(const ExperimentConfig& cfg, const fs::path& out) {
  const Trajectory traj = run_integration(cfg);
  write_trajectory(traj, out / "trajectory.csv");
  RunOutcome r;
  r.report = run_header(cfg);
  r.report["stats"] = stats_json(traj);
  r.report["initial_state"] = vec(traj.state(0));
  bool ok = true;
  r.report["positivity"] = tau_json(cfg, traj, ok);
  r.ok = ok;
  write_json(r.report, out / "report.json");
  return r;
}

RunOutcome regularity(const ExperimentConfig& cfg, const fs::path& out) {
  ExperimentConfig c = cfg;
  c.diagnostics = {"occupation", "shell_occupation", "cube_integral", "decay_bounds"};
  const Trajectory traj = run_integration(c);
  RunOutcome r = run_diagnostics(c, traj);
  const auto xT = traj.state(traj.size() - 1);
  const auto p = c.model();
  const auto [crit, crit_n] = sup_functional(p, xT, SupWeight::beta_critical());
  const auto [alog, alog_n] = sup_functional(p, xT, SupWeight::alpha_log(1.0));
  r.report["sup_functionals_at_T"] = {{"beta_critical", {crit, crit_n}},
                                      {"alpha_log_1", {alog, alog_n}}};
  write_json(r.report, out / "report.json");
  return r;
}

RunOutcome sweep(const ExperimentConfig& cfg, const fs::path& out, unsigned threads) {
  std::vector<ExperimentConfig> runs;
  const std::vector<double> betas = cfg.sweep_betas.empty() ? std::vector<double>{cfg.beta}
                                                            : cfg.sweep_betas;
  for (std::size_t b = 0; b < betas.size(); ++b) {
    const std::size_t seeds = std::max<std::size_t>(cfg.sweep_seeds, 1);
    for (std::size_t s = 0; s < seeds; ++s) {
      ExperimentConfig c = cfg;
      c.beta = betas[b];
      c.sweep_betas.clear();
      c.sweep_seeds = 0;
      if (cfg.sweep_seeds > 0) {
        c.seed = cfg.seed * 1000003ull + s;
        c.initial.kind = InitialKind::Explicit;
        c.initial.values = random_unit_nonnegative(c.n_max, c.seed);
      }
      c.validate();
      runs.push_back(std::move(c));
    }
  }
  std::vector<Json> summaries(runs.size());
  std::vector<char> oks(runs.size(), 1);
  std::vector<std::string> errors(runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      const auto& c = runs[i];
      const std::string hash = config_hash(c);
      try {
        const Trajectory traj = run_integration(c);
        RunOutcome r = run_diagnostics(c, traj);
        r.report["config"] = serialize(c);
        write_json(r.report, out / ("run-" + hash + ".json"));
        oks[i] = r.ok;
        summaries[i] = {{"hash", hash}, {"beta", c.beta}, {"seed", c.seed}, {"ok", r.ok}};
      } catch (const std::exception& e) {
        oks[i] = 0;
        errors[i] = e.what();
        summaries[i] = {{"hash", hash}, {"beta", c.beta}, {"seed", c.seed}, {"error", e.what()}};
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(runs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  RunOutcome r;
  r.report["runs"] = summaries;
  r.ok = std::all_of(oks.begin(), oks.end(), [](char v) { return v != 0; });
  r.report["ok"] = r.ok;
  write_json(r.report, out / "sweep.json");
  return r;
}

RunOutcome compare(const ExperimentConfig& a, const ExperimentConfig& b, const fs::path& out) {
  if (!(a.model() == b.model())) throw InvalidArgument("compare needs matching model parameters");
  const auto xa = a.initial_state();
  if (xa != b.initial_state()) throw InvalidArgument("compare needs the same initial condition");
  const double T = std::min(a.horizon, b.horizon);
  const Trajectory ta = integrate(a.model(), a.integrator, xa, T);
  const Trajectory tb = integrate(b.model(), b.integrator, xa, T);
  fs::create_directories(out);
  std::ofstream csv(out / "psi.csv");
  if (!csv) throw Error("cannot write " + (out / "psi.csv").string());
  csv << "t,psi\n";
  double psi_max = 0.0, psi_T = 0.0;
  char buf[64];
  constexpr int kPoints = 201;
  for (int i = 0; i < kPoints; ++i) {
    const double t = i == kPoints - 1 ? T : T * i / (kPoints - 1);
    const double psi = psi_gap(ta, tb, t);
    psi_max = std::max(psi_max, psi);
    psi_T = psi;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, psi);
    csv << buf;
  }
  RunOutcome r;
  r.report["a"] = run_header(a);
  r.report["b"] = run_header(b);
  r.report["horizon"] = T;
  r.report["psi_T"] = psi_T;
  r.report["psi_max"] = psi_max;
  r.report["norm2"] = energy_profile(xa).total;
  write_json(r.report, out / "report.json");
  return r;
}

}  // namespace dyadic
