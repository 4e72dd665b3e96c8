#include "dyadic/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace dyadic {

ConfigError::ConfigError(std::string src, std::size_t ln, std::string k, const std::string& what)
    : Error(src + (ln ? ":" + std::to_string(ln) : std::string()) +
            (k.empty() ? std::string() : " [" + k + "]") + ": " + what),
      source(std::move(src)),
      line(ln),
      key(std::move(k)) {}

std::string_view initial_kind_name(InitialKind k) {
  switch (k) {
    case InitialKind::Explicit: return "explicit";
    case InitialKind::Power: return "power";
    case InitialKind::Critical: return "critical";
  }
  return "explicit";
}

std::vector<double> InitialCondition::build(const ModelParams& m) const {
  const std::size_t N = m.n_max();
  std::vector<double> x(N);
  switch (kind) {
    case InitialKind::Explicit:
      if (values.size() != N) {
        throw DimensionMismatch("explicit initial condition has " + std::to_string(values.size()) +
                                " values, model has " + std::to_string(N));
      }
      x = values;
      break;
    case InitialKind::Power:
      for (std::size_t n = 1; n <= N; ++n) x[n - 1] = scale * std::exp2(-p * static_cast<double>(n));
      break;
    case InitialKind::Critical:
      for (std::size_t n = 1; n <= N; ++n) x[n - 1] = scale / rescaling_weight(m.beta(), n);
      break;
  }
  return x;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double to_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InvalidArgument("expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

template <class Int>
Int to_integer(std::string_view s) {
  s = trim(s);
  Int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InvalidArgument("expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  s = trim(s);
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = s.find(',', pos);
    out.push_back(trim(s.substr(pos, comma == std::string_view::npos ? s.npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::vector<double> number_list(std::string_view s) {
  std::vector<double> v;
  for (auto item : split_list(s)) v.push_back(to_number(item));
  return v;
}

template <class T>
std::string join(const std::vector<T>& v, const std::function<std::string(const T&)>& f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += f(v[i]);
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table{
      {"model.beta", [](auto& c, auto v) { c.beta = to_number(v); }},
      {"model.n_max", [](auto& c, auto v) { c.n_max = to_integer<std::size_t>(v); }},
      {"model.closure", [](auto& c, auto v) { c.closure = parse_closure(trim(v)); }},
      {"integrator.rtol", [](auto& c, auto v) { c.integrator.rtol = to_number(v); }},
      {"integrator.atol", [](auto& c, auto v) { c.integrator.atol = to_number(v); }},
      {"integrator.h_init", [](auto& c, auto v) { c.integrator.h_init = to_number(v); }},
      {"integrator.cfl", [](auto& c, auto v) { c.integrator.cfl = to_number(v); }},
      {"integrator.max_steps", [](auto& c, auto v) { c.integrator.max_steps = to_integer<long>(v); }},
      {"integrator.method", [](auto& c, auto v) { c.integrator.method = parse_method(trim(v)); }},
      {"initial.kind",
       [](auto& c, auto v) {
         v = trim(v);
         if (v == "explicit") {
           c.initial.kind = InitialKind::Explicit;
         } else if (v == "power") {
           c.initial.kind = InitialKind::Power;
         } else if (v == "critical") {
           c.initial.kind = InitialKind::Critical;
         } else {
           throw InvalidArgument("initial.kind must be explicit, power or critical");
         }
       }},
      {"initial.values", [](auto& c, auto v) { c.initial.values = number_list(v); }},
      {"initial.p", [](auto& c, auto v) { c.initial.p = to_number(v); }},
      {"initial.scale", [](auto& c, auto v) { c.initial.scale = to_number(v); }},
      {"horizon", [](auto& c, auto v) { c.horizon = to_number(v); }},
      {"diagnostics",
       [](auto& c, auto v) {
         c.diagnostics.clear();
         for (auto item : split_list(v)) c.diagnostics.emplace_back(item);
       }},
      {"seed", [](auto& c, auto v) { c.seed = to_integer<std::uint64_t>(v); }},
      {"output", [](auto& c, auto v) { c.output = std::string(trim(v)); }},
      {"regularity.M", [](auto& c, auto v) { c.regularity_M = to_number(v); }},
      {"regularity.eps", [](auto& c, auto v) { c.regularity_eps = to_number(v); }},
      {"regularity.shells",
       [](auto& c, auto v) {
         c.regularity_shells.clear();
         for (auto item : split_list(v)) c.regularity_shells.push_back(to_integer<std::size_t>(item));
       }},
      {"positivity.C", [](auto& c, auto v) { c.positivity_C = to_number(v); }},
      {"positivity.delta", [](auto& c, auto v) { c.positivity_delta = to_number(v); }},
      {"positivity.eps", [](auto& c, auto v) { c.positivity_eps = to_number(v); }},
      {"positivity.level", [](auto& c, auto v) { c.positivity_level = to_number(v); }},
      {"region.delta", [](auto& c, auto v) { c.region.delta = parse_rational(v); }},
      {"region.c", [](auto& c, auto v) { c.region.c = parse_rational(v); }},
      {"region.theta", [](auto& c, auto v) { c.region.theta = parse_rational(v); }},
      {"region.m", [](auto& c, auto v) { c.region.m = parse_rational(v); }},
      {"sweep.betas", [](auto& c, auto v) { c.sweep_betas = number_list(v); }},
      {"sweep.seeds", [](auto& c, auto v) { c.sweep_seeds = to_integer<std::size_t>(v); }},
  };
  return table;
}

void check(bool ok, const char* key, const std::string& what) {
  if (!ok) throw ConfigError("", 0, key, what);
}

bool finite_all(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void ExperimentConfig::validate() const {
  check(beta > 0.0 && std::isfinite(beta), "model.beta", "must be positive");
  check(n_max >= 2, "model.n_max", "must be at least 2");
  try {
    integrator.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("", 0, "integrator", e.what());
  }
  check(horizon > 0.0 && std::isfinite(horizon), "horizon", "must be positive and finite");
  if (initial.kind == InitialKind::Explicit) {
    check(initial.values.size() == n_max, "initial.values",
          "expected " + std::to_string(n_max) + " values, got " +
              std::to_string(initial.values.size()));
  }
  check(std::isfinite(initial.p) && std::isfinite(initial.scale), "initial", "parameters must be finite");
  check(finite_all(initial_state()), "initial", "initial condition is not finite");
  for (const auto& d : diagnostics) {
    const auto& known = known_diagnostics();
    check(std::find(known.begin(), known.end(), d) != known.end(), "diagnostics",
          "unknown diagnostic '" + d + "'");
  }
  check(regularity_M > 0.0, "regularity.M", "must be positive");
  check(regularity_eps > 0.0 && regularity_eps < 1.0, "regularity.eps", "must lie in (0, 1)");
  for (auto s : regularity_shells) {
    check(s >= 1 && s <= n_max, "regularity.shells", "shell " + std::to_string(s) + " out of range");
  }
  check(positivity_C > 0.0, "positivity.C", "must be positive");
  check(positivity_delta > 0.0 && positivity_delta < 1.0, "positivity.delta", "must lie in (0, 1)");
  check(positivity_eps > 0.0 && positivity_eps <= 1.0, "positivity.eps", "must lie in (0, 1]");
  check(positivity_level >= 0.0, "positivity.level", "must be nonnegative");
  try {
    region.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("", 0, "region", e.what());
  }
  for (double b : sweep_betas) check(b > 0.0 && std::isfinite(b), "sweep.betas", "must be positive");
}

ExperimentConfig parse_config(std::string_view text, std::string_view source) {
  ExperimentConfig cfg;
  std::map<std::string, std::size_t, std::less<>> seen;
  const std::string src(source);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(src, line_no, "", "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(src, line_no, key, "unknown key");
    if (seen.count(key)) {
      throw ConfigError(src, line_no, key, "duplicate key (first set on line " +
                                                std::to_string(seen[key]) + ")");
    }
    seen[key] = line_no;
    try {
      it->second(cfg, value);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(src, line_no, key, e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    std::size_t ln = 0;
    for (const auto& [k, l] : seen) {
      if (k == e.key || k.rfind(e.key + ".", 0) == 0) {
        ln = l;
        break;
      }
    }
    const std::string what = e.what();
    throw ConfigError(src, ln, e.key, what.substr(what.find(": ") + 2));
  } catch (const Error& e) {
    throw ConfigError(src, 0, "", e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "", "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string serialize(const ExperimentConfig& c) {
  std::ostringstream os;
  const std::function<std::string(const double&)> num = [](const double& v) { return format_double(v); };
  os << "model.beta = " << format_double(c.beta) << '\n'
     << "model.n_max = " << c.n_max << '\n'
     << "model.closure = " << closure_name(c.closure) << '\n'
     << "integrator.rtol = " << format_double(c.integrator.rtol) << '\n'
     << "integrator.atol = " << format_double(c.integrator.atol) << '\n'
     << "integrator.h_init = " << format_double(c.integrator.h_init) << '\n'
     << "integrator.cfl = " << format_double(c.integrator.cfl) << '\n'
     << "integrator.max_steps = " << c.integrator.max_steps << '\n'
     << "integrator.method = " << method_name(c.integrator.method) << '\n'
     << "initial.kind = " << initial_kind_name(c.initial.kind) << '\n'
     << "initial.values = " << join(c.initial.values, num) << '\n'
     << "initial.p = " << format_double(c.initial.p) << '\n'
     << "initial.scale = " << format_double(c.initial.scale) << '\n'
     << "horizon = " << format_double(c.horizon) << '\n'
     << "diagnostics = "
     << join<std::string>(c.diagnostics, [](const std::string& s) { return s; }) << '\n'
     << "seed = " << c.seed << '\n'
     << "output = " << c.output << '\n'
     << "regularity.M = " << format_double(c.regularity_M) << '\n'
     << "regularity.eps = " << format_double(c.regularity_eps) << '\n'
     << "regularity.shells = "
     << join<std::size_t>(c.regularity_shells, [](const std::size_t& s) { return std::to_string(s); })
     << '\n'
     << "positivity.C = " << format_double(c.positivity_C) << '\n'
     << "positivity.delta = " << format_double(c.positivity_delta) << '\n'
     << "positivity.eps = " << format_double(c.positivity_eps) << '\n'
     << "positivity.level = " << format_double(c.positivity_level) << '\n'
     << "region.delta = " << to_string(c.region.delta) << '\n'
     << "region.c = " << to_string(c.region.c) << '\n'
     << "region.theta = " << to_string(c.region.theta) << '\n'
     << "region.m = " << to_string(c.region.m) << '\n'
     << "sweep.betas = " << join(c.sweep_betas, num) << '\n'
     << "sweep.seeds = " << c.sweep_seeds << '\n';
  return os.str();
}

}  // namespace dyadic
