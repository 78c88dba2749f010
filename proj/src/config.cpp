#include "vflip/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "vflip/errors.hpp"
#include "vflip/rng.hpp"

namespace vflip {

std::string format_double(double value) {
  if (value == 0.0) return "0";  // also folds -0
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto result = std::from_chars(text.data(), end, value);
  if (result.ec != std::errc{} || result.ptr != end || !std::isfinite(value))
    throw ConfigError("not a finite number: '" + text + "'");
  return value;
}

long long to_integer(const std::string& text) {
  long long value = 0;
  const auto* end = text.data() + text.size();
  const auto result = std::from_chars(text.data(), end, value);
  if (result.ec != std::errc{} || result.ptr != end) throw ConfigError("not an integer: '" + text + "'");
  return value;
}

std::uint64_t to_unsigned(const std::string& text) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto result = std::from_chars(text.data(), end, value);
  if (result.ec != std::errc{} || result.ptr != end)
    throw ConfigError("not a nonnegative integer: '" + text + "'");
  return value;
}

bool to_bool(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError("expected true or false, got '" + text + "'");
}

std::vector<double> to_list(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  return out;
}

std::string from_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += format_double(values[i]);
  }
  return out;
}

std::string one_of(const std::string& text, std::initializer_list<const char*> choices) {
  for (const char* c : choices)
    if (text == c) return text;
  std::string all;
  for (const char* c : choices) all += std::string(all.empty() ? "" : ", ") + c;
  throw ConfigError("'" + text + "' is not one of: " + all);
}

struct Field {
  const char* key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

#define VFLIP_NUMBER(KEY, MEMBER)                                                 \
  Field {                                                                         \
    KEY, [](const ExperimentConfig& c) { return format_double(c.MEMBER); },       \
        [](ExperimentConfig& c, const std::string& v) { c.MEMBER = to_double(v); } \
  }
#define VFLIP_INT(KEY, MEMBER)                                                            \
  Field {                                                                                 \
    KEY, [](const ExperimentConfig& c) { return std::to_string(c.MEMBER); },              \
        [](ExperimentConfig& c, const std::string& v) {                                   \
          c.MEMBER = static_cast<decltype(c.MEMBER)>(to_integer(v));                      \
        }                                                                                 \
  }
#define VFLIP_UNSIGNED(KEY, MEMBER)                                                 \
  Field {                                                                           \
    KEY, [](const ExperimentConfig& c) { return std::to_string(c.MEMBER); },        \
        [](ExperimentConfig& c, const std::string& v) { c.MEMBER = to_unsigned(v); } \
  }
#define VFLIP_LIST(KEY, MEMBER)                                                   \
  Field {                                                                         \
    KEY, [](const ExperimentConfig& c) { return from_list(c.MEMBER); },           \
        [](ExperimentConfig& c, const std::string& v) { c.MEMBER = to_list(v); }  \
  }
#define VFLIP_CHOICE(KEY, MEMBER, ...)                                                       \
  Field {                                                                                    \
    KEY, [](const ExperimentConfig& c) { return c.MEMBER; },                                 \
        [](ExperimentConfig& c, const std::string& v) { c.MEMBER = one_of(v, {__VA_ARGS__}); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      VFLIP_CHOICE("model.kind", model.kind, "nearest_neighbor", "next_nearest_degenerate", "custom"),
      VFLIP_NUMBER("model.omega0", model.omega0),
      VFLIP_NUMBER("model.gamma", model.gamma),
      VFLIP_INT("model.L", model.L),
      VFLIP_LIST("model.phi", model.phi),
      VFLIP_CHOICE("init.kind", init.kind, "point_momentum", "deterministic", "sample_set"),
      VFLIP_NUMBER("init.amplitude", init.amplitude),
      VFLIP_LIST("init.q", init.q),
      VFLIP_LIST("init.p", init.p),
      VFLIP_INT("init.samples", init.samples),
      VFLIP_INT("init.width", init.width),
      VFLIP_UNSIGNED("init.seed", init.seed),
      VFLIP_NUMBER("solver.h", solver.h),
      VFLIP_NUMBER("solver.t_max", solver.t_max),
      VFLIP_NUMBER("solver.record_every", solver.record_every),
      VFLIP_CHOICE("solver.scheme", solver.scheme, "trapezoid", "midpoint"),
      VFLIP_NUMBER("solver.t_cut", solver.t_cut),
      VFLIP_NUMBER("solver.memory_tol", solver.memory_tol),
      Field{"mc.enabled", [](const ExperimentConfig& c) { return std::string(c.mc.enabled ? "true" : "false"); },
            [](ExperimentConfig& c, const std::string& v) { c.mc.enabled = to_bool(v); }},
      VFLIP_UNSIGNED("mc.realizations", mc.realizations),
      VFLIP_UNSIGNED("mc.seed", mc.seed),
      VFLIP_LIST("mc.times", mc.times),
      VFLIP_NUMBER("nondeg.epsilon", nondeg.epsilon),
      VFLIP_NUMBER("nondeg.threshold", nondeg.threshold),
      VFLIP_INT("nondeg.samples", nondeg.samples),
      VFLIP_NUMBER("nondeg.k0_min", nondeg.k0_min),
      VFLIP_NUMBER("nondeg.k0_max", nondeg.k0_max),
      VFLIP_INT("nondeg.k0_points", nondeg.k0_points),
      VFLIP_INT("scan.L_min", scan.L_min),
      VFLIP_INT("scan.L_max", scan.L_max),
      VFLIP_LIST("kernel.times", kernel.times),
      VFLIP_LIST("compare.t0_factors", compare.t0_factors),
      VFLIP_CHOICE("compare.smearing", compare.smearing, "bandlimited_bump", "gaussian"),
      VFLIP_NUMBER("compare.smearing_width", compare.smearing_width),
      VFLIP_NUMBER("compare.window", compare.window),
      VFLIP_NUMBER("compare.t_step", compare.t_step),
      VFLIP_LIST("compare.lattice_times", compare.lattice_times),
      Field{"output.dir", [](const ExperimentConfig& c) { return c.output.dir; },
            [](ExperimentConfig& c, const std::string& v) { c.output.dir = v; }},
      VFLIP_CHOICE("output.format", output.format, "csv", "json"),
  };
  return table;
}

#undef VFLIP_NUMBER
#undef VFLIP_INT
#undef VFLIP_UNSIGNED
#undef VFLIP_LIST
#undef VFLIP_CHOICE

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void check(const ExperimentConfig& c) {
  require(c.model.omega0 > 0.0, "model.omega0 must be positive");
  require(c.model.gamma > 0.0, "model.gamma must be positive");
  require(c.model.L >= 1, "model.L must be at least 1");
  require(c.model.kind != "custom" || c.model.phi.size() % 2 == 1,
          "model.phi needs an odd number of entries for a custom model");
  require(c.init.amplitude >= 0.0, "init.amplitude must be nonnegative");
  require(c.init.samples >= 1, "init.samples must be at least 1");
  require(c.init.width >= 0, "init.width must be nonnegative");
  require(c.init.kind != "deterministic" ||
              (c.init.q.size() == static_cast<std::size_t>(c.model.L) &&
               c.init.p.size() == static_cast<std::size_t>(c.model.L)),
          "init.q and init.p need model.L entries for a deterministic init");
  require(c.solver.h >= 0.0, "solver.h must be nonnegative (0 selects h_max)");
  require(c.solver.t_max >= 0.0, "solver.t_max must be nonnegative");
  require(c.solver.record_every > 0.0, "solver.record_every must be positive");
  require(c.solver.t_cut >= 0.0, "solver.t_cut must be nonnegative");
  require(c.solver.memory_tol >= 0.0 && c.solver.memory_tol < 1.0, "solver.memory_tol must lie in [0, 1)");
  require(c.mc.realizations >= 2, "mc.realizations must be at least 2");
  for (std::size_t i = 0; i < c.mc.times.size(); ++i)
    require(c.mc.times[i] >= 0.0 && (i == 0 || c.mc.times[i] >= c.mc.times[i - 1]),
            "mc.times must be nonnegative and increasing");
  require(c.nondeg.epsilon > 0.0 && c.nondeg.epsilon <= 0.5, "nondeg.epsilon must lie in (0, 1/2]");
  require(c.nondeg.threshold > 0.0, "nondeg.threshold must be positive");
  require(c.nondeg.samples >= 2, "nondeg.samples must be at least 2");
  require(c.nondeg.k0_points >= 1, "nondeg.k0_points must be at least 1");
  require(c.nondeg.k0_min <= c.nondeg.k0_max, "nondeg.k0_min must not exceed nondeg.k0_max");
  require(c.scan.L_min >= 1 && c.scan.L_min <= c.scan.L_max, "scan.L_min..scan.L_max must be a valid range");
  for (double t : c.kernel.times) require(t >= 0.0, "kernel.times must be nonnegative");
  require(!c.compare.t0_factors.empty(), "compare.t0_factors must not be empty");
  for (double f : c.compare.t0_factors) require(f > 0.0, "compare.t0_factors must be positive");
  require(c.compare.smearing_width > 0.0, "compare.smearing_width must be positive");
  require(c.compare.smearing != "bandlimited_bump" || c.compare.smearing_width >= 1.0,
          "compare.smearing_width must be at least 1 for the bandlimited bump");
  require(c.compare.window >= 0.0, "compare.window must be nonnegative");
  require(c.compare.t_step > 0.0, "compare.t_step must be positive");
  for (double t : c.compare.lattice_times) require(t >= 0.0, "compare.lattice_times must be nonnegative");
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.emplace_back(f.key);
  return keys;
}

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, const Field*> lookup;
  for (const auto& f : fields()) lookup[f.key] = &f;

  ExperimentConfig config;
  std::map<std::string, int> seen;
  std::stringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    const std::string where = "line " + std::to_string(line) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    const auto it = lookup.find(key);
    if (it == lookup.end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (auto prev = seen.find(key); prev != seen.end())
      throw ConfigError(where + "key '" + key + "' already set on line " + std::to_string(prev->second));
    seen[key] = line;
    try {
      it->second->set(config, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }
  check(config);
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize(const ExperimentConfig& config) {
  std::string out;
  for (const auto& f : fields()) {
    out += f.key;
    out += " = ";
    out += f.get(config);
    out += "\n";
  }
  return out;
}

std::string config_hash(const ExperimentConfig& config) {
  // Where and how results are written does not change them.
  ExperimentConfig content = config;
  content.output = OutputConfig{};
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize(content)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(h));
  return buffer;
}

InteractionModel build_model(const ExperimentConfig& config, int L) {
  const auto& m = config.model;
  switch (interaction_kind_from_string(m.kind)) {
    case InteractionKind::nearest_neighbor:
      return InteractionModel::nearest_neighbor(m.omega0, m.gamma, L);
    case InteractionKind::next_nearest_degenerate:
      return InteractionModel::next_nearest_degenerate(m.omega0, m.gamma, L);
    case InteractionKind::custom:
      return InteractionModel::custom(m.phi, m.gamma, L);
  }
  throw ConfigError("unknown model.kind");
}

InteractionModel build_model(const ExperimentConfig& config) {
  return build_model(config, config.model.L);
}

InitialCondition build_initial(const ExperimentConfig& config, const InteractionModel& model) {
  const auto& init = config.init;
  const auto L = static_cast<std::size_t>(model.size());
  if (init.kind == "point_momentum") {
    if (init.amplitude > 0.0) return InitialCondition::point_momentum(model, init.amplitude);
    return InitialCondition::point_momentum(model);
  }
  if (init.kind == "deterministic") {
    if (init.q.size() != L || init.p.size() != L)
      throw ConfigError("init.q and init.p need one entry per site");
    return InitialCondition::deterministic(model, PhasePoint{init.q, init.p});
  }
  // Gaussian momenta on |x| <= width, positions at rest; equal weights.
  const double sigma = init.amplitude > 0.0 ? init.amplitude : 1.0;
  const auto& lat = model.lattice();
  std::vector<PhasePoint> points;
  for (int s = 0; s < init.samples; ++s) {
    StreamRng rng(init.seed, static_cast<std::uint64_t>(s));
    auto X = PhasePoint::zeros(model.size());
    for (long x = -init.width; x <= init.width; ++x) {
      // Box-Muller, one variate per pair of uniforms.
      const double u1 = rng.uniform_open0(), u2 = rng.uniform();
      X.p[lat.index(x)] += sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    points.push_back(std::move(X));
  }
  std::vector<double> weights(points.size(), 1.0);
  return InitialCondition::sample_set(model, std::move(points), std::move(weights));
}

SolverOptions build_solver_options(const ExperimentConfig& config, int workers) {
  SolverOptions options;
  options.scheme = config.solver.scheme == "midpoint" ? VolterraScheme::midpoint : VolterraScheme::trapezoid;
  options.memory_tol = config.solver.memory_tol;
  options.workers = workers;
  return options;
}

double solver_step(const ExperimentConfig& config, const InteractionModel& model) {
  return config.solver.h > 0.0 ? config.solver.h : max_step(model);
}

}  // namespace vflip
