// vflip: configuration-driven runner for the velocity-flip chain experiments.
//
// Exit codes: 0 success, 1 usage or parse error, 2 model assumption failure,
// 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vflip/config.hpp"
#include "vflip/errors.hpp"
#include "vflip/experiments.hpp"
#include "vflip/parallel.hpp"

namespace {

using nlohmann::ordered_json;
using vflip::format_double;

struct Settings {
  std::string config_path;
  std::string out_dir;
  int workers = 0;
  std::optional<std::uint64_t> seed;
  std::string format;
};

struct Context {
  vflip::ExperimentConfig config;
  std::string hash;
  std::filesystem::path out;
  int workers = 1;
  bool json = false;
};

Context make_context(const Settings& s) {
  Context ctx;
  ctx.config = vflip::load_config(s.config_path);
  if (s.seed) ctx.config.mc.seed = *s.seed;
  if (!s.out_dir.empty()) ctx.config.output.dir = s.out_dir;
  if (!s.format.empty()) ctx.config.output.format = s.format;
  ctx.hash = vflip::config_hash(ctx.config);
  ctx.out = ctx.config.output.dir;
  ctx.workers = s.workers > 0 ? s.workers : vflip::default_workers();
  ctx.json = ctx.config.output.format == "json";
  std::filesystem::create_directories(ctx.out);
  return ctx;
}

ordered_json header(const Context& ctx, const std::string& command) {
  ordered_json j;
  j["tool"] = "vflip";
  j["version"] = VFLIP_VERSION;
  j["config_hash"] = ctx.hash;
  j["command"] = command;
  return j;
}

// NaN and infinities have no JSON literal; they become null.
ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::filesystem::path write_json(const Context& ctx, const std::string& name, const ordered_json& j) {
  const auto path = ctx.out / (name + ".json");
  std::ofstream(path) << j.dump(2) << "\n";
  return path;
}

class CsvWriter {
 public:
  CsvWriter(const Context& ctx, const std::string& name, const std::string& columns)
      : path_(ctx.out / (name + ".csv")), out_(path_) {
    out_ << "# vflip " << VFLIP_VERSION << " config=" << ctx.hash << "\n" << columns << "\n";
  }
  template <class... Cells>
  void row(const Cells&... cells) {
    std::string line;
    ((line += (line.empty() ? "" : ",") + cell(cells)), ...);
    out_ << line << "\n";
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  static std::string cell(double v) { return std::isfinite(v) ? format_double(v) : "nan"; }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }

  std::filesystem::path path_;
  std::ofstream out_;
};

ordered_json report_json(const vflip::ValidationReport& r) {
  ordered_json j;
  j["pinning_ok"] = r.pinning_ok;
  j["min_phi_hat"] = number(r.min_phi_hat);
  j["noise_dominates_ok"] = r.noise_dominates_ok;
  j["noise_margin"] = number(r.noise_margin);
  j["nondegeneracy_ok"] = r.nondegeneracy_ok;
  j["nondegeneracy_min"] = number(r.nondegeneracy_min);
  j["epsilon"] = r.epsilon;
  j["threshold"] = r.threshold;
  auto& profile = j["nondegeneracy_profile"] = ordered_json::array();
  for (const auto& [k0, value] : r.nondegeneracy_profile) profile.push_back({k0, value});
  j["all_ok"] = r.all_ok();
  return j;
}

int cmd_validate(const Context& ctx) {
  const auto report = vflip::run_validate(ctx.config, ctx.workers);
  auto j = header(ctx, "validate");
  j["report"] = report_json(report);
  std::cout << write_json(ctx, "validate", j).string() << "\n";
  std::cout << "pinning_ok=" << report.pinning_ok << " noise_dominates_ok=" << report.noise_dominates_ok
            << " nondegeneracy_ok=" << report.nondegeneracy_ok << "\n";
  return report.all_ok() ? 0 : 2;
}

int cmd_nondegeneracy(const Context& ctx) {
  const auto rows = vflip::run_nondegeneracy(ctx.config, ctx.workers);
  if (ctx.json) {
    auto j = header(ctx, "nondegeneracy");
    auto& data = j["rows"] = ordered_json::array();
    for (const auto& [k0, value] : rows) data.push_back({{"k0", k0}, {"I", value}});
    std::cout << write_json(ctx, "nondegeneracy", j).string() << "\n";
  } else {
    CsvWriter csv(ctx, "nondegeneracy", "k0,I");
    for (const auto& [k0, value] : rows) csv.row(k0, value);
    std::cout << csv.path().string() << "\n";
  }
  return 0;
}

int cmd_kappa_scan(const Context& ctx) {
  const auto rows = vflip::run_kappa_scan(ctx.config, ctx.workers);
  if (ctx.json) {
    auto j = header(ctx, "kappa-scan");
    auto& data = j["rows"] = ordered_json::array();
    for (const auto& r : rows)
      data.push_back({{"L", r.L}, {"kappa", r.kappa}, {"kappa_inf", number(r.kappa_inf)}});
    std::cout << write_json(ctx, "kappa_scan", j).string() << "\n";
  } else {
    CsvWriter csv(ctx, "kappa_scan", "L,kappa,kappa_inf");
    for (const auto& r : rows) csv.row(r.L, r.kappa, r.kappa_inf);
    std::cout << csv.path().string() << "\n";
  }
  return 0;
}

int cmd_kernel(const Context& ctx) {
  const auto report = vflip::run_kernel(ctx.config, ctx.workers);
  const auto model = vflip::build_model(ctx.config);
  const auto& lat = model.lattice();
  const auto& set = report.set;
  auto summary = header(ctx, "kernel");
  summary["energy"] = report.energy;
  summary["kernel_mass"] = report.moments.mass;
  summary["kernel_first_moment"] = report.moments.first_moment;
  summary["tail_bound"] = report.moments.tail_bound;
  summary["source_integral"] = report.source_integral;
  summary["source_normalization_error"] =
      number(std::abs(ctx.config.model.gamma * report.source_integral - report.energy) / report.energy);
  summary["rho"] = set.rho;
  auto& pt = summary["ptilde"] = ordered_json::array();
  for (std::size_t x = 0; x < set.ptilde.size(); ++x) pt.push_back({lat.label(x), set.ptilde[x]});
  if (ctx.json) {
    auto& rows = summary["rows"] = ordered_json::array();
    for (std::size_t j = 0; j < set.times.size(); ++j)
      for (std::size_t x = 0; x < set.p[j].size(); ++x)
        rows.push_back({{"t", set.times[j]}, {"x", lat.label(x)}, {"p", set.p[j][x]}, {"g", set.g[j][x]}});
    std::cout << write_json(ctx, "kernel", summary).string() << "\n";
  } else {
    CsvWriter csv(ctx, "kernel", "t,x,p,g");
    for (std::size_t j = 0; j < set.times.size(); ++j)
      for (std::size_t x = 0; x < set.p[j].size(); ++x) csv.row(set.times[j], lat.label(x), set.p[j][x], set.g[j][x]);
    std::cout << csv.path().string() << "\n" << write_json(ctx, "kernel_summary", summary).string() << "\n";
  }
  return 0;
}

int cmd_solve(const Context& ctx) {
  const auto report = vflip::run_solve(ctx.config, ctx.workers);
  const auto model = vflip::build_model(ctx.config);
  const auto& lat = model.lattice();
  const auto& prof = report.profile;
  auto summary = header(ctx, "solve");
  summary["h"] = report.h;
  summary["steps"] = report.steps;
  summary["energy"] = report.energy;
  summary["energy_density"] = report.energy_density;
  summary["min_temperature"] = report.min_temperature;
  double worst_residual = 0.0;
  for (double r : report.mass_residual) worst_residual = std::max(worst_residual, std::abs(r));
  summary["max_mass_residual"] = worst_residual;
  summary["fitted_d"] = report.fitted_d;
  summary["predicted_d"] = report.predicted_d ? number(*report.predicted_d) : ordered_json(nullptr);
  auto& per_time = summary["times"] = ordered_json::array();
  for (std::size_t i = 0; i < prof.times.size(); ++i)
    per_time.push_back({{"t", prof.times[i]},
                        {"max_deviation", report.max_deviation[i]},
                        {"mass_residual", report.mass_residual[i]}});
  if (ctx.json) {
    auto& rows = summary["rows"] = ordered_json::array();
    for (std::size_t i = 0; i < prof.times.size(); ++i)
      for (std::size_t x = 0; x < prof.values[i].size(); ++x)
        rows.push_back({{"t", prof.times[i]}, {"x", lat.label(x)}, {"T", prof.values[i][x]}});
    std::cout << write_json(ctx, "solve", summary).string() << "\n";
  } else {
    CsvWriter csv(ctx, "solve", "t,x,T");
    for (std::size_t i = 0; i < prof.times.size(); ++i)
      for (std::size_t x = 0; x < prof.values[i].size(); ++x) csv.row(prof.times[i], lat.label(x), prof.values[i][x]);
    CsvWriter times(ctx, "solve_times", "t,max_deviation,mass_residual");
    for (std::size_t i = 0; i < prof.times.size(); ++i)
      times.row(prof.times[i], report.max_deviation[i], report.mass_residual[i]);
    std::cout << csv.path().string() << "\n" << times.path().string() << "\n"
              << write_json(ctx, "solve_summary", summary).string() << "\n";
  }
  return 0;
}

int cmd_simulate(const Context& ctx) {
  const auto result = vflip::run_simulate(ctx.config, ctx.workers);
  const auto model = vflip::build_model(ctx.config);
  const auto& lat = model.lattice();
  const auto& prof = result.profile;
  auto summary = header(ctx, "simulate");
  summary["realizations"] = ctx.config.mc.realizations;
  summary["seed"] = ctx.config.mc.seed;
  summary["mean_flips"] = result.mean_flips;
  summary["variance_flips"] = result.variance_flips;
  summary["max_energy_drift"] = result.max_energy_drift;
  if (ctx.json) {
    auto& rows = summary["rows"] = ordered_json::array();
    for (std::size_t i = 0; i < prof.times.size(); ++i)
      for (std::size_t x = 0; x < prof.values[i].size(); ++x)
        rows.push_back({{"t", prof.times[i]},
                        {"x", lat.label(x)},
                        {"T", prof.values[i][x]},
                        {"stderr", prof.stderr_values[i][x]}});
    std::cout << write_json(ctx, "simulate", summary).string() << "\n";
  } else {
    CsvWriter csv(ctx, "simulate", "t,x,T,stderr");
    for (std::size_t i = 0; i < prof.times.size(); ++i)
      for (std::size_t x = 0; x < prof.values[i].size(); ++x)
        csv.row(prof.times[i], lat.label(x), prof.values[i][x], prof.stderr_values[i][x]);
    std::cout << csv.path().string() << "\n" << write_json(ctx, "simulate_summary", summary).string() << "\n";
  }
  return 0;
}

int cmd_compare(const Context& ctx) {
  const auto report = vflip::run_compare(ctx.config, ctx.workers);
  auto j = header(ctx, "compare");
  j["kappa"] = report.kappa;
  j["epsilon0_effective"] = report.epsilon0_effective;
  auto& lattice = j["sup_gap_lattice"] = ordered_json::array();
  for (std::size_t i = 0; i < report.lattice_times.size(); ++i)
    lattice.push_back({{"t", report.lattice_times[i]}, {"gap", report.sup_gap_lattice[i]}});
  auto& continuum = j["sup_gap_continuum"] = ordered_json::array();
  for (const auto& c : report.continuum)
    continuum.push_back({{"t0", c.t0}, {"gap", c.gap}, {"t_at_sup", c.t_at_sup}});
  j["fitted_exponent"] = report.fitted_exponent;
  j["pairwise_slopes"] = report.pairwise_slopes;
  if (report.mc) {
    j["mc"] = {{"cells", report.mc->cells},
               {"within_3sigma", report.mc->within_3sigma},
               {"fraction_within", report.mc->fraction_within()},
               {"max_abs_z", number(report.mc->max_abs_z)},
               {"mean_square_z", number(report.mc->mean_square_z)}};
  } else {
    j["mc"] = nullptr;
  }
  std::cout << write_json(ctx, "compare", j).string() << "\n";
  std::cout << "fitted_exponent=" << format_double(report.fitted_exponent) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Velocity-flip harmonic chain: renewal solver, asymptotics and Monte Carlo"};
  app.set_version_flag("--version", std::string("vflip ") + VFLIP_VERSION);
  app.require_subcommand(1);

  Settings settings;
  using Command = int (*)(const Context&);
  const std::vector<std::tuple<std::string, std::string, Command>> commands = {
      {"validate", "Check pinning, noise dominance and nondegeneracy", cmd_validate},
      {"nondegeneracy", "Tabulate the nondegeneracy integral I(k0)", cmd_nondegeneracy},
      {"kappa-scan", "Diffusion constant kappa_L over a range of L", cmd_kappa_scan},
      {"kernel", "Memory kernel, source term and their normalizations", cmd_kernel},
      {"solve", "Solve the renewal equation for the temperature profile", cmd_solve},
      {"simulate", "Monte Carlo estimate of the temperature profile", cmd_simulate},
      {"compare", "Renewal vs lattice diffusion vs continuum prediction (vs Monte Carlo)", cmd_compare},
  };
  Command selected = nullptr;
  for (const auto& [name, help, fn] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", settings.config_path, "Config file")->required();
    sub->add_option("--out", settings.out_dir, "Output directory (overrides output.dir)");
    sub->add_option("--workers", settings.workers, "Worker threads (default: number of cores)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", settings.seed, "Monte Carlo seed (overrides mc.seed)");
    sub->add_option("--format", settings.format, "Tabular output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->callback([&selected, fn = fn] { selected = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    return selected(make_context(settings));
  } catch (const vflip::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const vflip::AssumptionError& e) {
    std::cerr << "assumption failure: " << e.what() << "\n";
    return 2;
  } catch (const vflip::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
