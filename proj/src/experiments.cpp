#include "vflip/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vflip/errors.hpp"
#include "vflip/parallel.hpp"

namespace vflip {

namespace {

ValidatedModel validated(const ExperimentConfig& config, int workers) {
  return ValidatedModel::check(build_model(config), build_validation_options(config, workers));
}

TimeQuadrature time_quadrature(const ExperimentConfig& config, const InteractionModel& model) {
  std::optional<double> t_cut;
  if (config.solver.t_cut > 0.0) t_cut = config.solver.t_cut;
  return default_time_quadrature(model, std::nullopt, t_cut);
}

// Largest step <= the configured one that divides `unit` exactly, so that the
// times an experiment asks for land on the grid.
double aligned_step(const ExperimentConfig& config, const InteractionModel& model, double unit) {
  const double h = solver_step(config, model);
  if (!(unit > 0.0)) return h;
  return unit / std::ceil(unit / h - 1e-9);
}

std::size_t grid_index(double t, double h) { return static_cast<std::size_t>(std::llround(t / h)); }

}  // namespace

ValidationOptions build_validation_options(const ExperimentConfig& config, int workers) {
  ValidationOptions options;
  options.epsilon = config.nondeg.epsilon;
  options.threshold = config.nondeg.threshold;
  options.samples = config.nondeg.samples;
  options.workers = workers;
  return options;
}

ValidationReport run_validate(const ExperimentConfig& config, int workers) {
  return validate(build_model(config), build_validation_options(config, workers));
}

std::vector<std::pair<double, double>> run_nondegeneracy(const ExperimentConfig& config, int workers) {
  const auto model = build_model(config);
  const auto& nd = config.nondeg;
  const auto n = static_cast<std::size_t>(nd.k0_points);
  std::vector<std::pair<double, double>> rows(n);
  parallel_for(n, workers, [&](std::size_t i) {
    const double k0 = n == 1 ? nd.k0_min
                             : nd.k0_min + (nd.k0_max - nd.k0_min) * static_cast<double>(i) / (n - 1);
    rows[i] = {k0, nondegeneracy_integral(model, k0)};
  });
  return rows;
}

std::vector<KappaRow> run_kappa_scan(const ExperimentConfig& config, int workers) {
  const auto options = build_validation_options(config, workers);
  const bool nn = config.model.kind == "nearest_neighbor";
  const double kinf = nn ? kappa_infinite_nearest_neighbor(config.model.omega0, config.model.gamma)
                         : std::numeric_limits<double>::quiet_NaN();
  std::vector<KappaRow> rows;
  for (int L = config.scan.L_min; L <= config.scan.L_max; ++L) {
    const auto model = build_model(config, L);
    const auto report = validate(model, options);
    if (!report.all_ok()) throw ValidationRequired("model fails validation at L=" + std::to_string(L));
    rows.push_back({L, kappa(model.lattice(), ptilde(model, time_quadrature(config, model))), kinf});
  }
  return rows;
}

KernelReport run_kernel(const ExperimentConfig& config, int workers) {
  const auto vm = validated(config, workers);
  const auto& model = vm.model();
  const auto init = build_initial(config, model);
  const auto quadrature = time_quadrature(config, model);
  KernelReport report;
  report.set = tabulate_kernels(model, init, config.kernel.times);
  report.set.ptilde = ptilde(model, quadrature);
  report.moments = kernel_moments(model, quadrature);
  const auto total = integrated_source(model, init, quadrature);
  for (double v : total) report.source_integral += v;
  report.energy = init.energy();
  return report;
}

SolveReport run_solve(const ExperimentConfig& config, int workers) {
  const auto vm = validated(config, workers);
  const auto& model = vm.model();
  const auto init = build_initial(config, model);
  SolveReport report;
  report.h = aligned_step(config, model, config.solver.record_every);
  const auto grid = TimeGrid::covering(config.solver.t_max, report.h);
  report.steps = grid.steps;
  auto options = build_solver_options(config, workers);
  const KernelTable table(model, grid, options);
  const auto full = solve_profile(table, init, options);
  const auto residuals = mass_balance_residuals(table, init, full);

  report.energy = init.energy();
  report.energy_density = init.energy_density();
  report.min_temperature = std::numeric_limits<double>::infinity();
  for (const auto& row : full.values)
    for (double v : row) report.min_temperature = std::min(report.min_temperature, v);

  const std::size_t stride = std::max<std::size_t>(1, grid_index(config.solver.record_every, report.h));
  report.profile.provenance = Provenance::renewal;
  for (std::size_t j = 0; j <= grid.steps; j += stride) {
    report.profile.times.push_back(full.times[j]);
    report.profile.values.push_back(full.values[j]);
    report.mass_residual.push_back(residuals[j]);
    double dev = 0.0;
    for (double v : full.values[j]) dev = std::max(dev, std::abs(v - report.energy_density));
    report.max_deviation.push_back(dev);
  }

  // Late-time decay of the deviation, in units of t / L^2.
  const double L2 = static_cast<double>(model.size()) * model.size();
  std::vector<double> ts, logs;
  for (std::size_t i = 0; i < report.profile.times.size(); ++i) {
    if (report.profile.times[i] < 0.5 * grid.horizon() || !(report.max_deviation[i] > 0.0)) continue;
    ts.push_back(report.profile.times[i]);
    logs.push_back(std::log(report.max_deviation[i]));
  }
  if (ts.size() >= 2) {
    double mt = 0, ml = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      mt += ts[i] / ts.size();
      ml += logs[i] / ts.size();
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      sxy += (ts[i] - mt) * (logs[i] - ml);
      sxx += (ts[i] - mt) * (ts[i] - mt);
    }
    if (sxx > 0.0) report.fitted_d = -L2 * sxy / sxx;
  }
  if (model.size() > 1)
    if (auto rate = decay_rate(vm, 1)) report.predicted_d = L2 * *rate;
  return report;
}

EnsembleResult run_simulate(const ExperimentConfig& config, int workers) {
  const auto model = build_model(config);
  if (!(model.min_phi_hat() > 0.0)) throw PinningViolation("simulation needs a pinned model");
  const auto init = build_initial(config, model);
  EnsembleOptions options;
  options.realizations = config.mc.realizations;
  options.seed = config.mc.seed;
  options.workers = workers;
  return ensemble_average(model, init, config.mc.times, options);
}

ZScoreSummary z_scores(const TemperatureProfile& mc, const TemperatureProfile& reference) {
  ZScoreSummary out;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < mc.times.size(); ++i) {
    const auto& ref = reference.at(mc.times[i]);
    for (std::size_t x = 0; x < ref.size(); ++x) {
      const double diff = mc.values[i][x] - ref[x];
      const double se = mc.stderr_values[i][x];
      double z = 0.0;
      if (se > 0.0) {
        z = diff / se;
      } else if (std::abs(diff) > 1e-9 * std::max(1.0, std::abs(ref[x]))) {
        z = std::numeric_limits<double>::infinity();
      }
      ++out.cells;
      if (std::abs(z) <= 3.0) ++out.within_3sigma;
      out.max_abs_z = std::max(out.max_abs_z, std::abs(z));
      sum_sq += z * z;
    }
  }
  if (out.cells) out.mean_square_z = sum_sq / static_cast<double>(out.cells);
  return out;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("log_log_slope needs >= 2 points");
  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

CompareReport run_compare(const ExperimentConfig& config, int workers) {
  const auto vm = validated(config, workers);
  const auto& model = vm.model();
  const auto& lat = model.lattice();
  const auto init = build_initial(config, model);
  const int L = model.size();
  const double base = std::pow(static_cast<double>(L), 2.0 / 3.0);
  const auto& cc = config.compare;
  const double window = cc.window > 0.0 ? cc.window : 0.5 * L * L;
  const double h = aligned_step(config, model, cc.t_step);

  CompareReport report;
  report.lattice_times = cc.lattice_times;
  if (report.lattice_times.empty()) report.lattice_times = {0.5 * base, base, 2.0 * base};
  std::vector<double> t0s;
  for (double f : cc.t0_factors) t0s.push_back(h * static_cast<double>(grid_index(f * base, h)));

  double horizon = *std::max_element(t0s.begin(), t0s.end()) + window;
  for (double t : report.lattice_times) horizon = std::max(horizon, t);
  if (config.mc.enabled && !config.mc.times.empty()) horizon = std::max(horizon, config.mc.times.back());

  const auto grid = TimeGrid::covering(horizon, h);
  const auto options = build_solver_options(config, workers);
  const KernelTable table(model, grid, options);
  const auto profile = solve_profile(table, init, options);
  auto row = [&](double t) -> const RealField& { return profile.values.at(grid_index(t, h)); };

  const auto quadrature = time_quadrature(config, model);
  const auto data = compute_asymptotics(vm, quadrature, workers);
  report.kappa = data.kappa;
  report.epsilon0_effective = data.epsilon0_effective;
  const auto tau = tau_profile(model, data, init, quadrature);
  for (double t : report.lattice_times) {
    const auto predicted = lattice_diffusion(lat, data.ptilde, tau, t);
    const auto& actual = row(t);
    double gap = 0.0;
    for (std::size_t x = 0; x < actual.size(); ++x) gap = std::max(gap, std::abs(actual[x] - predicted[x]));
    report.sup_gap_lattice.push_back(gap);
  }

  const auto phi = cc.smearing == "gaussian" ? SmearingKernel::gaussian(cc.smearing_width)
                                             : SmearingKernel::bandlimited_bump(cc.smearing_width);
  report.continuum.resize(t0s.size());
  parallel_for(t0s.size(), workers, [&](std::size_t i) {
    report.continuum[i] = continuum_gap(lat, row, phi, data.kappa, t0s[i], window, cc.t_step);
  });
  if (t0s.size() >= 2) {
    std::vector<double> gaps;
    for (const auto& c : report.continuum) gaps.push_back(c.gap);
    report.fitted_exponent = log_log_slope(t0s, gaps);
    for (std::size_t i = 0; i + 1 < t0s.size(); ++i)
      report.pairwise_slopes.push_back(std::log(gaps[i + 1] / gaps[i]) / std::log(t0s[i + 1] / t0s[i]));
  }

  if (config.mc.enabled) {
    EnsembleOptions mc;
    mc.realizations = config.mc.realizations;
    mc.seed = config.mc.seed;
    mc.workers = workers;
    const auto ensemble = ensemble_average(model, init, config.mc.times, mc);
    TemperatureProfile reference;
    for (double t : config.mc.times) {
      reference.times.push_back(t);
      reference.values.push_back(row(t));
    }
    report.mc = z_scores(ensemble.profile, reference);
  }
  return report;
}

}  // namespace vflip
