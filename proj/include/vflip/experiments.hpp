#pragma once

// Experiment drivers behind the CLI subcommands.  Each takes a parsed config and
// returns plain result structs; formatting and file output live in the tool.

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "vflip/asymptotics.hpp"
#include "vflip/config.hpp"
#include "vflip/kernels.hpp"
#include "vflip/model.hpp"
#include "vflip/montecarlo.hpp"
#include "vflip/renewal.hpp"

namespace vflip {

ValidationOptions build_validation_options(const ExperimentConfig& config, int workers);

ValidationReport run_validate(const ExperimentConfig& config, int workers);

/// (k0, I(k0)) on nondeg.k0_points equally spaced points of [k0_min, k0_max].
std::vector<std::pair<double, double>> run_nondegeneracy(const ExperimentConfig& config, int workers);

struct KappaRow {
  int L = 0;
  double kappa = 0.0;
  double kappa_inf = 0.0;  // nearest neighbour closed form; NaN for other kinds
};

/// kappa_L for L in [scan.L_min, scan.L_max]; throws ValidationRequired when any L fails.
std::vector<KappaRow> run_kappa_scan(const ExperimentConfig& config, int workers);

struct KernelReport {
  KernelSet set;
  KernelMoments moments;       // int rho, int t rho
  double source_integral = 0;  // int sum_x g
  double energy = 0;           // E_L
};

KernelReport run_kernel(const ExperimentConfig& config, int workers);

struct SolveReport {
  TemperatureProfile profile;         // rows every solver.record_every
  std::vector<double> mass_residual;  // per recorded row
  std::vector<double> max_deviation;  // max_x |T - E| per recorded row
  double h = 0.0;
  std::size_t steps = 0;
  double energy = 0.0;          // E_L
  double energy_density = 0.0;  // E
  double min_temperature = 0.0;
  /// Fit of max_x |T - E| ~ exp(-d t / L^2) over the second half of the run.
  double fitted_d = 0.0;
  /// L^2 R(1/L), the rate of the slowest diffusive mode, when available.
  std::optional<double> predicted_d;
};

SolveReport run_solve(const ExperimentConfig& config, int workers);

EnsembleResult run_simulate(const ExperimentConfig& config, int workers);

struct ZScoreSummary {
  std::size_t cells = 0;
  std::size_t within_3sigma = 0;
  double max_abs_z = 0.0;
  double mean_square_z = 0.0;

  double fraction_within() const { return cells ? static_cast<double>(within_3sigma) / cells : 0.0; }
};

/// z-scores of a Monte Carlo profile against a reference on the same times.
ZScoreSummary z_scores(const TemperatureProfile& mc, const TemperatureProfile& reference);

struct ContinuumGap {
  double t0 = 0.0;      // grid time actually used
  double gap = 0.0;     // sup over t in the window and xi of |T_pred - T_obs|
  double t_at_sup = 0.0;
};

struct CompareReport {
  double kappa = 0.0;
  double epsilon0_effective = 0.0;
  std::vector<double> lattice_times;
  std::vector<double> sup_gap_lattice;  // sup_x |T_t - (exp(-tD) tau)_x|
  std::vector<ContinuumGap> continuum;
  double fitted_exponent = 0.0;        // least squares of log gap against log t0
  std::vector<double> pairwise_slopes;  // between consecutive t0
  std::optional<ZScoreSummary> mc;
};

CompareReport run_compare(const ExperimentConfig& config, int workers);

/// sup over t in [0, window] (step t_step) and xi of |heat(obs(t0), t) - obs(t0 + t)|,
/// with obs the smeared profile on the 8L-point xi grid.  `row` maps a time to T.
template <class RowFn>
ContinuumGap continuum_gap(const CyclicLattice& lattice, RowFn&& row, const SmearingKernel& phi,
                           double kappa, double t0, double window, double t_step) {
  const int L = lattice.size();
  const auto xi = xi_grid(L, 8 * L);
  const auto initial = smear_spectral(lattice, row(t0), phi, xi);
  ContinuumGap out;
  out.t0 = t0;
  const auto steps = static_cast<std::size_t>(std::floor(window / t_step + 1e-9));
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * t_step;
    const auto predicted = heat_predict(L, initial, kappa, t);
    const auto observed = smear_spectral(lattice, row(t0 + t), phi, xi);
    for (std::size_t j = 0; j < xi.size(); ++j) {
      const double d = std::abs(predicted[j] - observed[j]);
      if (d > out.gap) {
        out.gap = d;
        out.t_at_sup = t;
      }
    }
  }
  return out;
}

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace vflip
