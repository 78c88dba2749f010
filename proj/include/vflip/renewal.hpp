#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vflip/kernels.hpp"
#include "vflip/lattice.hpp"
#include "vflip/model.hpp"

namespace vflip {

enum class Provenance { renewal, montecarlo, diffusion_lattice, diffusion_continuum };
std::string to_string(Provenance provenance);

/// T_{t,x} on a set of recorded times; rows are times, columns lattice sites.
struct TemperatureProfile {
  std::vector<double> times;
  std::vector<RealField> values;
  std::vector<RealField> stderr_values;  // Monte Carlo only
  Provenance provenance = Provenance::renewal;

  std::size_t row_of(double t, double tol = 1e-9) const;
  const RealField& at(double t) const { return values[row_of(t)]; }
};

/// Second-order product-integration rules for the scalar Volterra equation.
enum class VolterraScheme { trapezoid, midpoint };

/// Uniform grid t_j = j h, j = 0..steps.
struct TimeGrid {
  double h = 0.0;
  std::size_t steps = 0;

  double time(std::size_t j) const { return h * static_cast<double>(j); }
  double horizon() const { return time(steps); }
  /// Smallest grid of step h covering [0, t_max].
  static TimeGrid covering(double t_max, double h);
};

/// Largest accepted step: min(0.05/gamma, 0.05/omega_max, 0.25/max mu_+).
double max_step(const InteractionModel& model);

struct SolverOptions {
  VolterraScheme scheme = VolterraScheme::trapezoid;
  /// Kernel history is dropped once rho falls below memory_tol * rho_0 for good.
  double memory_tol = 1e-17;
  /// Record every n-th grid time in the returned profile.
  std::size_t record_stride = 1;
  int workers = 1;
};

/// Product-integration weights of a kernel k against the hat functions of a
/// uniform grid: for panel i = [t_i, t_{i+1}],
///   left[i]  = int k(s) (t_{i+1} - s) / h ds,  right[i] = int k(s) (s - t_i) / h ds.
/// Their sum reproduces int k exactly and their first moment int s k(s) ds.
struct ProductWeights {
  std::vector<double> left;
  std::vector<double> right;

  std::size_t panels() const { return left.size(); }
};

/// Weights of `kernel` on `panels` panels of width h, by 4-point Gauss-Legendre per panel.
ProductWeights product_weights(const std::function<double(double)>& kernel, double h,
                               std::size_t panels);

/// Lattice transform of the memory kernel on a uniform grid, shared by all solves.
class KernelTable {
 public:
  KernelTable(const InteractionModel& model, const TimeGrid& grid, const SolverOptions& options = {});

  const InteractionModel& model() const { return model_; }
  const TimeGrid& grid() const { return grid_; }
  VolterraScheme scheme() const { return scheme_; }
  /// p^_{t_j}(n) at the grid times, j = 0..steps.
  const std::vector<double>& values(long n) const;
  /// Product-integration weights of p^_t(n) on the grid panels.
  const ProductWeights& weights(long n) const;
  /// Number of panels kept in the convolution history.
  std::size_t memory_length() const { return memory_length_; }

 private:
  InteractionModel model_;
  TimeGrid grid_;
  VolterraScheme scheme_;
  std::vector<std::vector<double>> values_;  // lattice order, modes with n >= 0 filled
  std::vector<ProductWeights> weights_;
  std::size_t memory_length_ = 0;
};

/// Solves f_j = s_j + int_0^{t_j} k(s) f(t_j - s) ds with the kernel given by its
/// product weights.  Trapezoid: f interpolated linearly between grid values.
/// Midpoint: f(t_j - s) on each panel replaced by the mean of its end values.
std::vector<double> solve_volterra(const ProductWeights& kernel, const std::vector<double>& source,
                                   VolterraScheme scheme, std::size_t memory_length);

/// Solves the renewal equation for T; throws StepTooLarge if grid.h > max_step(model).
TemperatureProfile solve_profile(const InteractionModel& model, const InitialCondition& init,
                                 const TimeGrid& grid, const SolverOptions& options = {});
TemperatureProfile solve_profile(const KernelTable& table, const InitialCondition& init,
                                 const SolverOptions& options = {});

/// Solves the renewal equation mode by mode; result[a][j] = T^(t_j, n) for the mode at
/// lattice index a.
std::vector<ComplexField> solve_profile_modes(const KernelTable& table,
                                              const InitialCondition& init,
                                              const SolverOptions& options = {});

struct ModeGreen {
  long n = 0;
  double k = 0.0;
  TimeGrid grid;
  std::vector<double> values;  // G^(t_j, n)
};

/// Fourier mode of the Green's function G = p + p * G.
ModeGreen greens_mode(const KernelTable& table, long n);
ModeGreen greens_mode(const InteractionModel& model, long n, const TimeGrid& grid,
                      const SolverOptions& options = {});

/// Residual of the summed identity sum_x T = sum_x g + int rho sum_x T at every grid
/// time, with the integral taken by the table's product rule.  `profile` must be
/// recorded at every grid time.
std::vector<double> mass_balance_residuals(const KernelTable& table, const InitialCondition& init,
                             const TemperatureProfile& profile);

struct AsymptoticCheck {
  std::vector<double> times;
  std::vector<double> deviation;  // |G^(t,k) - a(k) exp(-t R(k))|
  double fitted_rate = 0.0;       // delta_hat
  double max_scaled = 0.0;        // max deviation * exp(delta_hat t)
};

struct AsymptoticData;

/// Compares a Green's mode with its pole approximation a(k) exp(-t R(k)) over
/// [t_begin, t_end]; throws MissingAsymptotics when the mode is not in `data`.
AsymptoticCheck greens_asymptotic_check(const ModeGreen& mode, const AsymptoticData& data,
                                        double t_begin, double t_end);

}  // namespace vflip
