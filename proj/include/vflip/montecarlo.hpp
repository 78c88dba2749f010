#pragma once

// Event-driven simulation of the harmonic chain with velocity flips: between
// flips the state follows the exact harmonic flow; each site flips the sign of
// its momentum at Poisson rate gamma/2.

#include <cstdint>
#include <vector>

#include "vflip/kernels.hpp"
#include "vflip/model.hpp"
#include "vflip/phase_point.hpp"
#include "vflip/renewal.hpp"
#include "vflip/rng.hpp"

namespace vflip {

/// Exact harmonic flow over dt, mode by mode in Fourier space.
PhasePoint harmonic_flow(const InteractionModel& model, double dt, const PhasePoint& X);

struct SimulationRun {
  std::uint64_t seed = 0;
  std::uint64_t flip_count = 0;
  double current_time = 0.0;
  PhasePoint state;
  double energy0 = 0.0;
};

SimulationRun start_run(const InteractionModel& model, PhasePoint X, std::uint64_t seed);

/// Advances the run to t_target; flips are drawn from rng.
void step_to(const InteractionModel& model, SimulationRun& run, double t_target, StreamRng& rng);

/// Fast simulator working in a real orthonormal normal-mode basis: O(L) per event.
class ChainSimulator {
 public:
  explicit ChainSimulator(const InteractionModel& model);

  int size() const { return static_cast<int>(frequency_.size()); }
  double flip_rate_per_site() const { return 0.5 * gamma_; }

  void load(const PhasePoint& X);
  PhasePoint state() const;
  double energy() const;
  double time() const { return time_; }
  std::uint64_t flips() const { return flips_; }

  /// Exact flow of the harmonic part.
  void flow(double dt);
  /// Negates the momentum at lattice index i.
  void flip(std::size_t i);
  /// Event loop up to t_target.
  void advance_to(double t_target, StreamRng& rng);

  double momentum(std::size_t i) const;

 private:
  std::vector<double> basis_;      // [i * L + m], orthonormal columns
  std::vector<double> frequency_;  // per mode
  std::vector<std::size_t> group_; // distinct-frequency index per mode
  std::vector<double> group_freq_;
  std::vector<double> cos_, sin_;
  std::vector<double> Q_, P_;
  double gamma_;
  double time_ = 0.0;
  std::uint64_t flips_ = 0;
};

enum class Observable { kinetic, momentum, position_momentum };

struct EnsembleOptions {
  std::size_t realizations = 1000;
  std::uint64_t seed = 1;
  int workers = 1;
  Observable observable = Observable::kinetic;
  /// Realizations per deterministic reduction block.
  std::size_t block = 256;
};

struct EnsembleResult {
  TemperatureProfile profile;     // per-site means and standard errors
  double mean_flips = 0.0;        // over the run up to the last time
  double variance_flips = 0.0;
  double max_energy_drift = 0.0;  // max relative |H(t) - H(0)| / H(0)
};

/// Ensemble averages of the observable at the requested (increasing) times.
EnsembleResult ensemble_average(const InteractionModel& model, const InitialCondition& init,
                                const std::vector<double>& times, const EnsembleOptions& options);

/// T_{t,x} = < p_x(t)^2 > with standard errors; provenance montecarlo.
TemperatureProfile estimate_temperature(const InteractionModel& model, const InitialCondition& init,
                                        const std::vector<double>& times, std::size_t realizations,
                                        std::uint64_t seed, int workers = 1);

}  // namespace vflip
