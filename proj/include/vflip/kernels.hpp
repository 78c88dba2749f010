#pragma once

// Ingredients of the temperature renewal equation
//
//   T_{t,x} = g_{t,x} + int_0^t ds sum_y p_{s,y} T_{t-s,x-y}
//
// with memory kernel p_{t,x} = 2 gamma (A2_{t,x})^2 and source
// g_{t,x} = < ((exp(-t M^T) X(0))^2_x)^2 >.

#include <optional>
#include <string>
#include <vector>

#include "vflip/lattice.hpp"
#include "vflip/model.hpp"
#include "vflip/phase_point.hpp"
#include "vflip/propagator.hpp"
#include "vflip/quadrature.hpp"

namespace vflip {

enum class InitialKind { deterministic, point_momentum, sample_set };

std::string to_string(InitialKind kind);

/// Distribution of X(0), represented by weighted phase points.
class InitialCondition {
 public:
  static InitialCondition deterministic(const InteractionModel& model, PhasePoint X);
  /// q = 0, p = amplitude at site 0.  The default amplitude sqrt(2L) gives E_L = L.
  static InitialCondition point_momentum(const InteractionModel& model,
                                         std::optional<double> amplitude = std::nullopt);
  static InitialCondition sample_set(const InteractionModel& model, std::vector<PhasePoint> points,
                                     std::vector<double> weights);

  InitialKind kind() const { return kind_; }
  const std::vector<PhasePoint>& samples() const { return samples_; }
  /// Normalized to sum 1.
  const std::vector<double>& weights() const { return weights_; }
  /// E_L = < H_L(X(0)) >.
  double energy() const { return energy_; }
  /// E_L / L.
  double energy_density() const { return energy_ / static_cast<double>(size_); }
  int size() const { return size_; }

 private:
  InitialCondition(InitialKind kind, const InteractionModel& model, std::vector<PhasePoint> samples,
                   std::vector<double> weights);
  InitialKind kind_;
  int size_;
  std::vector<PhasePoint> samples_;
  std::vector<double> weights_;
  double energy_;
};

/// Default infinite-time quadrature: panels of min(0.02/gamma, 0.02/omega_max)
/// up to t_cut = 40/delta0.
TimeQuadrature default_time_quadrature(const InteractionModel& model,
                                       std::optional<double> panel_width = std::nullopt,
                                       std::optional<double> t_cut = std::nullopt);

/// Evaluates p_{t,.}, its lattice transform and rho_t for one model.
class MemoryKernel {
 public:
  explicit MemoryKernel(const InteractionModel& model);

  const InteractionModel& model() const { return model_; }
  const std::vector<ModeSpectrum>& spectra() const { return spectra_; }

  /// p_{t,x}, x in lattice order.
  RealField at(double t) const;
  /// p^_t(n) = sum_y p_{t,y} exp(-i 2 pi n y / L); real and even in n.
  RealField spectrum_at(double t) const;
  /// rho_t = sum_y p_{t,y}, computed as 2 gamma (1/L) sum_k A2_t(k)^2.
  double rho(double t) const;

 private:
  InteractionModel model_;
  std::vector<ModeSpectrum> spectra_;
};

RealField memory_kernel(const InteractionModel& model, double t);
double rho(const InteractionModel& model, double t);

struct KernelMoments {
  double mass = 0.0;          // int rho dt
  double first_moment = 0.0;  // int t rho dt
  double tail_bound = 0.0;    // rho(t_cut) / (2 delta0), bound on the neglected mass
};

KernelMoments kernel_moments(const InteractionModel& model, const TimeQuadrature& quadrature);

/// ptilde_x = (gamma/2) int_0^inf p_{s,x} ds.
RealField ptilde(const InteractionModel& model, const TimeQuadrature& quadrature);
RealField ptilde(const InteractionModel& model);

/// Evaluates g_{t,.} for one initial condition.
class SourceTerm {
 public:
  SourceTerm(const InteractionModel& model, const InitialCondition& init);

  /// g_{t,x}, x in lattice order.
  RealField at(double t) const;

 private:
  InteractionModel model_;
  std::vector<ModeSpectrum> spectra_;
  std::vector<ComplexField> q_hat_;
  std::vector<ComplexField> p_hat_;
  std::vector<double> weights_;
};

RealField source_term(const InteractionModel& model, const InitialCondition& init, double t);

/// int_0^inf g_{s,x} ds per site.
RealField integrated_source(const InteractionModel& model, const InitialCondition& init,
                            const TimeQuadrature& quadrature);

/// p^(lambda, n) = int_0^inf ds sum_y p_{s,y} exp(-s lambda) exp(-i 2 pi n y / L), closed form.
/// Throws DomainError if Re lambda <= -delta0.
Complex laplace_fourier_p(const InteractionModel& model, Complex lambda, long n);
/// d/dlambda p^(lambda, n).
Complex laplace_fourier_p_derivative(const InteractionModel& model, Complex lambda, long n);

/// Tabulated kernels on a time grid t_j.
struct KernelSet {
  std::vector<double> times;
  std::vector<RealField> p;  // [j][x]
  std::vector<double> rho;   // [j]
  RealField ptilde;          // [x]
  std::vector<RealField> g;  // [j][x]
};

KernelSet tabulate_kernels(const InteractionModel& model, const InitialCondition& init,
                           const std::vector<double>& times);

}  // namespace vflip
