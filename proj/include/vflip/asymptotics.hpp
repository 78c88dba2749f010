#pragma once

// Diffusive asymptotics of the renewal equation: the dominant pole R(k) of
// 1 / (1 - p^(lambda, k)) with residue weight a(k), the lattice diffusion symbol
// D^(k) = 4 sum_y ptilde_y sin^2(pi k y) and kappa_L = sum_y y^2 ptilde_y.

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "vflip/kernels.hpp"
#include "vflip/lattice.hpp"
#include "vflip/model.hpp"

namespace vflip {

/// Root of p^(-R, n) = 1 by bisection on [0, 0.9 delta0]; nullopt when the
/// bracket holds no sign change.
std::optional<double> decay_rate(const ValidatedModel& model, long n);

/// a(k) = 1 / (-d/dlambda p^(lambda, n)) at lambda = -R.
double amplitude(const ValidatedModel& model, long n, double rate);

/// D^(n / L) = 4 sum_y ptilde_y sin^2(pi n y / L).
double lattice_symbol(const CyclicLattice& lattice, const RealField& ptilde, long n);

/// kappa_L = sum_y y^2 ptilde_y.
double kappa(const CyclicLattice& lattice, const RealField& ptilde);
double kappa(const InteractionModel& model);

/// kappa_inf = 1 / (gamma (2 + omega0^2 + omega0 sqrt(omega0^2 + 4))), nearest neighbour chain.
double kappa_infinite_nearest_neighbor(double omega0, double gamma);

struct ModeAsymptotics {
  long n = 0;
  double k = 0.0;
  std::optional<double> rate;  // R(k)
  double amplitude = 0.0;      // a(k), 0 when the rate is absent
  double symbol = 0.0;         // D^(k)
};

struct AsymptoticData {
  std::vector<ModeAsymptotics> modes;  // lattice order
  RealField ptilde;
  double kappa = 0.0;
  double epsilon0_effective = 0.0;

  std::optional<std::size_t> find(long n) const;
};

AsymptoticData compute_asymptotics(const ValidatedModel& model, int workers = 1);
AsymptoticData compute_asymptotics(const ValidatedModel& model, const TimeQuadrature& quadrature,
                                   int workers = 1);

/// tau^(k) = a(k) sum_y exp(-i 2 pi k y) int_0^inf g_{s,y} ds.
RealField tau_profile(const InteractionModel& model, const AsymptoticData& data,
                      const InitialCondition& init, const TimeQuadrature& quadrature);
RealField tau_profile(const InteractionModel& model, const AsymptoticData& data,
                      const InitialCondition& init);

/// (exp(-t D) tau)_x, applied spectrally.
RealField lattice_diffusion(const CyclicLattice& lattice, const RealField& ptilde,
                            const RealField& tau, double t);

/// Real-space stencil (D tau)_x = sum_y ptilde_y (2 tau_x - tau_{x+y} - tau_{x-y}).
RealField apply_lattice_operator(const CyclicLattice& lattice, const RealField& ptilde,
                                 const RealField& tau);

// ---------------------------------------------------------------------------

enum class SmearingKind { gaussian, bandlimited_bump };

/// Averaging kernel phi on the real line, normalized to int phi = 1, with
/// transform phi^(p) = int phi(x) exp(-i 2 pi p x) dx.
class SmearingKernel {
 public:
  static SmearingKernel gaussian(double sigma);
  /// phi^(p) = exp(1 - 1/(1 - (2 width p)^2)) for |p| < 1/(2 width), else 0.  width >= 1.
  static SmearingKernel bandlimited_bump(double width = 1.0);

  SmearingKind kind() const { return kind_; }
  double parameter() const { return parameter_; }
  double operator()(double x) const;
  double transform(double p) const;
  /// |x| beyond which |phi| < 1e-14.
  double support_radius() const;

 private:
  SmearingKernel(SmearingKind kind, double parameter);
  SmearingKind kind_;
  double parameter_;
  std::shared_ptr<std::map<double, double>> cache_;
};

/// Uniform grid of M points xi_j = j L / M, j in Lambda_M, on the circle L*T.
std::vector<double> xi_grid(int L, int M);

/// T_obs(xi) = sum_{y in Z} phi(xi - y) T_{y mod L}, by direct truncated summation.
RealField smear(const CyclicLattice& lattice, const RealField& profile, const SmearingKernel& phi,
                const std::vector<double>& xi);

/// Same quantity through the Poisson summation formula,
/// (1/L) sum_{n in Z} phi^(n/L) T^(n/L) exp(i 2 pi n xi / L).
RealField smear_spectral(const CyclicLattice& lattice, const RealField& profile,
                         const SmearingKernel& phi, const std::vector<double>& xi);

/// Solution at time t of d_t T = kappa d_xi^2 T on L*T from samples on the
/// uniform grid xi_grid(L, M); Fourier series truncated at |n| <= M/2.
RealField heat_predict(int L, const RealField& observed, double kappa, double t);

}  // namespace vflip
