#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vflip/lattice.hpp"

namespace vflip {

enum class InteractionKind { nearest_neighbor, next_nearest_degenerate, custom };

std::string to_string(InteractionKind kind);
InteractionKind interaction_kind_from_string(const std::string& name);

/// Harmonic coupling Phi of finite range together with the flip rate gamma and
/// the lattice size L.  Phi is stored as a symmetric table Phi(x), |x| < r/2.
class InteractionModel {
 public:
  /// Phi(0) = omega0^2 + 2, Phi(+-1) = -1:  omega(k)^2 = omega0^2 + 4 sin^2(pi k).
  static InteractionModel nearest_neighbor(double omega0, double gamma, int L);
  /// Phi(0) = omega0^2 + 2, Phi(+-2) = -1:  omega(k)^2 = omega0^2 + 4 sin^2(2 pi k).
  static InteractionModel next_nearest_degenerate(double omega0, double gamma, int L);
  /// `table` lists Phi(x) for x = -(r-1)/2 .. (r-1)/2 with r = table.size() odd.
  static InteractionModel custom(std::vector<double> table, double gamma, int L);

  InteractionKind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  int size() const { return lattice_.size(); }
  const CyclicLattice& lattice() const { return lattice_; }
  /// Nominal pinning frequency; for custom models the minimum of omega over the circle.
  double omega0() const { return omega0_; }
  /// delta_0 = omega0^2 / gamma, the slowest decay rate of the local semigroup.
  double delta0() const { return omega0_ * omega0_ / gamma_; }
  /// Interaction range r (odd); Phi(x) = 0 for |x| >= r/2.
  int range() const { return static_cast<int>(table_.size()); }
  double phi(long x) const;
  /// Phi(x) for x = -(r-1)/2 .. (r-1)/2.
  const std::vector<double>& table() const { return table_; }

  /// Phi^(k) on the continuum circle.  The imaginary residue must stay below 1e-12.
  double phi_hat(double k) const;
  /// Maximum of Phi^ over the circle (dense sampling plus the dual grid).
  double max_phi_hat() const;
  double min_phi_hat() const;

  /// omega(k) = sqrt(Phi^(k)); throws PinningViolation when Phi^(k) <= 0.
  double dispersion(double k) const;
  /// omega(n / L) for a dual point.
  double dispersion_at(long n) const { return dispersion(lattice_.wave_number(n)); }
  /// Largest omega on the dual grid.
  double omega_max() const;

  InteractionModel with_size(int L) const;
  InteractionModel with_gamma(double gamma) const;

 private:
  InteractionModel(InteractionKind kind, std::vector<double> table, double gamma, int L,
                   double nominal_omega0);

  InteractionKind kind_;
  std::vector<double> table_;
  double gamma_;
  CyclicLattice lattice_;
  double omega0_;
  double nominal_omega0_;
};

struct QuadratureSpec {
  int initial_panels = 2048;
  double rel_tol = 1e-9;
  double abs_tol = 1e-15;
  int max_panels = 1 << 18;
};

struct ValidationReport {
  bool pinning_ok = false;
  double min_phi_hat = 0.0;
  bool noise_dominates_ok = false;
  /// gamma^2 - 4 max_k Phi^(k)
  double noise_margin = 0.0;
  double epsilon = 0.02;
  double threshold = 1e-6;
  /// (k0, I(k0)) on the sampled grid over [epsilon, 1/2].
  std::vector<std::pair<double, double>> nondegeneracy_profile;
  double nondegeneracy_min = 0.0;
  bool nondegeneracy_ok = false;

  bool all_ok() const { return pinning_ok && noise_dominates_ok && nondegeneracy_ok; }
};

struct ValidationOptions {
  double epsilon = 0.02;
  double threshold = 1e-6;
  int samples = 97;
  QuadratureSpec quadrature{};
  int workers = 1;
};

/// Checks pinning, noise dominance and the nondegeneracy integral on a k0 grid.
/// Failures are reported, never thrown.
ValidationReport validate(const InteractionModel& model, const ValidationOptions& options = {});

/// I(k0) = int_0^inf dt int_T dk (A2_t(k + k0/2) - A2_t(k - k0/2))^2, with the time
/// integral in closed form and composite Simpson in k.
double nondegeneracy_integral(const InteractionModel& model, double k0,
                              const QuadratureSpec& quadrature = {});

/// A model that passed all assumption checks.
class ValidatedModel {
 public:
  /// Throws ValidationRequired unless report.all_ok().
  static ValidatedModel require(InteractionModel model, const ValidationReport& report);
  /// Runs validate() and then require().
  static ValidatedModel check(InteractionModel model, const ValidationOptions& options = {});

  const InteractionModel& model() const { return model_; }
  const ValidationReport& report() const { return report_; }
  operator const InteractionModel&() const { return model_; }

 private:
  ValidatedModel(InteractionModel model, ValidationReport report)
      : model_(std::move(model)), report_(std::move(report)) {}
  InteractionModel model_;
  ValidationReport report_;
};

}  // namespace vflip
