#pragma once

// Closed form of the damped mode semigroup exp(-t M(k)),
//
//   M(k) = [ 0   omega(k)^2 ]
//          [ -1  gamma      ],
//
// in the overdamped regime omega(k) < gamma/2, where both eigenvalues
// mu_+- = gamma/2 +- u,  u = sqrt((gamma/2)^2 - omega^2), are real.

#include "vflip/lattice.hpp"
#include "vflip/model.hpp"
#include "vflip/phase_point.hpp"

namespace vflip {

struct ModeSpectrum {
  double k = 0.0;
  double omega_sq = 0.0;
  double gamma = 0.0;
  double u = 0.0;
  double mu_plus = 0.0;
  double mu_minus = 0.0;
};

/// Throws DegenerateMode unless omega < gamma/2 by more than 1e-9.
ModeSpectrum mode_spectrum(double omega, double gamma, double k = 0.0);
ModeSpectrum mode_spectrum(const InteractionModel& model, double k);

struct Matrix2 {
  double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;

  Matrix2 transpose() const { return {a11, a21, a12, a22}; }
  friend Matrix2 operator*(const Matrix2& x, const Matrix2& y) {
    return {x.a11 * y.a11 + x.a12 * y.a21, x.a11 * y.a12 + x.a12 * y.a22,
            x.a21 * y.a11 + x.a22 * y.a21, x.a21 * y.a12 + x.a22 * y.a22};
  }
};

/// Second column of exp(-t M(k)): (A1_t(k), A2_t(k)).
struct AHat {
  double a1 = 0.0;
  double a2 = 1.0;
};

AHat a_hat(const ModeSpectrum& mode, double t);
AHat a_hat(const InteractionModel& model, double t, double k);

Matrix2 propagator_matrix(const ModeSpectrum& mode, double t);
Matrix2 propagator_matrix(const InteractionModel& model, double t, double k);

/// int_0^inf ds exp(-lambda s) A2_s(k1) A2_s(k2), valid for Re lambda > -(mu_-(k1) + mu_-(k2)).
Complex a2_product_laplace(const ModeSpectrum& m1, const ModeSpectrum& m2, Complex lambda);
/// d/dlambda of a2_product_laplace.
Complex a2_product_laplace_derivative(const ModeSpectrum& m1, const ModeSpectrum& m2,
                                      Complex lambda);

/// Mode spectra for every dual point, in lattice order.
std::vector<ModeSpectrum> dual_spectra(const InteractionModel& model);

struct AField {
  RealField a1;
  RealField a2;
};

/// Real-space fields A^i_{t,x} = (exp(-t M))^{i2}_{x0}.
AField a_field(const InteractionModel& model, double t);
AField a_field(const CyclicLattice& lattice, const std::vector<ModeSpectrum>& spectra, double t);

/// exp(-t M^T) X, applied mode by mode.
PhasePoint evolve_replica(const InteractionModel& model, double t, const PhasePoint& X);

}  // namespace vflip
