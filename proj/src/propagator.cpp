#include "vflip/propagator.hpp"

#include <cmath>
#include <string>

#include "vflip/errors.hpp"

namespace vflip {

namespace {

// (exp(-2 t u) - 1) / (2 u), finite as u -> 0.
double expm1_ratio(double t, double u) {
  if (u * t < 1e-12) return -t;
  return std::expm1(-2.0 * t * u) / (2.0 * u);
}

}  // namespace

ModeSpectrum mode_spectrum(double omega, double gamma, double k) {
  const double half = 0.5 * gamma;
  if (!(omega < half) || std::abs(omega - half) < 1e-9) {
    throw DegenerateMode("mode k=" + std::to_string(k) + " is not overdamped (omega=" +
                         std::to_string(omega) + ", gamma/2=" + std::to_string(half) + ")");
  }
  ModeSpectrum m;
  m.k = k;
  m.omega_sq = omega * omega;
  m.gamma = gamma;
  m.u = std::sqrt((half - omega) * (half + omega));
  m.mu_plus = half + m.u;
  m.mu_minus = m.omega_sq / m.mu_plus;
  return m;
}

ModeSpectrum mode_spectrum(const InteractionModel& model, double k) {
  return mode_spectrum(model.dispersion(k), model.gamma(), k);
}

// exp(-t M) = exp(-t mu_-) [ 1 - mu_- E    omega^2 E  ]
//                          [ -E            1 + mu_+ E ],   E = expm1(-2tu)/(2u).
Matrix2 propagator_matrix(const ModeSpectrum& mode, double t) {
  const double slow = std::exp(-t * mode.mu_minus);
  const double e = expm1_ratio(t, mode.u);
  return {slow * (1.0 - mode.mu_minus * e), slow * mode.omega_sq * e, -slow * e,
          slow * (1.0 + mode.mu_plus * e)};
}

Matrix2 propagator_matrix(const InteractionModel& model, double t, double k) {
  return propagator_matrix(mode_spectrum(model, k), t);
}

AHat a_hat(const ModeSpectrum& mode, double t) {
  const double slow = std::exp(-t * mode.mu_minus);
  const double e = expm1_ratio(t, mode.u);
  return {slow * mode.omega_sq * e, slow * (1.0 + mode.mu_plus * e)};
}

AHat a_hat(const InteractionModel& model, double t, double k) {
  return a_hat(mode_spectrum(model, k), t);
}

Complex a2_product_laplace(const ModeSpectrum& m1, const ModeSpectrum& m2, Complex lambda) {
  const double mu1[2] = {m1.mu_plus, m1.mu_minus};
  const double mu2[2] = {m2.mu_plus, m2.mu_minus};
  const double sign[2] = {1.0, -1.0};
  Complex acc{};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      acc += sign[a] * sign[b] * mu1[a] * mu2[b] / (lambda + mu1[a] + mu2[b]);
  return acc / (4.0 * m1.u * m2.u);
}

Complex a2_product_laplace_derivative(const ModeSpectrum& m1, const ModeSpectrum& m2,
                                      Complex lambda) {
  const double mu1[2] = {m1.mu_plus, m1.mu_minus};
  const double mu2[2] = {m2.mu_plus, m2.mu_minus};
  const double sign[2] = {1.0, -1.0};
  Complex acc{};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const Complex d = lambda + mu1[a] + mu2[b];
      acc -= sign[a] * sign[b] * mu1[a] * mu2[b] / (d * d);
    }
  return acc / (4.0 * m1.u * m2.u);
}

std::vector<ModeSpectrum> dual_spectra(const InteractionModel& model) {
  const auto& lat = model.lattice();
  std::vector<ModeSpectrum> out;
  out.reserve(static_cast<std::size_t>(lat.size()));
  for (long n : lat.dual()) out.push_back(mode_spectrum(model, lat.wave_number(n)));
  return out;
}

AField a_field(const CyclicLattice& lattice, const std::vector<ModeSpectrum>& spectra, double t) {
  RealField h1(spectra.size()), h2(spectra.size());
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    const AHat a = a_hat(spectra[i], t);
    h1[i] = a.a1;
    h2[i] = a.a2;
  }
  // Both transforms are real and even in k, so the fields are real and even in x;
  // mirrored entries are averaged so the evenness holds exactly.
  AField out{lattice.idft_real(std::span<const double>(h1)),
             lattice.idft_real(std::span<const double>(h2))};
  for (auto* f : {&out.a1, &out.a2}) {
    auto& v = *f;
    for (std::size_t x = 0; x < v.size(); ++x) {
      const std::size_t y = lattice.mirror(x);
      if (y > x) v[x] = v[y] = 0.5 * (v[x] + v[y]);
    }
  }
  return out;
}

AField a_field(const InteractionModel& model, double t) {
  return a_field(model.lattice(), dual_spectra(model), t);
}

PhasePoint evolve_replica(const InteractionModel& model, double t, const PhasePoint& X) {
  const auto& lat = model.lattice();
  const auto spectra = dual_spectra(model);
  const auto qh = lat.dft(std::span<const double>(X.q));
  const auto ph = lat.dft(std::span<const double>(X.p));
  ComplexField q_out(qh.size()), p_out(ph.size());
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    const Matrix2 m = propagator_matrix(spectra[i], t).transpose();
    q_out[i] = m.a11 * qh[i] + m.a12 * ph[i];
    p_out[i] = m.a21 * qh[i] + m.a22 * ph[i];
  }
  return {lat.idft_real(std::span<const Complex>(q_out)),
          lat.idft_real(std::span<const Complex>(p_out))};
}

}  // namespace vflip
