#include "vflip/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "vflip/errors.hpp"
#include "vflip/parallel.hpp"
#include "vflip/phase_point.hpp"
#include "vflip/propagator.hpp"

namespace vflip {

namespace {

constexpr int kDenseSamples = 4096;

}  // namespace

std::string to_string(InteractionKind kind) {
  switch (kind) {
    case InteractionKind::nearest_neighbor:
      return "nearest_neighbor";
    case InteractionKind::next_nearest_degenerate:
      return "next_nearest_degenerate";
    case InteractionKind::custom:
      return "custom";
  }
  return "unknown";
}

InteractionKind interaction_kind_from_string(const std::string& name) {
  if (name == "nearest_neighbor") return InteractionKind::nearest_neighbor;
  if (name == "next_nearest_degenerate") return InteractionKind::next_nearest_degenerate;
  if (name == "custom") return InteractionKind::custom;
  throw ConfigError("unknown interaction kind '" + name + "'");
}

InteractionModel::InteractionModel(InteractionKind kind, std::vector<double> table, double gamma,
                                   int L, double nominal_omega0)
    : kind_(kind),
      table_(std::move(table)),
      gamma_(gamma),
      lattice_(L),
      omega0_(nominal_omega0),
      nominal_omega0_(nominal_omega0) {
  if (!(gamma > 0.0)) throw AssumptionError("flip rate gamma must be positive");
  if (table_.size() % 2 == 0) throw AssumptionError("interaction table length must be odd");
  const std::size_t r = table_.size();
  for (std::size_t i = 0; i < r; ++i) {
    if (table_[i] != table_[r - 1 - i])
      throw AssumptionError("interaction is not symmetric: Phi(-x) != Phi(x)");
  }
  if (kind_ == InteractionKind::custom) {
    const double m = min_phi_hat();
    omega0_ = m > 0.0 ? std::sqrt(m) : 0.0;
  }
}

InteractionModel InteractionModel::nearest_neighbor(double omega0, double gamma, int L) {
  if (!(omega0 > 0.0)) throw PinningViolation("omega0 must be positive");
  return {InteractionKind::nearest_neighbor, {-1.0, omega0 * omega0 + 2.0, -1.0}, gamma, L, omega0};
}

InteractionModel InteractionModel::next_nearest_degenerate(double omega0, double gamma, int L) {
  if (!(omega0 > 0.0)) throw PinningViolation("omega0 must be positive");
  return {InteractionKind::next_nearest_degenerate,
          {-1.0, 0.0, omega0 * omega0 + 2.0, 0.0, -1.0},
          gamma,
          L,
          omega0};
}

InteractionModel InteractionModel::custom(std::vector<double> table, double gamma, int L) {
  return {InteractionKind::custom, std::move(table), gamma, L, 0.0};
}

double InteractionModel::phi(long x) const {
  const long half = (range() - 1) / 2;
  if (x < -half || x > half) return 0.0;
  return table_[static_cast<std::size_t>(x + half)];
}

double InteractionModel::phi_hat(double k) const {
  const long half = (range() - 1) / 2;
  double re = 0.0, im = 0.0;
  for (long x = -half; x <= half; ++x) {
    const double angle = -2.0 * std::numbers::pi * k * static_cast<double>(x);
    re += phi(x) * std::cos(angle);
    im += phi(x) * std::sin(angle);
  }
  if (std::abs(im) > 1e-12 * std::max(1.0, std::abs(re)))
    throw AssumptionError("Phi^ has a non-negligible imaginary part");
  return re;
}

double InteractionModel::max_phi_hat() const {
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kDenseSamples; ++i) m = std::max(m, phi_hat(0.5 * i / kDenseSamples));
  for (long n : lattice_.dual()) m = std::max(m, phi_hat(lattice_.wave_number(n)));
  return m;
}

double InteractionModel::min_phi_hat() const {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kDenseSamples; ++i) m = std::min(m, phi_hat(0.5 * i / kDenseSamples));
  for (long n : lattice_.dual()) m = std::min(m, phi_hat(lattice_.wave_number(n)));
  return m;
}

double InteractionModel::dispersion(double k) const {
  const double v = phi_hat(k);
  if (!(v > 0.0)) throw PinningViolation("Phi^(" + std::to_string(k) + ") is not positive");
  return std::sqrt(v);
}

double InteractionModel::omega_max() const {
  double m = 0.0;
  for (long n : lattice_.dual()) m = std::max(m, dispersion_at(n));
  return m;
}

InteractionModel InteractionModel::with_size(int L) const {
  return {kind_, table_, gamma_, L, nominal_omega0_};
}

InteractionModel InteractionModel::with_gamma(double gamma) const {
  return {kind_, table_, gamma, lattice_.size(), nominal_omega0_};
}

// ---------------------------------------------------------------------------

double nondegeneracy_integral(const InteractionModel& model, double k0,
                              const QuadratureSpec& quadrature) {
  if (k0 == 0.0) return 0.0;
  const double gamma = model.gamma();
  // Time-integrated squared difference for one k, closed form in t.
  auto integrand = [&](double k) {
    const ModeSpectrum a = mode_spectrum(model, k + 0.5 * k0);
    const ModeSpectrum b = mode_spectrum(model, k - 0.5 * k0);
    const double cross = a2_product_laplace(a, b, 0.0).real();
    // int (A2(k))^2 dt = 1/(2 gamma) for every k.
    return std::max(0.0, 1.0 / gamma - 2.0 * cross);
  };
  // The integrand is 1-periodic in k; integrate over [-1/2, 1/2].
  auto simpson = [&](int panels) {
    const double h = 1.0 / panels;
    double acc = integrand(-0.5) + integrand(0.5);
    for (int i = 1; i < panels; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * integrand(-0.5 + i * h);
    return acc * h / 3.0;
  };
  int panels = quadrature.initial_panels;
  double previous = simpson(panels);
  while (panels < quadrature.max_panels) {
    panels *= 2;
    const double current = simpson(panels);
    const double change = std::abs(current - previous);
    if (change < quadrature.rel_tol * std::abs(current) || change < quadrature.abs_tol)
      return current;
    previous = current;
  }
  throw QuadratureFailure("nondegeneracy integral did not converge at k0=" + std::to_string(k0));
}

ValidationReport validate(const InteractionModel& model, const ValidationOptions& options) {
  ValidationReport report;
  report.epsilon = options.epsilon;
  report.threshold = options.threshold;
  report.min_phi_hat = model.min_phi_hat();
  report.pinning_ok = report.min_phi_hat > 0.0;
  report.noise_margin = model.gamma() * model.gamma() - 4.0 * model.max_phi_hat();
  report.noise_dominates_ok = report.pinning_ok && report.noise_margin > 0.0;
  if (!report.noise_dominates_ok) return report;

  const int n = std::max(options.samples, 2);
  report.nondegeneracy_profile.resize(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), options.workers, [&](std::size_t i) {
    const double k0 = options.epsilon + (0.5 - options.epsilon) * static_cast<double>(i) / (n - 1);
    report.nondegeneracy_profile[i] = {k0, nondegeneracy_integral(model, k0, options.quadrature)};
  });
  report.nondegeneracy_min = std::numeric_limits<double>::infinity();
  for (const auto& [k0, value] : report.nondegeneracy_profile)
    report.nondegeneracy_min = std::min(report.nondegeneracy_min, value);
  report.nondegeneracy_ok = report.nondegeneracy_min >= options.threshold;
  return report;
}

ValidatedModel ValidatedModel::require(InteractionModel model, const ValidationReport& report) {
  if (!report.pinning_ok) throw ValidationRequired("model is not pinned");
  if (!report.noise_dominates_ok) throw ValidationRequired("noise does not dominate");
  if (!report.nondegeneracy_ok) throw ValidationRequired("harmonic forces are degenerate");
  return {std::move(model), report};
}

ValidatedModel ValidatedModel::check(InteractionModel model, const ValidationOptions& options) {
  auto report = validate(model, options);
  return require(std::move(model), report);
}

// ---------------------------------------------------------------------------

RealField periodic_coupling(const InteractionModel& model) {
  const auto& lat = model.lattice();
  RealField row(static_cast<std::size_t>(lat.size()), 0.0);
  const long half = (model.range() - 1) / 2;
  for (long x = -half; x <= half; ++x) row[lat.index(x)] += model.phi(x);
  return row;
}

double energy(const InteractionModel& model, const PhasePoint& X) {
  const auto& lat = model.lattice();
  const auto row = periodic_coupling(model);
  const auto L = static_cast<std::size_t>(lat.size());
  double kinetic = 0.0, potential = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    kinetic += X.p[i] * X.p[i];
    double force = 0.0;
    for (std::size_t j = 0; j < L; ++j)
      force += row[lat.index(lat.label(i) - lat.label(j))] * X.q[j];
    potential += X.q[i] * force;
  }
  return 0.5 * (kinetic + potential);
}

}  // namespace vflip
