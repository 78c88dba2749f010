#include "vflip/asymptotics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "vflip/errors.hpp"
#include "vflip/parallel.hpp"

namespace vflip {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::optional<double> decay_rate(const ValidatedModel& validated, long n) {
  const auto& model = validated.model();
  if (wrap(n, model.size()) == 0) return 0.0;
  auto excess = [&](double R) { return 1.0 - laplace_fourier_p(model, {-R, 0.0}, n).real(); };
  double lo = 0.0, hi = 0.9 * model.delta0();
  double f_lo = excess(lo);
  const double f_hi = excess(hi);
  if (f_lo < 0.0) throw BracketFailure("1 - p^(0, k) is negative for k != 0");
  if (f_hi > 0.0) return std::nullopt;
  // f is strictly decreasing in R.
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = excess(mid);
    if (f_mid == 0.0) return mid;
    if (f_mid > 0.0) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double amplitude(const ValidatedModel& validated, long n, double rate) {
  const double slope = laplace_fourier_p_derivative(validated.model(), {-rate, 0.0}, n).real();
  return 1.0 / -slope;
}

double lattice_symbol(const CyclicLattice& lattice, const RealField& ptilde, long n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < ptilde.size(); ++i) {
    const double s = std::sin(kPi * static_cast<double>(n * lattice.label(i)) / lattice.size());
    acc += ptilde[i] * s * s;
  }
  return 4.0 * acc;
}

double kappa(const CyclicLattice& lattice, const RealField& ptilde) {
  double acc = 0.0;
  for (std::size_t i = 0; i < ptilde.size(); ++i) {
    const auto y = static_cast<double>(lattice.label(i));
    acc += y * y * ptilde[i];
  }
  return acc;
}

double kappa(const InteractionModel& model) { return kappa(model.lattice(), ptilde(model)); }

double kappa_infinite_nearest_neighbor(double omega0, double gamma) {
  return 1.0 / (gamma * (2.0 + omega0 * omega0 + omega0 * std::sqrt(omega0 * omega0 + 4.0)));
}

std::optional<std::size_t> AsymptoticData::find(long n) const {
  for (std::size_t i = 0; i < modes.size(); ++i)
    if (modes[i].n == n) return i;
  return std::nullopt;
}

AsymptoticData compute_asymptotics(const ValidatedModel& model, const TimeQuadrature& quadrature,
                                   int workers) {
  const auto& lat = model.model().lattice();
  AsymptoticData data;
  data.ptilde = ptilde(model.model(), quadrature);
  data.kappa = kappa(lat, data.ptilde);
  data.modes.resize(static_cast<std::size_t>(lat.size()));
  // R and a are even in k; solve n >= 0 and mirror.
  parallel_for(data.modes.size(), workers, [&](std::size_t i) {
    const long n = lat.label(i);
    auto& m = data.modes[i];
    m.n = n;
    m.k = lat.wave_number(n);
    m.symbol = lattice_symbol(lat, data.ptilde, n);
    if (n < 0) return;
    m.rate = decay_rate(model, n);
    if (m.rate) m.amplitude = amplitude(model, n, *m.rate);
  });
  for (std::size_t i = 0; i < data.modes.size(); ++i) {
    if (data.modes[i].n >= 0) continue;
    const auto& src = data.modes[lat.mirror(i)];
    data.modes[i].rate = src.rate;
    data.modes[i].amplitude = src.amplitude;
  }
  for (const auto& m : data.modes)
    if (m.rate) data.epsilon0_effective = std::max(data.epsilon0_effective, std::abs(m.k));
  return data;
}

AsymptoticData compute_asymptotics(const ValidatedModel& model, int workers) {
  return compute_asymptotics(model, default_time_quadrature(model.model()), workers);
}

RealField tau_profile(const InteractionModel& model, const AsymptoticData& data,
                      const InitialCondition& init, const TimeQuadrature& quadrature) {
  const auto& lat = model.lattice();
  const auto total = integrated_source(model, init, quadrature);
  auto spectrum = lat.dft(std::span<const double>(total));
  for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= data.modes[i].amplitude;
  return lat.idft_real(std::span<const Complex>(spectrum));
}

RealField tau_profile(const InteractionModel& model, const AsymptoticData& data,
                      const InitialCondition& init) {
  return tau_profile(model, data, init, default_time_quadrature(model));
}

RealField lattice_diffusion(const CyclicLattice& lattice, const RealField& ptilde,
                            const RealField& tau, double t) {
  auto spectrum = lattice.dft(std::span<const double>(tau));
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const long n = lattice.label(i);
    if (n == 0) continue;  // D^(0) = 0 exactly
    spectrum[i] *= std::exp(-t * lattice_symbol(lattice, ptilde, n));
  }
  return lattice.idft_real(std::span<const Complex>(spectrum));
}

RealField apply_lattice_operator(const CyclicLattice& lattice, const RealField& ptilde,
                                 const RealField& tau) {
  RealField out(tau.size(), 0.0);
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const long x = lattice.label(i);
    for (std::size_t j = 0; j < ptilde.size(); ++j) {
      const long y = lattice.label(j);
      out[i] += ptilde[j] * (2.0 * tau[i] - tau[lattice.index(x + y)] - tau[lattice.index(x - y)]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

SmearingKernel::SmearingKernel(SmearingKind kind, double parameter)
    : kind_(kind), parameter_(parameter), cache_(std::make_shared<std::map<double, double>>()) {}

SmearingKernel SmearingKernel::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian smearing needs sigma > 0");
  return {SmearingKind::gaussian, sigma};
}

SmearingKernel SmearingKernel::bandlimited_bump(double width) {
  if (!(width >= 1.0)) throw std::invalid_argument("bandlimited bump needs width >= 1");
  return {SmearingKind::bandlimited_bump, width};
}

double SmearingKernel::transform(double p) const {
  if (kind_ == SmearingKind::gaussian)
    return std::exp(-2.0 * kPi * kPi * parameter_ * parameter_ * p * p);
  const double s = 2.0 * parameter_ * p;
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double SmearingKernel::operator()(double x) const {
  if (kind_ == SmearingKind::gaussian) {
    const double z = x / parameter_;
    return std::exp(-0.5 * z * z) / (parameter_ * std::sqrt(2.0 * kPi));
  }
  const double key = std::abs(x);
  if (auto it = cache_->find(key); it != cache_->end()) return it->second;
  // phi(x) = 2 int_0^P phi^(p) cos(2 pi p x) dp, P = 1/(2 width); panels track the oscillation.
  using Rule = boost::math::quadrature::gauss<double, 8>;
  const double P = 0.5 / parameter_;
  const int panels = std::max(64, static_cast<int>(std::ceil(4.0 * P * key)));
  const double h = P / panels;
  double acc = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double mid = (i + 0.5) * h;
    for (std::size_t a = 0; a < Rule::abscissa().size(); ++a) {
      const double off = 0.5 * h * Rule::abscissa()[a];
      const double w = 0.5 * h * Rule::weights()[a];
      acc += w * transform(mid - off) * std::cos(2.0 * kPi * (mid - off) * key);
      acc += w * transform(mid + off) * std::cos(2.0 * kPi * (mid + off) * key);
    }
  }
  const double value = 2.0 * acc;
  cache_->emplace(key, value);
  return value;
}

double SmearingKernel::support_radius() const {
  constexpr double floor = 1e-14;
  if (kind_ == SmearingKind::gaussian) {
    const double peak = 1.0 / (parameter_ * std::sqrt(2.0 * kPi));
    if (peak <= floor) return 0.0;
    return parameter_ * std::sqrt(2.0 * std::log(peak / floor));
  }
  // Scan outward in unit steps; accept the radius after a long run below the floor.
  double last_above = 0.0;
  const double step = 0.25 * parameter_;
  for (double x = 0.0; x < 5000.0 * parameter_; x += step) {
    if (std::abs((*this)(x)) >= floor) last_above = x;
    if (x - last_above > 64.0 * parameter_) break;
  }
  return last_above + step;
}

std::vector<double> xi_grid(int L, int M) {
  const CyclicLattice grid(M);
  std::vector<double> xi;
  xi.reserve(static_cast<std::size_t>(M));
  for (long j : grid.sites()) xi.push_back(static_cast<double>(j) * L / M);
  return xi;
}

RealField smear(const CyclicLattice& lattice, const RealField& profile, const SmearingKernel& phi,
                const std::vector<double>& xi) {
  const double radius = phi.support_radius();
  RealField out(xi.size(), 0.0);
  for (std::size_t j = 0; j < xi.size(); ++j) {
    const auto lo = static_cast<long>(std::floor(xi[j] - radius));
    const auto hi = static_cast<long>(std::ceil(xi[j] + radius));
    double acc = 0.0;
    for (long y = lo; y <= hi; ++y) acc += phi(xi[j] - static_cast<double>(y)) * profile[lattice.index(y)];
    out[j] = acc;
  }
  return out;
}

RealField smear_spectral(const CyclicLattice& lattice, const RealField& profile,
                         const SmearingKernel& phi, const std::vector<double>& xi) {
  const int L = lattice.size();
  // phi^(n/L) vanishes or is below 1e-300 beyond this many periods.
  long n_max = 0;
  while (phi.transform(static_cast<double>(n_max + 1) / L) > 1e-300 && n_max < 1000L * L) ++n_max;
  RealField out(xi.size(), 0.0);
  for (long n = -n_max; n <= n_max; ++n) {
    const double weight = phi.transform(static_cast<double>(n) / L);
    if (weight == 0.0) continue;
    Complex th{};
    for (std::size_t i = 0; i < profile.size(); ++i) th += profile[i] * lattice.phase(n, lattice.label(i));
    for (std::size_t j = 0; j < xi.size(); ++j) {
      const double angle = 2.0 * kPi * static_cast<double>(n) * xi[j] / L;
      out[j] += weight * (th * Complex(std::cos(angle), std::sin(angle))).real() / L;
    }
  }
  return out;
}

RealField heat_predict(int L, const RealField& observed, double kappa, double t) {
  const CyclicLattice grid(static_cast<int>(observed.size()));
  auto coeffs = grid.dft(std::span<const double>(observed));
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const double wave = 2.0 * kPi * static_cast<double>(grid.label(i)) / L;
    coeffs[i] *= std::exp(-t * kappa * wave * wave);
  }
  // The Nyquist mode of an even grid is kept as cos only, so the result stays real.
  return grid.idft_real(std::span<const Complex>(coeffs));
}

}  // namespace vflip
