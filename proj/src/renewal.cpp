#include "vflip/renewal.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numeric>

#include "vflip/asymptotics.hpp"
#include "vflip/errors.hpp"
#include "vflip/parallel.hpp"

namespace vflip {

std::string to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::renewal:
      return "renewal";
    case Provenance::montecarlo:
      return "montecarlo";
    case Provenance::diffusion_lattice:
      return "diffusion_lattice";
    case Provenance::diffusion_continuum:
      return "diffusion_continuum";
  }
  return "unknown";
}

std::size_t TemperatureProfile::row_of(double t, double tol) const {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) <= tol * std::max(1.0, std::abs(t))) return i;
  throw std::out_of_range("profile has no row at t=" + std::to_string(t));
}

TimeGrid TimeGrid::covering(double t_max, double h) {
  if (!(h > 0.0) || t_max < 0.0) throw std::invalid_argument("TimeGrid: invalid step or horizon");
  return {h, static_cast<std::size_t>(std::ceil(t_max / h - 1e-9))};
}

double max_step(const InteractionModel& model) {
  double mu_plus_max = 0.0;
  for (const auto& m : dual_spectra(model)) mu_plus_max = std::max(mu_plus_max, m.mu_plus);
  return std::min({0.05 / model.gamma(), 0.05 / model.omega_max(), 0.25 / mu_plus_max});
}

// ---------------------------------------------------------------------------

namespace {

using Rule = boost::math::quadrature::gauss<double, 4>;

// Gauss-Legendre nodes on [0, 1] with weights summing to 1.
struct UnitRule {
  std::array<double, 4> node{}, weight{};
  UnitRule() {
    std::size_t m = 0;
    for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
      for (double sign : {-1.0, 1.0}) {
        node[m] = 0.5 + 0.5 * sign * Rule::abscissa()[i];
        weight[m] = 0.5 * Rule::weights()[i];
        ++m;
      }
    }
  }
};

const UnitRule& unit_rule() {
  static const UnitRule rule;
  return rule;
}

}  // namespace

ProductWeights product_weights(const std::function<double(double)>& kernel, double h,
                               std::size_t panels) {
  const auto& rule = unit_rule();
  ProductWeights w;
  w.left.resize(panels);
  w.right.resize(panels);
  for (std::size_t i = 0; i < panels; ++i) {
    double l = 0.0, r = 0.0;
    for (std::size_t m = 0; m < 4; ++m) {
      const double k = kernel(h * (static_cast<double>(i) + rule.node[m]));
      l += rule.weight[m] * k * (1.0 - rule.node[m]);
      r += rule.weight[m] * k * rule.node[m];
    }
    w.left[i] = h * l;
    w.right[i] = h * r;
  }
  return w;
}

KernelTable::KernelTable(const InteractionModel& model, const TimeGrid& grid,
                         const SolverOptions& options)
    : model_(model), grid_(grid), scheme_(options.scheme) {
  if (grid.h > max_step(model) * (1.0 + 1e-12))
    throw StepTooLarge("time step " + std::to_string(grid.h) + " exceeds h_max " +
                       std::to_string(max_step(model)));
  const MemoryKernel kernel(model);
  const auto& lat = model.lattice();
  const auto L = static_cast<std::size_t>(lat.size());
  const std::size_t samples = grid.steps + 1;
  const std::size_t panels = grid.steps;
  values_.assign(L, std::vector<double>(samples, 0.0));
  weights_.assign(L, ProductWeights{});
  for (std::size_t a = 0; a < L; ++a) {
    if (lat.label(a) < 0) continue;
    weights_[a].left.assign(panels, 0.0);
    weights_[a].right.assign(panels, 0.0);
  }

  // Each sample time and each panel is independent; fill in parallel.
  const auto& rule = unit_rule();
  std::vector<double> rho(samples);
  parallel_for(samples, options.workers, [&](std::size_t j) {
    const auto spectrum = kernel.spectrum_at(grid.time(j));
    for (std::size_t a = 0; a < L; ++a)
      if (lat.label(a) >= 0) values_[a][j] = spectrum[a];
    rho[j] = spectrum[lat.index(0)];
    if (j == panels) return;
    for (std::size_t m = 0; m < 4; ++m) {
      const auto inner = kernel.spectrum_at(grid.h * (static_cast<double>(j) + rule.node[m]));
      const double wl = grid.h * rule.weight[m] * (1.0 - rule.node[m]);
      const double wr = grid.h * rule.weight[m] * rule.node[m];
      for (std::size_t a = 0; a < L; ++a) {
        if (lat.label(a) < 0) continue;
        weights_[a].left[j] += wl * inner[a];
        weights_[a].right[j] += wr * inner[a];
      }
    }
  });
  const double floor = options.memory_tol * rho[0];
  std::size_t last = samples;
  while (last > 1 && rho[last - 1] < floor) --last;
  memory_length_ = std::min(last, panels);
}

const std::vector<double>& KernelTable::values(long n) const {
  return values_[model_.lattice().index(std::abs(n))];
}

const ProductWeights& KernelTable::weights(long n) const {
  return weights_[model_.lattice().index(std::abs(n))];
}

std::vector<double> solve_volterra(const ProductWeights& kernel, const std::vector<double>& source,
                                   VolterraScheme scheme, std::size_t memory_length) {
  const std::size_t n = source.size();
  std::vector<double> f(n, 0.0);
  if (n == 0) return f;
  if (kernel.panels() + 1 < n) throw std::invalid_argument("solve_volterra: kernel shorter than source");
  f[0] = source[0];
  if (n == 1) return f;
  const std::size_t M = std::max<std::size_t>(1, std::min(memory_length, kernel.panels()));

  // Per-lag weight w[i] multiplying f_{j-i} for 1 <= i < j; stored reversed so that
  // history sums run forward in memory.
  std::vector<double> lag(M);
  if (scheme == VolterraScheme::trapezoid) {
    for (std::size_t i = 1; i < M; ++i) lag[i] = kernel.right[i - 1] + kernel.left[i];
  } else {
    // Panel i spans lags i-1 and i, each at half weight.
    for (std::size_t i = 1; i < M; ++i)
      lag[i] = 0.5 * (kernel.left[i - 1] + kernel.right[i - 1] + kernel.left[i] + kernel.right[i]);
  }
  std::vector<double> rev(M);
  for (std::size_t i = 0; i < M; ++i) rev[M - 1 - i] = lag[i];
  // sum_{i=1}^{hi} lag[i] * f[j - i]
  auto history = [&](std::size_t j, std::size_t hi) {
    if (hi < 1) return 0.0;
    const double* fp = f.data() + (j - hi);
    const double* kp = rev.data() + (M - 1 - hi);
    double acc = 0.0;
    for (std::size_t m = 0; m < hi; ++m) acc += kp[m] * fp[m];
    return acc;
  };

  const bool trapezoid = scheme == VolterraScheme::trapezoid;
  const double self = trapezoid ? kernel.left[0] : 0.5 * (kernel.left[0] + kernel.right[0]);
  const double diag = 1.0 - self;
  for (std::size_t j = 1; j < n; ++j) {
    double acc = history(j, std::min(j - 1, M - 1));
    // Contribution of the oldest value f_0 through the last panel [t_{j-1}, t_j].
    if (j - 1 < M) {
      const double last = trapezoid ? kernel.right[j - 1]
                                    : 0.5 * (kernel.left[j - 1] + kernel.right[j - 1]);
      acc += last * f[0];
    }
    f[j] = (source[j] + acc) / diag;
  }
  return f;
}

// ---------------------------------------------------------------------------

namespace {

// g^(t_j, n) for n >= 0 (lattice order, negative labels left empty).
std::vector<ComplexField> source_modes(const KernelTable& table, const InitialCondition& init,
                                       int workers) {
  const auto& model = table.model();
  const auto& lat = model.lattice();
  const auto L = static_cast<std::size_t>(lat.size());
  const std::size_t samples = table.grid().steps + 1;
  const SourceTerm source(model, init);
  std::vector<ComplexField> modes(L, ComplexField(samples));
  parallel_for(samples, workers, [&](std::size_t j) {
    const auto g = source.at(table.grid().time(j));
    const auto gh = lat.dft(std::span<const double>(g));
    for (std::size_t a = 0; a < L; ++a)
      if (lat.label(a) >= 0) modes[a][j] = gh[a];
  });
  return modes;
}

}  // namespace

std::vector<ComplexField> solve_profile_modes(const KernelTable& table,
                                              const InitialCondition& init,
                                              const SolverOptions& options) {
  const auto& lat = table.model().lattice();
  const auto L = static_cast<std::size_t>(lat.size());
  const std::size_t samples = table.grid().steps + 1;
  auto modes = source_modes(table, init, options.workers);

  std::vector<std::size_t> nonneg;
  for (std::size_t a = 0; a < L; ++a)
    if (lat.label(a) >= 0) nonneg.push_back(a);
  parallel_for(nonneg.size(), options.workers, [&](std::size_t idx) {
    const std::size_t a = nonneg[idx];
    const auto& kernel = table.weights(lat.label(a));
    std::vector<double> re(samples), im(samples);
    bool has_imag = false;
    for (std::size_t j = 0; j < samples; ++j) {
      re[j] = modes[a][j].real();
      im[j] = modes[a][j].imag();
      has_imag = has_imag || im[j] != 0.0;
    }
    const auto fr = solve_volterra(kernel, re, table.scheme(), table.memory_length());
    std::vector<double> fi(samples, 0.0);
    if (has_imag)
      fi = solve_volterra(kernel, im, table.scheme(), table.memory_length());
    for (std::size_t j = 0; j < samples; ++j) modes[a][j] = {fr[j], fi[j]};
  });
  // Real data: T^(t, -n) = conj T^(t, n).
  for (std::size_t a = 0; a < L; ++a) {
    if (lat.label(a) >= 0) continue;
    const auto& src = modes[lat.mirror(a)];
    for (std::size_t j = 0; j < samples; ++j) modes[a][j] = std::conj(src[j]);
  }
  return modes;
}

TemperatureProfile solve_profile(const KernelTable& table, const InitialCondition& init,
                                 const SolverOptions& options) {
  const auto& lat = table.model().lattice();
  const auto L = static_cast<std::size_t>(lat.size());
  const auto modes = solve_profile_modes(table, init, options);
  const std::size_t samples = table.grid().steps + 1;
  const std::size_t stride = std::max<std::size_t>(1, options.record_stride);

  TemperatureProfile profile;
  profile.provenance = Provenance::renewal;
  ComplexField column(L);
  for (std::size_t j = 0; j < samples; j += stride) {
    for (std::size_t a = 0; a < L; ++a) column[a] = modes[a][j];
    const auto full = lat.idft(std::span<const Complex>(column));
    RealField row(L);
    for (std::size_t x = 0; x < L; ++x) {
      if (std::abs(full[x].imag()) > 1e-9 * std::max(1.0, std::abs(full[x].real())))
        throw NonConvergence("renewal solution has a non-negligible imaginary part");
      row[x] = full[x].real();
    }
    profile.times.push_back(table.grid().time(j));
    profile.values.push_back(std::move(row));
  }
  return profile;
}

TemperatureProfile solve_profile(const InteractionModel& model, const InitialCondition& init,
                                 const TimeGrid& grid, const SolverOptions& options) {
  const KernelTable table(model, grid, options);
  return solve_profile(table, init, options);
}

ModeGreen greens_mode(const KernelTable& table, long n) {
  ModeGreen out;
  out.n = n;
  out.k = table.model().lattice().wave_number(n);
  out.grid = table.grid();
  out.values = solve_volterra(table.weights(n), table.values(n), table.scheme(), table.memory_length());
  return out;
}

ModeGreen greens_mode(const InteractionModel& model, long n, const TimeGrid& grid,
                      const SolverOptions& options) {
  const KernelTable table(model, grid, options);
  return greens_mode(table, n);
}

std::vector<double> mass_balance_residuals(const KernelTable& table, const InitialCondition& init,
                             const TemperatureProfile& profile) {
  const auto& grid = table.grid();
  const auto& w = table.weights(0);
  const std::size_t M = std::min(table.memory_length(), w.panels());
  const SourceTerm source(table.model(), init);
  // Spatial sums of the solution at every grid time; the profile must hold all of them.
  const std::size_t samples = grid.steps + 1;
  if (profile.values.size() != samples)
    throw std::invalid_argument("mass balance needs the profile at every grid time");
  std::vector<double> total(samples);
  for (std::size_t j = 0; j < samples; ++j)
    total[j] = std::accumulate(profile.values[j].begin(), profile.values[j].end(), 0.0);

  const bool trapezoid = table.scheme() == VolterraScheme::trapezoid;
  std::vector<double> residuals(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    const auto g = source.at(grid.time(j));
    double conv = 0.0;
    // int_0^{t_j} rho_s S(t_j - s) ds with the solver's own product rule.
    for (std::size_t i = 0; i < std::min(j, M); ++i) {
      const double a = total[j - i], b = total[j - i - 1];
      conv += trapezoid ? w.left[i] * a + w.right[i] * b : 0.5 * (w.left[i] + w.right[i]) * (a + b);
    }
    residuals[j] = total[j] - std::accumulate(g.begin(), g.end(), 0.0) - conv;
  }
  return residuals;
}

AsymptoticCheck greens_asymptotic_check(const ModeGreen& mode, const AsymptoticData& data,
                                        double t_begin, double t_end) {
  const auto idx = data.find(mode.n);
  if (!idx) throw MissingAsymptotics("no asymptotic data for mode n=" + std::to_string(mode.n));
  const auto& entry = data.modes[*idx];
  AsymptoticCheck check;
  for (std::size_t j = 0; j < mode.values.size(); ++j) {
    const double t = mode.grid.time(j);
    if (t < t_begin - 1e-12 || t > t_end + 1e-12) continue;
    const double pole = entry.rate ? entry.amplitude * std::exp(-t * *entry.rate) : 0.0;
    check.times.push_back(t);
    check.deviation.push_back(std::abs(mode.values[j] - pole));
  }
  if (check.times.empty()) throw std::invalid_argument("asymptotic check range outside the grid");
  // Least-squares slope of log(deviation) against t.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, count = 0;
  for (std::size_t i = 0; i < check.times.size(); ++i) {
    if (!(check.deviation[i] > 0.0)) continue;
    const double y = std::log(check.deviation[i]);
    sx += check.times[i];
    sy += y;
    sxx += check.times[i] * check.times[i];
    sxy += check.times[i] * y;
    count += 1;
  }
  if (count >= 2) {
    const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    check.fitted_rate = -slope;
  }
  for (std::size_t i = 0; i < check.times.size(); ++i)
    check.max_scaled =
        std::max(check.max_scaled, check.deviation[i] * std::exp(check.fitted_rate * check.times[i]));
  return check;
}

}  // namespace vflip
