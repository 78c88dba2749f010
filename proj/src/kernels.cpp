#include "vflip/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vflip/errors.hpp"

namespace vflip {

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::deterministic:
      return "deterministic";
    case InitialKind::point_momentum:
      return "point_momentum";
    case InitialKind::sample_set:
      return "sample_set";
  }
  return "unknown";
}

InitialCondition::InitialCondition(InitialKind kind, const InteractionModel& model,
                                   std::vector<PhasePoint> samples, std::vector<double> weights)
    : kind_(kind), size_(model.size()), samples_(std::move(samples)), weights_(std::move(weights)) {
  if (samples_.empty()) throw std::invalid_argument("initial condition needs at least one sample");
  if (weights_.size() != samples_.size())
    throw std::invalid_argument("initial condition: one weight per sample required");
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("initial condition: weights must sum to > 0");
  for (double& w : weights_) {
    if (w < 0.0) throw std::invalid_argument("initial condition: negative weight");
    w /= total;
  }
  energy_ = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (samples_[i].q.size() != static_cast<std::size_t>(size_) ||
        samples_[i].p.size() != static_cast<std::size_t>(size_))
      throw std::invalid_argument("initial condition: phase point size does not match lattice");
    energy_ += weights_[i] * vflip::energy(model, samples_[i]);
  }
}

InitialCondition InitialCondition::deterministic(const InteractionModel& model, PhasePoint X) {
  return {InitialKind::deterministic, model, {std::move(X)}, {1.0}};
}

InitialCondition InitialCondition::point_momentum(const InteractionModel& model,
                                                  std::optional<double> amplitude) {
  auto X = PhasePoint::zeros(model.size());
  X.p[model.lattice().index(0)] = amplitude.value_or(std::sqrt(2.0 * model.size()));
  return {InitialKind::point_momentum, model, {std::move(X)}, {1.0}};
}

InitialCondition InitialCondition::sample_set(const InteractionModel& model,
                                              std::vector<PhasePoint> points,
                                              std::vector<double> weights) {
  return {InitialKind::sample_set, model, std::move(points), std::move(weights)};
}

// ---------------------------------------------------------------------------

TimeQuadrature default_time_quadrature(const InteractionModel& model,
                                       std::optional<double> panel_width,
                                       std::optional<double> t_cut) {
  const double h = panel_width.value_or(std::min(0.02 / model.gamma(), 0.02 / model.omega_max()));
  return composite_gauss(h, t_cut.value_or(40.0 / model.delta0()));
}

MemoryKernel::MemoryKernel(const InteractionModel& model)
    : model_(model), spectra_(dual_spectra(model)) {}

RealField MemoryKernel::at(double t) const {
  auto a2 = a_field(model_.lattice(), spectra_, t).a2;
  const double scale = 2.0 * model_.gamma();
  for (double& v : a2) v = scale * v * v;
  return a2;
}

RealField MemoryKernel::spectrum_at(double t) const {
  const auto& lat = model_.lattice();
  const auto L = static_cast<std::size_t>(lat.size());
  RealField a2(L);
  for (std::size_t i = 0; i < L; ++i) a2[i] = a_hat(spectra_[i], t).a2;
  // Convolution theorem: p^(n) = 2 gamma (1/L) sum_m A2(m) A2(n - m).
  RealField out(L);
  const double scale = 2.0 * model_.gamma() / static_cast<double>(L);
  for (std::size_t a = 0; a < L; ++a) {
    const long n = lat.label(a);
    double acc = 0.0;
    for (std::size_t b = 0; b < L; ++b) acc += a2[b] * a2[lat.index(n - lat.label(b))];
    out[a] = scale * acc;
  }
  return out;
}

double MemoryKernel::rho(double t) const {
  double acc = 0.0;
  for (const auto& m : spectra_) {
    const double a2 = a_hat(m, t).a2;
    acc += a2 * a2;
  }
  return 2.0 * model_.gamma() * acc / static_cast<double>(spectra_.size());
}

RealField memory_kernel(const InteractionModel& model, double t) {
  return MemoryKernel(model).at(t);
}

double rho(const InteractionModel& model, double t) { return MemoryKernel(model).rho(t); }

KernelMoments kernel_moments(const InteractionModel& model, const TimeQuadrature& quadrature) {
  const MemoryKernel kernel(model);
  KernelMoments m;
  for (std::size_t i = 0; i < quadrature.nodes.size(); ++i) {
    const double t = quadrature.nodes[i];
    const double r = kernel.rho(t);
    m.mass += quadrature.weights[i] * r;
    m.first_moment += quadrature.weights[i] * t * r;
  }
  m.tail_bound = kernel.rho(quadrature.t_cut) / (2.0 * model.delta0());
  return m;
}

RealField ptilde(const InteractionModel& model, const TimeQuadrature& quadrature) {
  const MemoryKernel kernel(model);
  const auto& lat = model.lattice();
  const auto L = static_cast<std::size_t>(lat.size());
  RealField out(L, 0.0);
  for (std::size_t i = 0; i < quadrature.nodes.size(); ++i) {
    const auto p = kernel.at(quadrature.nodes[i]);
    for (std::size_t x = 0; x < L; ++x) out[x] += quadrature.weights[i] * p[x];
  }
  for (double& v : out) v *= 0.5 * model.gamma();
  // Exact evenness: average mirrored entries.
  RealField sym(L);
  for (std::size_t x = 0; x < L; ++x) sym[x] = 0.5 * (out[x] + out[lat.mirror(x)]);
  return sym;
}

RealField ptilde(const InteractionModel& model) {
  return ptilde(model, default_time_quadrature(model));
}

// ---------------------------------------------------------------------------

SourceTerm::SourceTerm(const InteractionModel& model, const InitialCondition& init)
    : model_(model), spectra_(dual_spectra(model)), weights_(init.weights()) {
  const auto& lat = model.lattice();
  for (const auto& X : init.samples()) {
    q_hat_.push_back(lat.dft(std::span<const double>(X.q)));
    p_hat_.push_back(lat.dft(std::span<const double>(X.p)));
  }
}

RealField SourceTerm::at(double t) const {
  const auto& lat = model_.lattice();
  const auto L = static_cast<std::size_t>(lat.size());
  std::vector<Matrix2> transposed(L);
  for (std::size_t i = 0; i < L; ++i) transposed[i] = propagator_matrix(spectra_[i], t).transpose();
  RealField g(L, 0.0);
  ComplexField evolved(L);
  for (std::size_t s = 0; s < q_hat_.size(); ++s) {
    for (std::size_t i = 0; i < L; ++i)
      evolved[i] = transposed[i].a21 * q_hat_[s][i] + transposed[i].a22 * p_hat_[s][i];
    const auto p = lat.idft_real(std::span<const Complex>(evolved));
    for (std::size_t x = 0; x < L; ++x) g[x] += weights_[s] * p[x] * p[x];
  }
  return g;
}

RealField source_term(const InteractionModel& model, const InitialCondition& init, double t) {
  return SourceTerm(model, init).at(t);
}

RealField integrated_source(const InteractionModel& model, const InitialCondition& init,
                            const TimeQuadrature& quadrature) {
  const SourceTerm source(model, init);
  RealField out(static_cast<std::size_t>(model.size()), 0.0);
  for (std::size_t i = 0; i < quadrature.nodes.size(); ++i) {
    const auto g = source.at(quadrature.nodes[i]);
    for (std::size_t x = 0; x < out.size(); ++x) out[x] += quadrature.weights[i] * g[x];
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

template <class Term>
Complex dual_convolution(const InteractionModel& model, Complex lambda, long n, Term term) {
  if (!(lambda.real() > -model.delta0()))
    throw DomainError("p^(lambda, k) requires Re lambda > -delta0");
  const auto& lat = model.lattice();
  const auto spectra = dual_spectra(model);
  Complex acc{};
  for (std::size_t b = 0; b < spectra.size(); ++b)
    acc += term(spectra[b], spectra[lat.index(n - lat.label(b))], lambda);
  return 2.0 * model.gamma() * acc / static_cast<double>(lat.size());
}

}  // namespace

Complex laplace_fourier_p(const InteractionModel& model, Complex lambda, long n) {
  return dual_convolution(model, lambda, n, a2_product_laplace);
}

Complex laplace_fourier_p_derivative(const InteractionModel& model, Complex lambda, long n) {
  return dual_convolution(model, lambda, n, a2_product_laplace_derivative);
}

KernelSet tabulate_kernels(const InteractionModel& model, const InitialCondition& init,
                           const std::vector<double>& times) {
  const MemoryKernel kernel(model);
  const SourceTerm source(model, init);
  KernelSet set;
  set.times = times;
  for (double t : times) {
    set.p.push_back(kernel.at(t));
    set.rho.push_back(kernel.rho(t));
    set.g.push_back(source.at(t));
  }
  set.ptilde = ptilde(model);
  return set;
}

}  // namespace vflip
