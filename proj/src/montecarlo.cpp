#include "vflip/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vflip/parallel.hpp"

namespace vflip {

PhasePoint harmonic_flow(const InteractionModel& model, double dt, const PhasePoint& X) {
  const auto& lat = model.lattice();
  auto qh = lat.dft(std::span<const double>(X.q));
  auto ph = lat.dft(std::span<const double>(X.p));
  for (std::size_t i = 0; i < qh.size(); ++i) {
    const double w = model.dispersion_at(lat.label(i));
    const double c = std::cos(w * dt), s = std::sin(w * dt);
    const Complex q = qh[i], p = ph[i];
    qh[i] = c * q + (s / w) * p;
    ph[i] = -w * s * q + c * p;
  }
  return {lat.idft_real(std::span<const Complex>(qh)), lat.idft_real(std::span<const Complex>(ph))};
}

SimulationRun start_run(const InteractionModel& model, PhasePoint X, std::uint64_t seed) {
  SimulationRun run;
  run.seed = seed;
  run.energy0 = energy(model, X);
  run.state = std::move(X);
  return run;
}

void step_to(const InteractionModel& model, SimulationRun& run, double t_target, StreamRng& rng) {
  if (t_target < run.current_time) throw std::invalid_argument("step_to: target lies in the past");
  ChainSimulator sim(model);
  sim.load(run.state);
  sim.advance_to(t_target - run.current_time, rng);
  run.state = sim.state();
  run.flip_count += sim.flips();
  run.current_time = t_target;
}

// ---------------------------------------------------------------------------

ChainSimulator::ChainSimulator(const InteractionModel& model) : gamma_(model.gamma()) {
  const auto& lat = model.lattice();
  const int L = lat.size();
  const auto n_sites = static_cast<std::size_t>(L);
  basis_.assign(n_sites * n_sites, 0.0);
  frequency_.resize(n_sites);
  group_.resize(n_sites);

  // Columns: constant, (cos, sin) pairs for n = 1..(L-1)/2, alternating mode for even L.
  std::size_t m = 0;
  auto add_group = [&](long n) {
    group_freq_.push_back(model.dispersion_at(n));
    return group_freq_.size() - 1;
  };
  auto column = [&](auto&& value, std::size_t g) {
    for (std::size_t i = 0; i < n_sites; ++i) basis_[i * n_sites + m] = value(lat.label(i));
    frequency_[m] = group_freq_[g];
    group_[m] = g;
    ++m;
  };
  const double root = std::sqrt(1.0 / L), root2 = std::sqrt(2.0 / L);
  column([&](long) { return root; }, add_group(0));
  for (long n = 1; 2 * n < L; ++n) {
    const std::size_t g = add_group(n);
    column([&](long x) { return root2 * std::cos(2.0 * std::numbers::pi * n * x / L); }, g);
    column([&](long x) { return root2 * std::sin(2.0 * std::numbers::pi * n * x / L); }, g);
  }
  if (L % 2 == 0) column([&](long x) { return (x % 2 == 0) ? root : -root; }, add_group(L / 2));

  cos_.resize(group_freq_.size());
  sin_.resize(group_freq_.size());
  Q_.assign(n_sites, 0.0);
  P_.assign(n_sites, 0.0);
}

void ChainSimulator::load(const PhasePoint& X) {
  const std::size_t L = Q_.size();
  for (std::size_t m = 0; m < L; ++m) {
    double q = 0.0, p = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
      q += basis_[i * L + m] * X.q[i];
      p += basis_[i * L + m] * X.p[i];
    }
    Q_[m] = q;
    P_[m] = p;
  }
  time_ = 0.0;
  flips_ = 0;
}

PhasePoint ChainSimulator::state() const {
  const std::size_t L = Q_.size();
  PhasePoint X = PhasePoint::zeros(static_cast<int>(L));
  for (std::size_t i = 0; i < L; ++i) {
    double q = 0.0, p = 0.0;
    for (std::size_t m = 0; m < L; ++m) {
      q += basis_[i * L + m] * Q_[m];
      p += basis_[i * L + m] * P_[m];
    }
    X.q[i] = q;
    X.p[i] = p;
  }
  return X;
}

double ChainSimulator::energy() const {
  double e = 0.0;
  for (std::size_t m = 0; m < Q_.size(); ++m)
    e += frequency_[m] * frequency_[m] * Q_[m] * Q_[m] + P_[m] * P_[m];
  return 0.5 * e;
}

void ChainSimulator::flow(double dt) {
  for (std::size_t g = 0; g < group_freq_.size(); ++g) {
    cos_[g] = std::cos(group_freq_[g] * dt);
    sin_[g] = std::sin(group_freq_[g] * dt);
  }
  for (std::size_t m = 0; m < Q_.size(); ++m) {
    const double w = frequency_[m], c = cos_[group_[m]], s = sin_[group_[m]];
    const double q = Q_[m], p = P_[m];
    Q_[m] = c * q + (s / w) * p;
    P_[m] = -w * s * q + c * p;
  }
  time_ += dt;
}

double ChainSimulator::momentum(std::size_t i) const {
  const std::size_t L = P_.size();
  const double* row = basis_.data() + i * L;
  double p = 0.0;
  for (std::size_t m = 0; m < L; ++m) p += row[m] * P_[m];
  return p;
}

void ChainSimulator::flip(std::size_t i) {
  const std::size_t L = P_.size();
  const double* row = basis_.data() + i * L;
  const double twice = 2.0 * momentum(i);
  for (std::size_t m = 0; m < L; ++m) P_[m] -= twice * row[m];
  ++flips_;
}

void ChainSimulator::advance_to(double t_target, StreamRng& rng) {
  const double total_rate = flip_rate_per_site() * static_cast<double>(Q_.size());
  while (true) {
    const double wait = rng.exponential(total_rate);
    if (time_ + wait >= t_target) {
      flow(t_target - time_);
      time_ = t_target;
      return;
    }
    flow(wait);
    flip(rng.below(Q_.size()));
  }
}

// ---------------------------------------------------------------------------

namespace {

struct Accumulator {
  double count = 0.0;
  std::vector<double> mean, m2;
  double flip_mean = 0.0, flip_m2 = 0.0;
  double drift = 0.0;

  explicit Accumulator(std::size_t cells = 0) : mean(cells, 0.0), m2(cells, 0.0) {}

  void add(const std::vector<double>& sample, double flips, double sample_drift) {
    count += 1.0;
    for (std::size_t c = 0; c < mean.size(); ++c) {
      const double delta = sample[c] - mean[c];
      mean[c] += delta / count;
      m2[c] += delta * (sample[c] - mean[c]);
    }
    const double delta = flips - flip_mean;
    flip_mean += delta / count;
    flip_m2 += delta * (flips - flip_mean);
    drift = std::max(drift, sample_drift);
  }

  // Chan et al. pairwise update.
  static Accumulator merge(const Accumulator& a, const Accumulator& b) {
    if (a.count == 0.0) return b;
    if (b.count == 0.0) return a;
    Accumulator out(a.mean.size());
    out.count = a.count + b.count;
    const double wb = b.count / out.count;
    for (std::size_t c = 0; c < a.mean.size(); ++c) {
      const double delta = b.mean[c] - a.mean[c];
      out.mean[c] = a.mean[c] + delta * wb;
      out.m2[c] = a.m2[c] + b.m2[c] + delta * delta * a.count * wb;
    }
    const double delta = b.flip_mean - a.flip_mean;
    out.flip_mean = a.flip_mean + delta * wb;
    out.flip_m2 = a.flip_m2 + b.flip_m2 + delta * delta * a.count * wb;
    out.drift = std::max(a.drift, b.drift);
    return out;
  }
};

Accumulator reduce_tree(const std::vector<Accumulator>& blocks, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return blocks[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return Accumulator::merge(reduce_tree(blocks, lo, mid), reduce_tree(blocks, mid, hi));
}

}  // namespace

EnsembleResult ensemble_average(const InteractionModel& model, const InitialCondition& init,
                                const std::vector<double>& times, const EnsembleOptions& options) {
  if (options.realizations < 2) throw std::invalid_argument("ensemble needs at least 2 realizations");
  if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < 0.0))
    throw std::invalid_argument("ensemble times must be nonnegative and increasing");
  const auto L = static_cast<std::size_t>(model.size());
  const std::size_t cells = times.size() * L;
  const std::size_t block = std::max<std::size_t>(1, options.block);
  const std::size_t n_blocks = (options.realizations + block - 1) / block;

  // Cumulative sample weights for sample_set draws.
  std::vector<double> cumulative;
  double running = 0.0;
  for (double w : init.weights()) cumulative.push_back(running += w);

  std::vector<Accumulator> blocks(n_blocks, Accumulator(cells));
  parallel_for(n_blocks, options.workers, [&](std::size_t b) {
    ChainSimulator sim(model);
    std::vector<double> sample(cells);
    const std::size_t first = b * block;
    const std::size_t last = std::min(options.realizations, first + block);
    for (std::size_t r = first; r < last; ++r) {
      StreamRng rng(options.seed, r);
      std::size_t pick = 0;
      if (init.samples().size() > 1) {
        const double u = rng.uniform();
        pick = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                        cumulative.begin());
        pick = std::min(pick, init.samples().size() - 1);
      }
      sim.load(init.samples()[pick]);
      const double e0 = sim.energy();
      double drift = 0.0;
      for (std::size_t ti = 0; ti < times.size(); ++ti) {
        sim.advance_to(times[ti], rng);
        const auto X = sim.state();
        for (std::size_t x = 0; x < L; ++x) {
          double v = 0.0;
          switch (options.observable) {
            case Observable::kinetic:
              v = X.p[x] * X.p[x];
              break;
            case Observable::momentum:
              v = X.p[x];
              break;
            case Observable::position_momentum:
              v = X.q[x] * X.p[x];
              break;
          }
          sample[ti * L + x] = v;
        }
        if (e0 > 0.0) drift = std::max(drift, std::abs(sim.energy() - e0) / e0);
      }
      blocks[b].add(sample, static_cast<double>(sim.flips()), drift);
    }
  });
  const Accumulator total = reduce_tree(blocks, 0, blocks.size());

  EnsembleResult result;
  result.profile.provenance = Provenance::montecarlo;
  result.profile.times = times;
  const double n = total.count;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    RealField mean(L), err(L);
    for (std::size_t x = 0; x < L; ++x) {
      const std::size_t c = ti * L + x;
      mean[x] = total.mean[c];
      err[x] = std::sqrt(total.m2[c] / (n - 1.0) / n);
    }
    result.profile.values.push_back(std::move(mean));
    result.profile.stderr_values.push_back(std::move(err));
  }
  result.mean_flips = total.flip_mean;
  result.variance_flips = total.flip_m2 / (n - 1.0);
  result.max_energy_drift = total.drift;
  return result;
}

TemperatureProfile estimate_temperature(const InteractionModel& model, const InitialCondition& init,
                                        const std::vector<double>& times, std::size_t realizations,
                                        std::uint64_t seed, int workers) {
  if (realizations < 100) throw std::invalid_argument("estimate_temperature needs N >= 100");
  EnsembleOptions options;
  options.realizations = realizations;
  options.seed = seed;
  options.workers = workers;
  return ensemble_average(model, init, times, options).profile;
}

}  // namespace vflip
