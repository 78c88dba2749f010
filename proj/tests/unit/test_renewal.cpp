#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "vflip/asymptotics.hpp"
#include "vflip/errors.hpp"
#include "vflip/kernels.hpp"
#include "vflip/renewal.hpp"

using namespace vflip;

namespace {

InteractionModel test_model(int L = 16) { return InteractionModel::nearest_neighbor(1.0, 6.0, L); }

std::size_t at(double t, double h) { return static_cast<std::size_t>(std::llround(t / h)); }

// f = 1 + int_0^t a e^{-b s} f(t - s) ds has f(t) = (b - a e^{-(b-a) t}) / (b - a).
struct ExponentialCase {
  double a = 2.0, b = 3.0, t_max = 4.0;
  double exact(double t) const { return (b - a * std::exp(-(b - a) * t)) / (b - a); }
  double max_error(double h, VolterraScheme scheme) const {
    const auto panels = static_cast<std::size_t>(std::llround(t_max / h));
    const auto w = product_weights([&](double s) { return a * std::exp(-b * s); }, h, panels);
    const std::vector<double> source(panels + 1, 1.0);
    const auto f = solve_volterra(w, source, scheme, panels);
    double err = 0.0;
    for (std::size_t j = 0; j <= panels; ++j) err = std::max(err, std::abs(f[j] - exact(h * j)));
    return err;
  }
};

struct PathPair {
  std::vector<double> direct, via_green;
};

// T^(t, n) from the solver, and g^ + G * g^ with the convolution by the trapezoid rule.
PathPair both_paths(const InteractionModel& m, const InitialCondition& init, double h, double t_max, long n) {
  const auto grid = TimeGrid::covering(t_max, h);
  const KernelTable table(m, grid);
  const auto& lat = m.lattice();
  const auto modes = solve_profile_modes(table, init);
  const auto green = greens_mode(table, n);
  const SourceTerm source(m, init);
  std::vector<double> g(grid.steps + 1);
  for (std::size_t j = 0; j <= grid.steps; ++j) g[j] = lat.dft(source.at(grid.time(j)))[lat.index(n)].real();
  PathPair out;
  for (std::size_t j = 0; j <= grid.steps; ++j) {
    double conv = 0.0;
    for (std::size_t i = 0; j > 0 && i <= j; ++i) conv += (i == 0 || i == j ? 0.5 : 1.0) * green.values[i] * g[j - i];
    out.via_green.push_back(g[j] + h * conv);
    out.direct.push_back(modes[lat.index(n)][j].real());
  }
  return out;
}

}  // namespace

TEST_SUITE("renewal") {

TEST_CASE("product weights reproduce mass and first moment") {
  const double h = 0.01;
  const auto w = product_weights([](double s) { return std::exp(-2.0 * s); }, h, 1000);
  double mass = 0.0, first = 0.0;
  for (std::size_t i = 0; i < w.panels(); ++i) {
    mass += w.left[i] + w.right[i];
    first += h * (i * w.left[i] + (i + 1.0) * w.right[i]);
  }
  const double tail = std::exp(-20.0);
  CHECK(mass == doctest::Approx(0.5 * (1.0 - tail)).epsilon(1e-13));
  CHECK(first == doctest::Approx(0.25 * (1.0 - tail * (1.0 + 20.0))).epsilon(1e-12));
}

TEST_CASE("scalar Volterra solve against an exact solution") {
  const ExponentialCase ex;
  for (auto scheme : {VolterraScheme::trapezoid, VolterraScheme::midpoint}) {
    const double e1 = ex.max_error(0.02, scheme), e2 = ex.max_error(0.01, scheme);
    CHECK(e1 < 1e-3);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("profile at t = 0 is the source") {
  const auto m = test_model();
  const auto init = InitialCondition::point_momentum(m);
  const auto prof = solve_profile(m, init, TimeGrid::covering(1.0, max_step(m)));
  for (std::size_t i = 0; i < 16; ++i)
    CHECK(prof.values[0][i] == doctest::Approx(m.lattice().label(i) == 0 ? 32.0 : 0.0));
  CHECK(prof.provenance == Provenance::renewal);
  CHECK(prof.row_of(prof.times.back()) == prof.times.size() - 1);
  CHECK_THROWS_AS(prof.row_of(0.5 * max_step(m)), std::out_of_range);
}

TEST_CASE("oversized steps are rejected") {
  const auto m = test_model();
  const auto init = InitialCondition::point_momentum(m);
  CHECK_THROWS_AS(solve_profile(m, init, TimeGrid::covering(1.0, 2.0 * max_step(m))), StepTooLarge);
  CHECK(max_step(m) == doctest::Approx(1.0 / 120.0));
}

TEST_CASE("long run: mass balance, positivity and equilibration trend") {
  const auto m = test_model();
  const auto init = InitialCondition::point_momentum(m);
  const double h = max_step(m);
  const auto grid = TimeGrid::covering(200.0, h);
  const KernelTable table(m, grid);
  const auto prof = solve_profile(table, init);
  const auto residuals = mass_balance_residuals(table, init, prof);
  double worst = 0.0;
  for (double r : residuals) worst = std::max(worst, std::abs(r));
  CHECK(worst < 1e-8 * init.energy());

  double lowest = 0.0;
  for (const auto& row : prof.values)
    for (double v : row) lowest = std::min(lowest, v);
  CHECK(lowest >= -1e-9 * init.energy_density());

  auto deviation = [&](double t) {
    double d = 0.0;
    for (double v : prof.values[at(t, h)]) d = std::max(d, std::abs(v - init.energy_density()));
    return d;
  };
  CHECK(deviation(200.0) < deviation(100.0));
  CHECK(deviation(100.0) < deviation(50.0));
}

TEST_CASE("mesh convergence is second order") {
  const auto m = test_model();
  const auto init = InitialCondition::point_momentum(m);
  const double h = max_step(m), t = 3.0;
  std::vector<RealField> rows;
  for (double step : {h, h / 2.0, h / 4.0}) rows.push_back(solve_profile(m, init, TimeGrid::covering(t, step)).values.back());
  double e1 = 0.0, e2 = 0.0;
  for (std::size_t x = 0; x < 16; ++x) {
    const double extrapolated = (4.0 * rows[2][x] - rows[1][x]) / 3.0;
    e1 = std::max(e1, std::abs(rows[0][x] - extrapolated));
    e2 = std::max(e2, std::abs(rows[1][x] - extrapolated));
  }
  CHECK(e1 / e2 >= 3.5);
  CHECK(e1 / e2 <= 4.5);
}

TEST_CASE("trapezoid and midpoint schemes agree to second order") {
  const auto m = test_model();
  const auto init = InitialCondition::point_momentum(m);
  auto gap = [&](double h) {
    SolverOptions trap, mid;
    mid.scheme = VolterraScheme::midpoint;
    const auto grid = TimeGrid::covering(5.0, h);
    const auto a = solve_profile(m, init, grid, trap), b = solve_profile(m, init, grid, mid);
    double d = 0.0;
    for (std::size_t j = 0; j < a.values.size(); ++j)
      for (std::size_t x = 0; x < 16; ++x) d = std::max(d, std::abs(a.values[j][x] - b.values[j][x]));
    return d;
  };
  const double h = max_step(m);
  const double d1 = gap(h), d2 = gap(h / 2.0);
  CHECK(d1 < 0.02);
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("Green's modes") {
  const auto m = test_model();
  const double h = max_step(m);
  const auto grid = TimeGrid::covering(40.0, h);
  const KernelTable table(m, grid);
  for (long n : {0L, 1L, 5L, 8L}) CHECK(greens_mode(table, n).values[0] == doctest::Approx(12.0));
  const auto zero = greens_mode(table, 0);
  CHECK(std::abs(zero.values.back() - 6.0) < 0.01);
  for (double v : zero.values) CHECK(v >= 0.0);
}

TEST_CASE("Green's function reproduces the solution through the source") {
  const auto m = test_model();
  const auto init = InitialCondition::point_momentum(m);
  const double h = max_step(m);
  for (long n : {0L, 1L, 3L}) {
    const auto a = both_paths(m, init, h, 10.0, n);
    const auto b = both_paths(m, init, h / 2.0, 10.0, n);
    const auto c = both_paths(m, init, h / 4.0, 10.0, n);
    // Two Richardson levels remove the h^2 and h^4 terms of both discretizations.
    auto extrapolate = [&](auto pick, std::size_t j) {
      const double r1 = (4.0 * pick(b)[2 * j] - pick(a)[j]) / 3.0;
      const double r2 = (4.0 * pick(c)[4 * j] - pick(b)[2 * j]) / 3.0;
      return (16.0 * r2 - r1) / 15.0;
    };
    double worst = 0.0;
    for (std::size_t j = 0; j < a.direct.size(); ++j) {
      const double d = extrapolate([](const PathPair& p) -> const std::vector<double>& { return p.direct; }, j);
      const double g = extrapolate([](const PathPair& p) -> const std::vector<double>& { return p.via_green; }, j);
      worst = std::max(worst, std::abs(d - g));
    }
    CHECK(worst < 1e-7);
  }
}

TEST_CASE("Green's modes approach their pole terms") {
  const auto vm = ValidatedModel::check(test_model());
  const auto data = compute_asymptotics(vm);
  const double h = max_step(vm.model());
  const auto grid = TimeGrid::covering(40.0, h);
  const KernelTable table(vm.model(), grid);

  const auto zero = greens_asymptotic_check(greens_mode(table, 0), data, 5.0, 40.0);
  CHECK(zero.deviation.back() < zero.deviation.front());
  CHECK(zero.fitted_rate > 0.0);

  const auto one = greens_asymptotic_check(greens_mode(table, 1), data, 0.0, 40.0);
  const double d10 = one.deviation[at(10.0, h)], d30 = one.deviation[at(30.0, h)];
  CHECK(d10 > 5.0 * d30);

  const auto small = compute_asymptotics(ValidatedModel::check(test_model(8)));
  CHECK_THROWS_AS(greens_asymptotic_check(greens_mode(table, 7), small, 0.0, 10.0), MissingAsymptotics);
}

TEST_CASE("a mode without a pole decays fast") {
  // With omega0 = 1/2 the mode n = 3 of L = 16 has no root in the bracket.
  const auto vm = ValidatedModel::check(InteractionModel::nearest_neighbor(0.5, 6.0, 16));
  REQUIRE_FALSE(decay_rate(vm, 3).has_value());
  const auto& m = vm.model();
  const auto green = greens_mode(m, 3, TimeGrid::covering(40.0 / m.delta0(), max_step(m)));
  CHECK(std::abs(green.values.back()) < 1e-6 * 12.0);
}

}  // TEST_SUITE
