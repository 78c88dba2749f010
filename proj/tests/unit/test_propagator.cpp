#include <doctest.h>

#include <cmath>
#include <random>

#include "vflip/errors.hpp"
#include "vflip/phase_point.hpp"
#include "vflip/propagator.hpp"

using namespace vflip;

namespace {

// exp(-t M) for M = [[0, w2], [-1, gamma]] by Taylor series with scaling and squaring.
Matrix2 expm_oracle(double w2, double gamma, double t) {
  Matrix2 a{0.0, -t * w2, t, -t * gamma};
  int squarings = 0;
  double norm = std::abs(a.a11) + std::abs(a.a12) + std::abs(a.a21) + std::abs(a.a22);
  while (norm > 0.05) {
    norm /= 2.0;
    ++squarings;
  }
  const double scale = std::ldexp(1.0, -squarings);
  a = {a.a11 * scale, a.a12 * scale, a.a21 * scale, a.a22 * scale};
  Matrix2 sum{}, term{};
  for (int n = 1; n <= 20; ++n) {
    term = term * a;
    term = {term.a11 / n, term.a12 / n, term.a21 / n, term.a22 / n};
    sum = {sum.a11 + term.a11, sum.a12 + term.a12, sum.a21 + term.a21, sum.a22 + term.a22};
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

double matrix_diff(const Matrix2& x, const Matrix2& y) {
  return std::max({std::abs(x.a11 - y.a11), std::abs(x.a12 - y.a12), std::abs(x.a21 - y.a21),
                   std::abs(x.a22 - y.a22)});
}

}  // namespace

TEST_SUITE("propagator") {

TEST_CASE("mode spectrum examples") {
  const auto a = mode_spectrum(std::sqrt(5.0), 6.0);
  CHECK(a.u == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(a.mu_plus == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(a.mu_minus == doctest::Approx(1.0).epsilon(1e-14));
  const auto b = mode_spectrum(1.0, 6.0);
  CHECK(b.u == doctest::Approx(std::sqrt(8.0)).epsilon(1e-14));
  CHECK(b.mu_plus == doctest::Approx(3.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(b.mu_minus == doctest::Approx(3.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("mode spectrum invariants") {
  const auto m = InteractionModel::nearest_neighbor(1.0, 6.0, 16);
  for (long n : m.lattice().dual()) {
    const auto s = mode_spectrum(m, m.lattice().wave_number(n));
    CHECK(s.mu_plus + s.mu_minus == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(s.mu_plus * s.mu_minus == doctest::Approx(s.omega_sq).epsilon(1e-12));
    CHECK(s.mu_minus >= m.delta0() * (1.0 - 1e-12));
  }
}

TEST_CASE("critical damping is rejected") {
  CHECK_THROWS_AS(mode_spectrum(3.0, 6.0), DegenerateMode);
  CHECK_THROWS_AS(mode_spectrum(3.5, 6.0), DegenerateMode);
}

TEST_CASE("closed form at t = 0 and t = 1") {
  const auto s = mode_spectrum(std::sqrt(5.0), 6.0);
  const auto zero = a_hat(s, 0.0);
  CHECK(zero.a1 == doctest::Approx(0.0));
  CHECK(zero.a2 == doctest::Approx(1.0));
  const auto one = a_hat(s, 1.0);
  CHECK(one.a2 == doctest::Approx((5.0 * std::exp(-5.0) - std::exp(-1.0)) / 4.0).epsilon(1e-13));
  CHECK(one.a2 == doctest::Approx(-0.0835472).epsilon(1e-6));
  CHECK(one.a1 == doctest::Approx(1.25 * (std::exp(-5.0) - std::exp(-1.0))).epsilon(1e-13));
  CHECK(one.a1 == doctest::Approx(-0.451427).epsilon(1e-6));
  const auto oracle = expm_oracle(5.0, 6.0, 1.0);
  CHECK(std::abs(one.a1 - oracle.a12) < 1e-12);
  CHECK(std::abs(one.a2 - oracle.a22) < 1e-12);
}

TEST_CASE("matrix against the exponential oracle") {
  CHECK(matrix_diff(propagator_matrix(mode_spectrum(std::sqrt(5.0), 6.0), 0.0), Matrix2{}) < 1e-15);
  const auto m = InteractionModel::nearest_neighbor(1.0, 6.0, 16);
  for (double t : {0.01, 0.3, 1.0, 4.0}) {
    for (long n : m.lattice().dual()) {
      const double k = m.lattice().wave_number(n);
      const auto s = mode_spectrum(m, k);
      CHECK(matrix_diff(propagator_matrix(s, t), expm_oracle(s.omega_sq, 6.0, t)) < 1e-10);
      const auto col = a_hat(s, t);
      const auto mat = propagator_matrix(s, t);
      CHECK(col.a1 == doctest::Approx(mat.a12).epsilon(1e-14));
      CHECK(col.a2 == doctest::Approx(mat.a22).epsilon(1e-14));
    }
  }
}

TEST_CASE("near-critical modes stay accurate") {
  const double w = 3.0 - 1e-7;
  const auto s = mode_spectrum(w, 6.0);
  for (double t : {1e-3, 0.1, 1.0}) {
    const auto oracle = expm_oracle(w * w, 6.0, t);
    const auto mat = propagator_matrix(s, t);
    CHECK(matrix_diff(mat, oracle) < 1e-10 * std::max(1.0, std::abs(oracle.a12)));
  }
}

TEST_CASE("semigroup law") {
  const auto s = mode_spectrum(std::sqrt(5.0), 6.0);
  CHECK(matrix_diff(propagator_matrix(s, 0.5) * propagator_matrix(s, 0.5), propagator_matrix(s, 1.0)) < 1e-12);

  const auto m = InteractionModel::nearest_neighbor(1.0, 6.0, 16);
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> ut(0.0, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double t = ut(gen), r = ut(gen);
    for (const auto& sp : dual_spectra(m))
      CHECK(matrix_diff(propagator_matrix(sp, t + r), propagator_matrix(sp, t) * propagator_matrix(sp, r)) < 1e-11);
  }
}

TEST_CASE("uniform decay bound on the test model") {
  const auto m = InteractionModel::nearest_neighbor(1.0, 6.0, 16);
  const auto spectra = dual_spectra(m);
  const double d0 = m.delta0(), horizon = 40.0 / d0;
  for (int i = 0; i < 400; ++i) {
    const double t = horizon * i / 399.0;
    double worst = 0.0;
    for (const auto& s : spectra) worst = std::max(worst, std::abs(a_hat(s, t).a2));
    CHECK(worst <= 2.0 * std::exp(-d0 * t));
  }
}

TEST_CASE("A2 becomes negative after t1") {
  const auto m = InteractionModel::nearest_neighbor(1.0, 6.0, 16);
  const double u0 = std::sqrt(9.0 - m.max_phi_hat());
  const double t1 = std::log(2.0 * 36.0 / 1.0) / (2.0 * u0);
  for (double t : {t1, 1.5 * t1, 3.0 * t1, 10.0 * t1})
    for (const auto& s : dual_spectra(m)) CHECK(-a_hat(s, t).a2 > 0.0);
}

TEST_CASE("real-space fields") {
  const auto m = InteractionModel::nearest_neighbor(1.0, 6.0, 8);
  const auto& lat = m.lattice();
  const auto f0 = a_field(m, 0.0);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(f0.a2[i] == doctest::Approx(lat.label(i) == 0 ? 1.0 : 0.0));
    CHECK(f0.a1[i] == doctest::Approx(0.0));
  }
  const auto f = a_field(m, 0.3);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(f.a1[i] == doctest::Approx(f.a1[lat.mirror(i)]).epsilon(1e-12));
    CHECK(f.a2[i] == doctest::Approx(f.a2[lat.mirror(i)]).epsilon(1e-12));
  }
  CHECK(std::abs(f.a2[lat.index(4)]) < std::abs(f.a2[lat.index(1)]));
  CHECK(std::abs(f.a2[lat.index(-1)]) > std::abs(f.a2[lat.index(-3)]));

  double lhs = 0.0, rhs = 0.0;
  for (double v : f.a2) lhs += v * v;
  for (long n : lat.dual()) rhs += std::pow(a_hat(m, 0.3, lat.wave_number(n)).a2, 2) / 8.0;
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("replica evolution") {
  const auto m = InteractionModel::nearest_neighbor(1.0, 6.0, 8);
  const auto& lat = m.lattice();
  std::mt19937_64 gen(2);
  std::normal_distribution<double> nd;
  auto X = PhasePoint::zeros(8);
  for (std::size_t i = 0; i < 8; ++i) {
    X.q[i] = nd(gen);
    X.p[i] = nd(gen);
  }
  const auto same = evolve_replica(m, 0.0, X);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(same.q[i] == doctest::Approx(X.q[i]).epsilon(1e-12));
    CHECK(same.p[i] == doctest::Approx(X.p[i]).epsilon(1e-12));
  }

  auto kick = PhasePoint::zeros(8);
  kick.p[lat.index(0)] = 1.0;
  for (double t : {0.2, 1.0, 3.0}) {
    const auto out = evolve_replica(m, t, kick);
    const auto a = a_field(m, t);
    for (std::size_t i = 0; i < 8; ++i) CHECK(out.p[i] == doctest::Approx(a.a2[i]).epsilon(1e-10).scale(1.0));
  }

  double previous = energy(m, X);
  for (int i = 1; i <= 200; ++i) {
    const double e = energy(m, evolve_replica(m, 0.05 * i, X));
    CHECK(e <= previous * (1.0 + 1e-12));
    previous = e;
  }
}

TEST_CASE("closed-form product transform against time quadrature") {
  const auto m = InteractionModel::nearest_neighbor(1.0, 6.0, 16);
  const auto spectra = dual_spectra(m);
  std::mt19937_64 gen(23);
  std::uniform_int_distribution<std::size_t> pick(0, spectra.size() - 1);
  // Composite Simpson on [0, 40/delta0] with 2^17 panels.
  const double horizon = 40.0 / m.delta0();
  const int panels = 1 << 17;
  const double h = horizon / panels;
  for (int trial = 0; trial < 10; ++trial) {
    const auto& s1 = spectra[pick(gen)];
    const auto& s2 = spectra[pick(gen)];
    auto f = [&](double t) { return a_hat(s1, t).a2 * a_hat(s2, t).a2; };
    double acc = f(0.0) + f(horizon);
    for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    acc *= h / 3.0;
    const auto closed = a2_product_laplace(s1, s2, Complex(0.0));
    CHECK(std::abs(closed.imag()) < 1e-14);
    CHECK(std::abs(closed.real() - acc) < 1e-9);
  }
}

}  // TEST_SUITE
