#include "vflip/lattice.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vflip {

long wrap(long x, long L) {
  if (L < 1) throw std::invalid_argument("wrap: lattice size must be positive");
  const long lowest = (L % 2 == 1) ? -(L - 1) / 2 : -L / 2 + 1;
  long r = (x - lowest) % L;
  if (r < 0) r += L;
  return r + lowest;
}

CyclicLattice::CyclicLattice(int size) : size_(size) {
  if (size < 1) throw std::invalid_argument("CyclicLattice: size must be positive");
  lowest_ = (size % 2 == 1) ? -(size - 1) / 2 : -size / 2 + 1;
  roots_.resize(static_cast<std::size_t>(size));
  for (int m = 0; m < size; ++m) {
    const double angle = -2.0 * std::numbers::pi * m / size;
    roots_[static_cast<std::size_t>(m)] = {std::cos(angle), std::sin(angle)};
  }
}

std::vector<long> CyclicLattice::sites() const {
  std::vector<long> out(static_cast<std::size_t>(size_));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = label(i);
  return out;
}

Complex CyclicLattice::phase(long n, long x) const {
  long m = (n * x) % size_;
  if (m < 0) m += size_;
  return roots_[static_cast<std::size_t>(m)];
}

ComplexField CyclicLattice::dft(std::span<const Complex> f) const {
  const auto L = static_cast<std::size_t>(size_);
  if (f.size() != L) throw std::invalid_argument("dft: field length does not match lattice");
  ComplexField out(L);
  for (std::size_t a = 0; a < L; ++a) {
    const long n = label(a);
    Complex acc{};
    for (std::size_t b = 0; b < L; ++b) acc += f[b] * phase(n, label(b));
    out[a] = acc;
  }
  return out;
}

ComplexField CyclicLattice::dft(std::span<const double> f) const {
  ComplexField tmp(f.begin(), f.end());
  return dft(std::span<const Complex>(tmp));
}

ComplexField CyclicLattice::idft(std::span<const Complex> g) const {
  const auto L = static_cast<std::size_t>(size_);
  if (g.size() != L) throw std::invalid_argument("idft: field length does not match lattice");
  ComplexField out(L);
  for (std::size_t b = 0; b < L; ++b) {
    const long x = label(b);
    Complex acc{};
    // conj(exp(-i 2 pi n x / L)) = exp(+i 2 pi n x / L)
    for (std::size_t a = 0; a < L; ++a) acc += g[a] * std::conj(phase(label(a), x));
    out[b] = acc / static_cast<double>(size_);
  }
  return out;
}

RealField CyclicLattice::idft_real(std::span<const Complex> g) const {
  const auto full = idft(g);
  RealField out(full.size());
  for (std::size_t i = 0; i < full.size(); ++i) out[i] = full[i].real();
  return out;
}

RealField CyclicLattice::idft_real(std::span<const double> g) const {
  const auto L = static_cast<std::size_t>(size_);
  if (g.size() != L) throw std::invalid_argument("idft: field length does not match lattice");
  RealField out(L);
  for (std::size_t b = 0; b < L; ++b) {
    const long x = label(b);
    double acc = 0.0;
    for (std::size_t a = 0; a < L; ++a) acc += g[a] * phase(label(a), x).real();
    out[b] = acc / static_cast<double>(size_);
  }
  return out;
}

}  // namespace vflip
