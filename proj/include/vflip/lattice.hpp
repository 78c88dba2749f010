#pragma once

// Cyclic lattice of L sites and its dual, with the discrete Fourier transform
//
//   f^(k) = sum_x f(x) exp(-i 2 pi k x),     k = n / L,
//   f(x)  = (1/L) sum_k f^(k) exp(+i 2 pi k x).
//
// Sites and dual points share the same integer labels: for odd L they run over
// -(L-1)/2 .. (L-1)/2, for even L over -L/2+1 .. L/2.  Arrays are stored in that
// order, so array index i corresponds to label i + lowest_label().

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace vflip {

using Complex = std::complex<double>;
using RealField = std::vector<double>;
using ComplexField = std::vector<Complex>;

/// Unique label of the residue class of x modulo L.
long wrap(long x, long L);

class CyclicLattice {
 public:
  explicit CyclicLattice(int size);

  int size() const { return size_; }
  long lowest_label() const { return lowest_; }
  long highest_label() const { return lowest_ + size_ - 1; }

  long label(std::size_t index) const { return lowest_ + static_cast<long>(index); }
  std::size_t index(long label) const {
    return static_cast<std::size_t>(wrap(label, size_) - lowest_);
  }

  std::vector<long> sites() const;
  /// Dual points as integer numerators n, k = n / L.
  std::vector<long> dual() const { return sites(); }
  double wave_number(long n) const { return static_cast<double>(n) / size_; }

  /// Index of the label -x.
  std::size_t mirror(std::size_t i) const { return index(-label(i)); }

  /// exp(-i 2 pi m / L) for the residue m = n*x mod L.
  Complex phase(long n, long x) const;

  ComplexField dft(std::span<const Complex> f) const;
  ComplexField dft(std::span<const double> f) const;
  ComplexField idft(std::span<const Complex> g) const;
  /// Inverse transform of a spectrum known to yield a real field.
  RealField idft_real(std::span<const Complex> g) const;
  RealField idft_real(std::span<const double> g) const;

 private:
  int size_;
  long lowest_;
  std::vector<Complex> roots_;  // exp(-i 2 pi m / L), m = 0..L-1
};

}  // namespace vflip
