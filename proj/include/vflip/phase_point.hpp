#pragma once

#include <vector>

#include "vflip/model.hpp"

namespace vflip {

/// Positions q and momenta p of the L particles, indexed like the lattice sites.
struct PhasePoint {
  RealField q;
  RealField p;

  static PhasePoint zeros(int L) {
    return {RealField(static_cast<std::size_t>(L), 0.0), RealField(static_cast<std::size_t>(L), 0.0)};
  }
  std::size_t size() const { return p.size(); }
};

/// Coupling matrix row Phi_L(z) for z in Lambda_L, built from the periodized table
/// sum_m Phi(z + m L).  Its transform is exactly Phi^(n / L) on the dual grid.
RealField periodic_coupling(const InteractionModel& model);

/// H_L(X) = 1/2 sum_x p_x^2 + 1/2 sum_{x,x'} q_x' q_x Phi_L(x' - x).
double energy(const InteractionModel& model, const PhasePoint& X);

}  // namespace vflip
