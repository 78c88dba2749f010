#pragma once

#include <vector>

namespace vflip {

/// Nodes and weights of a composite rule on [0, t_cut].
struct TimeQuadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
  double panel_width = 0.0;
  double t_cut = 0.0;

  template <class Fn>
  double integrate(Fn&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

/// Composite 4-point Gauss-Legendre on panels of width close to `panel_width`.
TimeQuadrature composite_gauss(double panel_width, double t_cut);

}  // namespace vflip
