#include "vflip/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <stdexcept>

namespace vflip {

TimeQuadrature composite_gauss(double panel_width, double t_cut) {
  if (!(panel_width > 0.0) || !(t_cut > 0.0))
    throw std::invalid_argument("composite_gauss: panel width and horizon must be positive");
  using Rule = boost::math::quadrature::gauss<double, 4>;
  const auto& abscissa = Rule::abscissa();
  const auto& weight = Rule::weights();

  const auto panels = static_cast<std::size_t>(std::ceil(t_cut / panel_width));
  const double h = t_cut / static_cast<double>(panels);
  TimeQuadrature q;
  q.panel_width = h;
  q.t_cut = t_cut;
  q.nodes.reserve(panels * 4);
  q.weights.reserve(panels * 4);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = (static_cast<double>(p) + 0.5) * h;
    // Four points: abscissa lists the two nonnegative nodes.
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
      const double offset = 0.5 * h * abscissa[i];
      q.nodes.push_back(mid - offset);
      q.weights.push_back(0.5 * h * weight[i]);
      q.nodes.push_back(mid + offset);
      q.weights.push_back(0.5 * h * weight[i]);
    }
  }
  return q;
}

}  // namespace vflip
