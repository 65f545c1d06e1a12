#pragma once

#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace anticonc {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate, summed over panels
};

/// Adaptive 15-point Gauss-Kronrod over consecutive panels [b_k, b_{k+1}].
/// Breakpoints must be sorted; integrable kinks belong on them.
template <class F>
QuadratureResult integrate_panels(F&& f, std::span<const double> breakpoints, double rel_tol = 1e-10,
                                  unsigned max_depth = 15) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  QuadratureResult out;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    const double a = breakpoints[k];
    const double b = breakpoints[k + 1];
    if (!(b > a)) continue;
    double err = 0.0;
    out.value += GK::integrate(f, a, b, max_depth, rel_tol, &err);
    out.error += err;
  }
  return out;
}

/// Panel layout for a density support: geometric refinement near the origin
/// plus any caller-supplied interior breakpoints.
std::vector<double> support_panels(bool half_line, std::span<const double> extra = {});

}  // namespace anticonc
