#pragma once

#include <functional>
#include <span>

namespace stcmac {

struct QuadratureOptions {
  double abs_tol = 1e-12;
  int max_depth = 48;
};

// Adaptive Simpson with Richardson correction. Throws NumericError if a
// sub-interval hits max_depth without meeting its share of the tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& opts = {});

// Integrates over [a, b] split at every point of `splits` strictly inside it.
// The tolerance is shared across pieces in proportion to their length.
double integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> splits, const QuadratureOptions& opts = {});

}  // namespace stcmac
