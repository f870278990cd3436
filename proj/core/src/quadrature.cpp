#include "stcmac/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "stcmac/error.hpp"

namespace stcmac {
namespace {

struct Simpson {
  const std::function<double(double)>& f;
  int max_depth;
  // Error below this is accepted at max depth (square-root kinks never meet the halved tolerance).
  double negligible;

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) const {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol || (b - a) <= 1e-15 * std::max(1.0, std::abs(a))) {
      return left + right + delta / 15.0;
    }
    if (depth >= max_depth) {
      if (std::abs(delta) / 15.0 <= negligible) return left + right + delta / 15.0;
      std::ostringstream msg;
      msg << "adaptive_simpson: no convergence on [" << a << ", " << b << "], error estimate "
          << std::abs(delta) / 15.0 << " > tolerance " << tol;
      throw NumericError(msg.str());
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, const QuadratureOptions& opts) {
  if (a == b) return 0.0;
  if (a > b) return -adaptive_simpson(f, b, a, opts);
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  // Start one level down so a symmetric integrand cannot fool the first estimate.
  const Simpson s{f, opts.max_depth, 1e-6 * opts.abs_tol};
  const double ml = 0.5 * (a + m);
  const double mr = 0.5 * (m + b);
  const double fml = f(ml);
  const double fmr = f(mr);
  const double left = (m - a) / 6.0 * (fa + 4.0 * fml + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * fmr + fb);
  return s.recurse(a, m, fa, fml, fm, left, 0.5 * opts.abs_tol, 1) +
         s.recurse(m, b, fm, fmr, fb, right, 0.5 * opts.abs_tol, 1);
}

double integrate_piecewise(const std::function<double(double)>& f, double a, double b, std::span<const double> splits,
                           const QuadratureOptions& opts) {
  if (a >= b) return 0.0;
  std::vector<double> nodes{a};
  for (double s : splits) {
    if (s > a && s < b) nodes.push_back(s);
  }
  nodes.push_back(b);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    QuadratureOptions piece = opts;
    piece.abs_tol = opts.abs_tol * (nodes[i + 1] - nodes[i]) / (b - a);
    total += adaptive_simpson(f, nodes[i], nodes[i + 1], piece);
  }
  return total;
}

}  // namespace stcmac
