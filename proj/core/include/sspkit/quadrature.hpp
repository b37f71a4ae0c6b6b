#pragma once

#include <cmath>
#include <sstream>

#include "sspkit/errors.hpp"

namespace sspkit {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_depth = 40;
  // Intervals narrower than this are accepted as is. Keeps a jump in a
  // piecewise constant integrand from exhausting the depth.
  double min_width = 1e-12;
};

namespace detail {

template <class F>
double simpson_step(const F& f, double a, double fa, double m, double fm, double b, double fb,
                    double whole, double eps, int depth, const QuadratureOptions& opts) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (std::abs(diff) <= 15.0 * eps || b - a <= opts.min_width) {
    return left + right + diff / 15.0;
  }
  if (depth >= opts.max_depth) {
    std::ostringstream msg;
    msg << "adaptive Simpson did not converge on [" << a << ", " << b << "] within depth "
        << opts.max_depth;
    throw NumericError(msg.str());
  }
  return simpson_step(f, a, fa, lm, flm, m, fm, left, 0.5 * eps, depth + 1, opts) +
         simpson_step(f, m, fm, rm, frm, b, fb, right, 0.5 * eps, depth + 1, opts);
}

}  // namespace detail

/// Signed integral of f over [a, b] by recursive adaptive Simpson with
/// Richardson correction. Throws NumericError when max_depth is exhausted.
template <class F>
double adaptive_simpson(const F& f, double a, double b, const QuadratureOptions& opts = {}) {
  if (a == b) return 0.0;
  if (a > b) return -adaptive_simpson(f, b, a, opts);
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, fa, m, fm, b, fb, whole, opts.abs_tol, 0, opts);
}

}  // namespace sspkit
