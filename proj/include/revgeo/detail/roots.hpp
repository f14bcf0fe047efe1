#ifndef REVGEO_DETAIL_ROOTS_HPP
#define REVGEO_DETAIL_ROOTS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "revgeo/error.hpp"

namespace revgeo::detail {

/// Brent's method on a sign-changing bracket [a, b]. Stops when the bracket is
/// narrower than 2*(xtol + 4*eps*|x|) or f vanishes exactly.
template <class F>
double brent(F&& f, double a, double b, double xtol = 1e-14, int max_iter = 200) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw Error(ErrorKind::Domain, "root is not bracketed");
  }
  const double eps = std::numeric_limits<double>::epsilon();
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * eps * std::abs(b) + 0.5 * xtol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : (xm > 0.0 ? tol : -tol);
    fb = f(b);
  }
  return b;
}

/// Bisection to an interval of width xtol; returns the midpoint.
template <class F>
double bisect(F&& f, double a, double b, double xtol, int max_iter = 200) {
  double fa = f(a);
  for (int it = 0; it < max_iter && std::abs(b - a) > xtol; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace revgeo::detail

#endif  // REVGEO_DETAIL_ROOTS_HPP
