#pragma once

#include <cmath>

#include "zinf/errors.hpp"

namespace zinf {

/// Bisection on a sign-changing bracket [lo, hi]. Stops when the bracket
/// width drops below rel_tol * max(1, |mid|) or after 400 halvings.
template <class F>
double bisect_root(F&& f, double lo, double hi, double rel_tol = 1e-14) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0))
    throw Error(ErrorKind::NoSolution, "root is not bracketed");
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::fmax(1.0, std::fabs(mid))) return mid;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace zinf
