#pragma once

#include <cmath>
#include <concepts>

namespace pact {

struct ScalarOptimum {
  double x = 0.0;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi]. Stops
/// once the bracket is narrower than `tolerance`. The endpoints are compared
/// against the interior estimate, so corner optima are returned exactly.
template <std::invocable<double> F>
ScalarOptimum golden_section_maximize(F&& f, double lo, double hi, double tolerance,
                                      int max_iterations = 500) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);

  ScalarOptimum out;
  while (b - a > tolerance && out.iterations < max_iterations) {
    ++out.iterations;
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  out.converged = b - a <= tolerance;

  out.x = 0.5 * (a + b);
  out.value = f(out.x);
  for (double edge : {lo, hi}) {
    const double fe = f(edge);
    if (fe > out.value) {
      out.x = edge;
      out.value = fe;
    }
  }
  return out;
}

/// Bisection for the sign change of a nonincreasing g on [lo, hi], i.e. the
/// maximizer of a concave function with derivative g. Returns lo when
/// g(lo) <= 0 and hi when g(hi) >= 0.
template <std::invocable<double> G>
ScalarOptimum bisect_stationary_point(G&& g, double lo, double hi, double tolerance,
                                      int max_iterations = 500) {
  ScalarOptimum out;
  out.converged = true;
  if (!(g(lo) > 0.0)) {
    out.x = lo;
    return out;
  }
  if (!(g(hi) < 0.0)) {
    out.x = hi;
    return out;
  }
  double a = lo;
  double b = hi;
  while (b - a > tolerance && out.iterations < max_iterations) {
    ++out.iterations;
    const double mid = 0.5 * (a + b);
    if (g(mid) > 0.0)
      a = mid;
    else
      b = mid;
  }
  out.converged = b - a <= tolerance;
  out.x = 0.5 * (a + b);
  return out;
}

}  // namespace pact
