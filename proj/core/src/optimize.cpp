#include "numrange/optimize.hpp"

#include <cmath>

#include "numrange/linalg.hpp"

namespace numrange {

ScalarMinimum golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                              double tol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  ScalarMinimum best{fc <= fd ? c : d, fc <= fd ? fc : fd};
  for (double t : {lo, hi}) {
    const double v = f(t);
    if (v < best.value) best = {t, v};
  }
  return best;
}

ScalarMinimum periodic_minimize(const std::function<double(double)>& f, std::size_t n,
                                double tol) {
  const double step = kTwoPi / static_cast<double>(n);
  std::size_t best = 0;
  double best_value = f(0.0);
  for (std::size_t j = 1; j < n; ++j) {
    const double v = f(step * static_cast<double>(j));
    if (v < best_value) {
      best_value = v;
      best = j;
    }
  }
  const double t = step * static_cast<double>(best);
  ScalarMinimum m = golden_minimize(f, t - step, t + step, tol);
  if (best_value < m.value) m = {t, best_value};
  m.arg = wrap_angle(m.arg);
  return m;
}

}  // namespace numrange
