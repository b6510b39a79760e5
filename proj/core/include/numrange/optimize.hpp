#pragma once

#include <cstddef>
#include <functional>

namespace numrange {

struct ScalarMinimum {
  double arg = 0.0;
  double value = 0.0;
};

// Golden-section search on [lo, hi] until the bracket is shorter than tol.
ScalarMinimum golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                              double tol = 1e-11);

// Minimum of a 2 pi periodic function: coarse scan on n points, then
// golden-section refinement inside the bracket around the best sample.
ScalarMinimum periodic_minimize(const std::function<double(double)>& f, std::size_t n,
                                double tol = 1e-11);

}  // namespace numrange
