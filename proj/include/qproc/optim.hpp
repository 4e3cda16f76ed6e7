#pragma once

// Gradient-free local optimizers used by the constrained searches: a
// coordinate pattern search with a caller-supplied feasibility projection,
// and golden-section refinement for one-dimensional problems.  Both are
// deterministic.

#include "qproc/common.hpp"

#include <functional>
#include <limits>
#include <vector>

namespace qproc {

// Maximizes `objective` starting from `x0`.  After every trial move the
// point is passed through `project`, which must return a feasible point (or
// the point unchanged if feasibility is handled inside the objective by
// returning -infinity).  The step shrinks from `step0` by halving until
// `step_min`.
inline std::vector<double> pattern_search_max(
    std::vector<double> x0,
    const std::function<double(const std::vector<double>&)>& objective,
    const std::function<void(std::vector<double>&)>& project,
    double step0 = 0.25, double step_min = 1e-9) {
  project(x0);
  double best = objective(x0);
  for (double step = step0; step >= step_min; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t i = 0; i < x0.size(); ++i) {
        for (double sign : {+1.0, -1.0}) {
          std::vector<double> trial = x0;
          trial[i] += sign * step;
          project(trial);
          const double val = objective(trial);
          if (val > best + 1e-15) {
            best = val;
            x0 = std::move(trial);
            improved = true;
          }
        }
      }
    }
  }
  return x0;
}

// Golden-section maximization of a unimodal function on [lo, hi].
inline double golden_section_max(const std::function<double(double)>& f,
                                 double lo, double hi, double tol = 1e-10) {
  const double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
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
  return 0.5 * (a + b);
}

}  // namespace qproc
