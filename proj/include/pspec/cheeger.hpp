#pragma once

#include "pspec/grid.hpp"

namespace pspec {

struct CheegerEstimate {
  double h = 0.0;
  double best_level = 0.0;
  double cut_perimeter = 0.0;
  double cut_area = 0.0;
  int connectivity_of_cut = 1;
};

// Minimum of perimeter / area over superlevel sets {u^p > t}, t on quantiles of the
// positive values of u^p. Perimeter from the marching-squares contour of u^p at t,
// area from the cell count. Planar only.
CheegerEstimate level_set_sweep(const GridDomain& d, const ScalarField& u, int levels = 128,
                                double p = 1.0);

// Sweep of the first eigenfunction at p_probe. An upper bound on the Cheeger constant.
CheegerEstimate cheeger_constant(const GridDomain& d, double p_probe = 1.2);

// (h / p)^p
double cheeger_lambda_bound(double h, double p);

}  // namespace pspec
