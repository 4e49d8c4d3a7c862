#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pspec/geometry.hpp"
#include "pspec/grid.hpp"
#include "pspec/shapes.hpp"

namespace pspec {

struct NodalMeasurement {
  double length = 0.0;
  double lambda = 0.0;
  double p = 0.0;
  int contour_segments = 0;
  std::vector<Segment> segments;
};

// (safety * lambda_ball1 / lambda)^(1/p)
double vanishing_ball_radius(double lambda, double p, double lambda_ball1, double safety);

// True iff every ball of radius R centred on a cell and contained in the domain
// holds a zero cell or a sign change of u.
bool check_vanishing(const GridDomain& d, const ScalarField& u, double R);

struct GluedEigenpair {
  double lambda = 0.0;
  ScalarField field;
  GridDomain domain;
  int axis = 0;  // coordinate reflected: 0 mirrors x, 1 mirrors y
};

// Ground state of the half domain beyond a symmetry line, continued by odd reflection.
GluedEigenpair glued_antisymmetric_eigenpair(const ShapeSpec& spec, double p, double h);

// Zero contour of u over dual squares whose four corners lie in the domain.
NodalMeasurement nodal_length(const GridDomain& d, const ScalarField& u);

struct NodalScalingResult {
  double slope = 0.0;
  std::vector<double> scales;
  std::vector<double> lambdas;
  std::vector<double> lengths;
};

// Slope of log(length) against log(lambda) over glued pairs on dilations t * Omega.
NodalScalingResult nodal_scaling_check(const ShapeSpec& spec, double p, const std::vector<double>& scales,
                                       double h = 1.0 / 64.0);

// Rows x, y, segment_id, two per segment.
void write_contour_csv(const NodalMeasurement& m, const std::string& path);

}  // namespace pspec
