#pragma once

#include <array>
#include <functional>
#include <vector>

#include "pspec/grid.hpp"

namespace pspec {

struct GeometrySummary {
  double area = 0.0;
  double perimeter = 0.0;
  double inradius = 0.0;
  double reduced_inradius = 0.0;
  double circumradius = 0.0;
  int connectivity = 1;
  bool convex = false;
};

// Exact Euclidean distance from every cell center to the nearest cell center whose
// `feature` flag is set (separable lower-envelope transform). Cells outside the array
// are not features. Returns +inf everywhere when there are no features.
std::vector<double> distance_to_features(const Extent& shape, double h,
                                         const std::vector<std::uint8_t>& feature, int dim);

// Distance from each cell center to the nearest false cell center.
std::vector<double> distance_to_complement(const GridDomain& d);

// Largest inscribed radius: max distance to the complement minus h/2.
double inradius(const GridDomain& d);

struct Segment {
  std::array<double, 2> a;
  std::array<double, 2> b;
};

// Marching-squares contour of `values` (2D, row-major, x fastest) at `level`, over
// the dual squares spanned by four adjacent cell centers. A corner counts as "above"
// when value > level. `keep_square(i, j)` filters squares by lower-left corner.
std::vector<Segment> contour_segments(const Extent& shape, double h, const Point& origin,
                                      const std::vector<double>& values, double level,
                                      const std::function<bool(int, int)>& keep_square = {});

double contour_length(const Extent& shape, double h, const std::vector<double>& values,
                      double level, const std::function<bool(int, int)>& keep_square = {});

// Marching-squares length of the mask indicator at level 1/2.
double perimeter(const GridDomain& d);

// 1 + number of bounded components of the complement (8-connected background).
int connectivity(const GridDomain& d);
int connectivity(const Extent& shape, const std::vector<std::uint8_t>& inside);

// Minimum enclosing circle of the true cell centers; returns {cx, cy, radius}.
std::array<double, 3> min_enclosing_circle(const GridDomain& d);

// Mask equals the rasterization of its convex hull up to one cell layer.
bool is_convex(const GridDomain& d);

// Requires dim == 2 (the reduced inradius is planar); throws DimensionUnsupported.
GeometrySummary geometry_summary(const GridDomain& d);

double reduced_inradius(double inradius, double area);

// |B_r(center) \ Omega| by counting lattice cells whose centers lie in the ball and
// not in the mask (cells beyond the array count as outside).
double ball_deficiency(const GridDomain& d, const Point& center, double r);

// Disk of the same area centered at the grid center, same spacing.
GridDomain schwarz_symmetrize(const GridDomain& d);

}  // namespace pspec
