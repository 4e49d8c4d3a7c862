#pragma once

#include <string>
#include <variant>
#include <vector>

#include "pspec/grid.hpp"

namespace pspec {

namespace shape {

struct Disk {
  double r = 1.0;
};
struct Square {
  double a = 1.0;
};
struct Rectangle {
  double a = 2.0;  // extent along x
  double b = 1.0;  // extent along y
};
struct Annulus {
  double r_in = 0.5;
  double r_out = 1.0;
};
// Square of side `a` with a `notch` x `notch` square cut from the upper-right corner.
struct EllShape {
  double a = 1.0;
  double notch = 0.5;
};
struct Polygon {
  std::vector<std::array<double, 2>> vertices;
};
// Disk with `n_spikes` radial slits of width `spike_width` cut inward from the
// rim to depth `spike_depth`.
struct SpikyDisk {
  double r = 1.0;
  int n_spikes = 8;
  double spike_width = 0.06;
  double spike_depth = 0.75;
};
struct Hole {
  double x = 0.0;
  double y = 0.0;
  double r = 0.1;
};
struct DiskWithHoles {
  double r = 1.0;
  std::vector<Hole> holes;
};

}  // namespace shape

using ShapeVariant = std::variant<shape::Disk, shape::Square, shape::Rectangle, shape::Annulus,
                                  shape::EllShape, shape::Polygon, shape::SpikyDisk,
                                  shape::DiskWithHoles>;

struct ShapeSpec {
  ShapeVariant variant;
  std::string label;  // empty means "use the variant name"

  std::string name() const;
  std::string display_label() const { return label.empty() ? name() : label; }
};

// Throws Error(InvalidSpec) for non-positive parameters, r_in >= r_out, holes that
// leave the disk or overlap, and self-intersecting polygons.
void validate(const ShapeSpec& spec);

// Same shape dilated by factor t about the origin.
ShapeSpec scaled(const ShapeSpec& spec, double t);

// Cell-center inclusion on the lattice {k*h}; the array covers the shape's bounding
// box plus a two-cell false margin. Throws FeatureTooThin when the thinnest feature
// spans fewer than three cells.
GridDomain rasterize_shape(const ShapeSpec& spec, double h);

// Closed ball of radius r about `center` in dimension 2 or 3, on the lattice {k*h}.
GridDomain rasterize_ball(const Point& center, double r, double h, int dim);

bool contains(const ShapeSpec& spec, double x, double y);

// The eight built-in test domains: disk, square, rectangle 2x1, annulus, L-shape,
// disk with one hole, disk with two holes, spiky disk.
std::vector<ShapeSpec> standard_catalog();

// Lookup by catalog label or bare variant name with default parameters.
ShapeSpec shape_by_name(const std::string& name);

}  // namespace pspec
