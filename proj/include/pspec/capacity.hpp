#pragma once

#include <string>
#include <vector>

#include "pspec/grid.hpp"

namespace pspec {

enum class FarField {
  // u = 0 on the box boundary. Overestimates the whole-space capacity.
  dirichlet,
  // Boundary values continued by the radial decay |x|^{-(n-p)/(p-1)}; exact for
  // radial potentials. Falls back to dirichlet when p >= n.
  asymptotic,
};

struct CapacityOptions {
  double box_factor = 8.0;
  FarField far_field = FarField::asymptotic;
  double growth = 1.2;   // geometric growth of the spacing outside the uniform zone
  int margin_cells = 4;  // uniform cells kept around the set
  double tol = 1e-10;    // relative energy change at which Newton stops
  int max_iter = 200;
};

struct CapacityResult {
  double value = 0.0;
  double p = 0.0;
  int n = 2;
  double box_factor = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

// Discrete p-capacity of the true cells of F (u = 1 there) in a cube of side
// box_factor * diam(F) centred on F. The node lattice coincides with F's cell
// centres near F and coarsens geometrically outside.
CapacityResult p_capacity(const GridDomain& F, double p, const CapacityOptions& opts = {});
CapacityResult p_capacity(const GridDomain& F, double p, int n, double box_factor);

// r^{n-p} w_n (|n-p|/(p-1))^{p-1}, w_n the area of the unit sphere.
double ball_capacity_exact(double r, int n, double p);

// Sharp lower bound on cap_p(F) in terms of |F|; equality for balls. 1 < p < n.
double isocapacity_lower_bound(double volume, int n, double p);

bool is_negligible(double f_cap, double r, int n, double p, double gamma);

enum class RadiusKind { capacity_gamma, lieb_alpha };

struct SearchTraceRow {
  Point center{};
  double r = 0.0;
  double cap = -1.0;  // negative when decided by a comparison ball
  bool negligible = false;
};

struct RadiusSearchResult {
  double radius = 0.0;
  Point center{};
  RadiusKind kind = RadiusKind::capacity_gamma;
  double parameter = 0.0;
  int capacity_solves = 0;
  std::vector<SearchTraceRow> trace;
};

struct RadiusSearchOptions {
  CapacityOptions capacity;
  bool record_trace = false;
};

// Largest r such that some closed ball B_r centred on the stride-2 lattice meets the
// complement of d in a (p, gamma)-negligible set. Radii resolved to h/2.
RadiusSearchResult capacity_radius(const GridDomain& d, double gamma, double p, int n,
                                   const RadiusSearchOptions& opts = {});

// Largest r such that some ball centred on the stride-2 lattice has
// |B_r \ Omega| <= alpha |B_r| (lattice count). Exact over radii for each centre.
RadiusSearchResult lieb_radius(const GridDomain& d, double alpha);

// lambda(B_1) |B_1|^{-p/n} (alpha^{-1/n} - 1)^p
double lieb_sigma(int n, double p, double alpha, double lambda_ball1);

// n ln n + n ln ln n + 5n
double covering_multiplicity_bound(int n);

double unit_ball_volume(int n);
double unit_sphere_area(int n);

// Lattice cells within distance r of `center` that are not inside d, on a local
// array aligned with d's lattice. Returns false when that set is empty.
bool ball_complement(const GridDomain& d, const Point& center, double r, GridDomain& out);

void write_trace_csv(const RadiusSearchResult& r, const std::string& path);

}  // namespace pspec
