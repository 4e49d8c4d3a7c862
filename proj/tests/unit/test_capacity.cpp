#include <cmath>
#include <numbers>

#include "../oracles.hpp"
#include "doctest.h"
#include "pspec/capacity.hpp"
#include "pspec/error.hpp"
#include "pspec/shapes.hpp"

using namespace pspec;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("closed-form ball capacity") {
  CHECK(ball_capacity_exact(1.0, 3, 2.0) == doctest::Approx(4 * std::numbers::pi));
  CHECK(ball_capacity_exact(1.0, 2, 1.5) == doctest::Approx(2 * std::numbers::pi));
  for (double r : {0.25, 1.0, 3.0})
    for (double p : {1.2, 1.5, 1.8}) CHECK(ball_capacity_exact(r, 2, p) == doctest::Approx(oracle::ball_capacity(r, 2, p)));
  CHECK(ball_capacity_exact(2.0, 3, 2.0) == doctest::Approx(2.0 * ball_capacity_exact(1.0, 3, 2.0)));
  CHECK(kind_of([] { ball_capacity_exact(1.0, 2, 2.0); }) == ErrorKind::ConformalCase);
}

TEST_CASE("isocapacity bound is attained by balls") {
  for (int n : {2, 3})
    for (double p : {1.2, 1.5, 1.9}) {
      if (p >= n) continue;
      for (double r : {0.5, 2.0}) {
        const double vol = unit_ball_volume(n) * std::pow(r, n);
        CHECK(isocapacity_lower_bound(vol, n, p) == doctest::Approx(ball_capacity_exact(r, n, p)));
      }
    }
  CHECK(kind_of([] { isocapacity_lower_bound(1.0, 2, 2.5); }) == ErrorKind::ExponentOutOfRange);
}

TEST_CASE("unit ball and sphere measures") {
  CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
  CHECK(unit_sphere_area(3) == doctest::Approx(4.0 * std::numbers::pi));
  CHECK(covering_multiplicity_bound(2) == doctest::Approx(2 * std::log(2.0) + 2 * std::log(std::log(2.0)) + 10));
}

TEST_CASE("grid capacity of the unit disk at p = 1.5") {
  const GridDomain F = rasterize_shape(shape_by_name("disk"), 1.0 / 32.0);
  const CapacityResult c = p_capacity(F, 1.5, 2, 8.0);
  CHECK(c.value == doctest::Approx(2 * std::numbers::pi).epsilon(0.02));
  CHECK(c.value >= 0.95 * isocapacity_lower_bound(F.count() * F.cell_volume(), 2, 1.5));
}

TEST_CASE("dirichlet box overestimates and decays with the box") {
  const GridDomain F = rasterize_shape(shape_by_name("disk"), 1.0 / 16.0);
  CapacityOptions o;
  o.far_field = FarField::dirichlet;
  double last = INFINITY;
  for (double bf : {4.0, 8.0, 16.0}) {
    o.box_factor = bf;
    const double c = p_capacity(F, 1.5, o).value;
    CHECK(c < last);
    last = c;
  }
  o.far_field = FarField::asymptotic;
  o.box_factor = 16.0;
  CHECK(p_capacity(F, 1.5, o).value < last);
}

TEST_CASE("capacity is monotone under inclusion and scales like r^{n-p}") {
  const double h = 1.0 / 16.0;
  const double small = p_capacity(rasterize_shape(shape_by_name("square"), h), 1.5).value;
  const double big = p_capacity(rasterize_shape(shape_by_name("disk"), h), 1.5).value;
  CHECK(small < big);
  const double twice = p_capacity(rasterize_shape(scaled(shape_by_name("square"), 2.0), 2.0 * h), 1.5).value;
  CHECK(twice == doctest::Approx(std::sqrt(2.0) * small).epsilon(1e-6));
}

TEST_CASE("capacity input errors") {
  const GridDomain F = rasterize_shape(shape_by_name("disk"), 1.0 / 8.0);
  CHECK(kind_of([&] { p_capacity(F, 1.0); }) == ErrorKind::InvalidExponent);
  CHECK(kind_of([&] { p_capacity(F, 1.5, 3, 8.0); }) == ErrorKind::DimensionUnsupported);
  CHECK(kind_of([&] { capacity_radius(F, 0.5, 2.5, 2); }) == ErrorKind::ExponentOutOfRange);
  CHECK(kind_of([&] { is_negligible(1.0, 1.0, 2, 1.5, 1.5); }) == ErrorKind::DomainError);
}

TEST_CASE("negligibility threshold") {
  const double ball = ball_capacity_exact(1.0, 2, 1.5);
  CHECK(is_negligible(0.49 * ball, 1.0, 2, 1.5, 0.5));
  CHECK_FALSE(is_negligible(0.51 * ball, 1.0, 2, 1.5, 0.5));
}

TEST_CASE("ball complement on a lattice") {
  const GridDomain d = rasterize_shape(shape_by_name("square"), 1.0 / 16.0);
  GridDomain out;
  CHECK_FALSE(ball_complement(d, {0.0, 0.0, 0.0}, 0.4, out));
  REQUIRE(ball_complement(d, {0.0, 0.0, 0.0}, 0.6, out));
  CHECK(out.count() > 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!out.inside(i)) continue;
    const Point c = out.center(i);
    CHECK(std::hypot(c[0], c[1]) <= 0.6 + 1e-12);
    CHECK(std::max(std::abs(c[0]), std::abs(c[1])) >= 0.5 - 1e-12);
  }
}

TEST_CASE("lieb radius of the unit disk") {
  const GridDomain d = rasterize_shape(shape_by_name("disk"), 1.0 / 64.0);
  const RadiusSearchResult r = lieb_radius(d, 0.5);
  // |B_r \ D| = |B_r| / 2 for a centered ball when r = sqrt(2).
  CHECK(r.radius == doctest::Approx(std::sqrt(2.0)).epsilon(0.03));
  CHECK(r.kind == RadiusKind::lieb_alpha);
  // Smaller alpha tolerates less overhang.
  CHECK(lieb_radius(d, 0.1).radius < r.radius);
}

TEST_CASE("lieb sigma") {
  const double lb = oracle::disk_lambda2();
  CHECK(lieb_sigma(2, 2.0, 0.25, lb) == doctest::Approx(lb / std::numbers::pi));
  CHECK(lieb_sigma(2, 2.0, 0.1, lb) > lieb_sigma(2, 2.0, 0.5, lb));
}

TEST_CASE("capacity radius of the unit square") {
  const GridDomain d = rasterize_shape(shape_by_name("square"), 1.0 / 16.0);
  const RadiusSearchResult r = capacity_radius(d, 0.5, 1.5, 2);
  CHECK(r.kind == RadiusKind::capacity_gamma);
  // At least the inradius, well below the circumradius.
  CHECK(r.radius >= 0.5 - d.h());
  CHECK(r.radius < std::sqrt(0.5));
  CHECK(lieb_radius(d, 0.0625).radius >= r.radius - 2 * d.h());
}
