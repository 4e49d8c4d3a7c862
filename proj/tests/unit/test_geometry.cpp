#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pspec/error.hpp"
#include "pspec/geometry.hpp"
#include "pspec/shapes.hpp"

using namespace pspec;

namespace {

GridDomain raster(const char* name, double h = 1.0 / 64.0) { return rasterize_shape(shape_by_name(name), h); }

}  // namespace

TEST_CASE("unit square raster") {
  const GridDomain d = raster("square", 1.0 / 128.0);
  CHECK(d.dim() == 2);
  // Centers k*h strictly inside (-1/2, 1/2): 127 per row.
  CHECK(d.count() == 127u * 127u);
  const GeometrySummary g = geometry_summary(d);
  CHECK(g.inradius == doctest::Approx(0.5).epsilon(0.01));
  CHECK(g.perimeter == doctest::Approx(4.0).epsilon(0.02));
  CHECK(g.connectivity == 1);
  CHECK(g.convex);
}

TEST_CASE("catalog connectivity and convexity") {
  struct Row {
    const char* name;
    int k;
    bool convex;
  };
  const Row rows[] = {{"disk", 1, true},           {"square", 1, true},
                      {"rectangle", 1, true},      {"annulus", 2, false},
                      {"ell_shape", 1, false},     {"disk_with_hole", 2, false},
                      {"disk_with_two_holes", 3, false}, {"spiky_disk", 1, false}};
  for (const auto& r : rows) {
    CAPTURE(r.name);
    const GeometrySummary g = geometry_summary(raster(r.name));
    CHECK(g.connectivity == r.k);
    CHECK(g.convex == r.convex);
  }
}

TEST_CASE("disk area, perimeter and radii") {
  const GeometrySummary g = geometry_summary(raster("disk", 1.0 / 128.0));
  CHECK(g.area == doctest::Approx(std::numbers::pi).epsilon(0.01));
  // Marching squares on a binary mask cuts corners at 45 degrees: about 5% long on a circle.
  CHECK(g.perimeter == doctest::Approx(2 * std::numbers::pi).epsilon(0.06));
  CHECK(g.inradius == doctest::Approx(1.0).epsilon(0.01));
  CHECK(g.circumradius == doctest::Approx(1.0).epsilon(0.01));
  // rho / (1 + pi rho^2 / |Omega|) = 1/2 for the disk.
  CHECK(g.reduced_inradius == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("reduced inradius lies strictly between rho/2 and rho") {
  for (const auto& spec : standard_catalog()) {
    CAPTURE(spec.display_label());
    const GeometrySummary g = geometry_summary(rasterize_shape(spec, 1.0 / 64.0));
    CHECK(g.reduced_inradius > g.inradius / 2);
    CHECK(g.reduced_inradius < g.inradius);
    CHECK(g.inradius <= g.circumradius);
  }
  CHECK(reduced_inradius(0.5, 1.0) == doctest::Approx(0.5 / (1 + std::numbers::pi / 4)));
}

TEST_CASE("distance transform agrees with brute force") {
  std::mt19937 rng(7);
  std::bernoulli_distribution coin(0.05);
  const Extent shape{23, 17, 1};
  const double h = 0.1;
  std::vector<std::uint8_t> feature(shape[0] * shape[1]);
  for (auto& f : feature) f = coin(rng);
  feature[5] = 1;
  const auto dt = distance_to_features(shape, h, feature, 2);
  for (int j = 0; j < shape[1]; ++j) {
    for (int i = 0; i < shape[0]; ++i) {
      double best = INFINITY;
      for (int jj = 0; jj < shape[1]; ++jj)
        for (int ii = 0; ii < shape[0]; ++ii)
          if (feature[jj * shape[0] + ii]) best = std::min(best, h * std::hypot(i - ii, j - jj));
      CHECK(dt[j * shape[0] + i] == doctest::Approx(best));
    }
  }
}

TEST_CASE("inradius scales with dilation") {
  const ShapeSpec ell = shape_by_name("ell_shape");
  const double r1 = inradius(rasterize_shape(ell, 1.0 / 64.0));
  const double r2 = inradius(rasterize_shape(scaled(ell, 2.0), 1.0 / 32.0));
  CHECK(r2 == doctest::Approx(2.0 * r1).epsilon(1e-9));
}

TEST_CASE("schwarz symmetrization keeps the area") {
  const GridDomain d = raster("ell_shape");
  const GridDomain s = schwarz_symmetrize(d);
  CHECK(static_cast<double>(s.count()) == doctest::Approx(static_cast<double>(d.count())).epsilon(0.02));
  CHECK(is_convex(s));
}

TEST_CASE("ball deficiency counts cells outside") {
  const GridDomain d = raster("square");
  CHECK(ball_deficiency(d, {0.0, 0.0, 0.0}, 0.3) == 0.0);
  // A radius-1 ball about the center sticks out by pi - 1.
  CHECK(ball_deficiency(d, {0.0, 0.0, 0.0}, 1.0) == doctest::Approx(std::numbers::pi - 1.0).epsilon(0.03));
}

TEST_CASE("min enclosing circle of the rectangle") {
  const auto c = min_enclosing_circle(raster("rectangle"));
  CHECK(c[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(c[2] == doctest::Approx(std::hypot(1.0, 0.5)).epsilon(0.02));
}

TEST_CASE("shape validation") {
  CHECK_THROWS_AS(validate(ShapeSpec{shape::Annulus{1.0, 0.5}, ""}), Error);
  CHECK_THROWS_AS(validate(ShapeSpec{shape::Disk{-1.0}, ""}), Error);
  CHECK_THROWS_AS(validate(ShapeSpec{shape::DiskWithHoles{1.0, {{0.9, 0.0, 0.3}}}, ""}), Error);
  CHECK_THROWS_AS(validate(ShapeSpec{shape::Polygon{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}}, ""}), Error);
  try {
    rasterize_shape(ShapeSpec{shape::Rectangle{1.0, 0.05}, ""}, 1.0 / 32.0);
    FAIL("expected FeatureTooThin");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FeatureTooThin);
  }
}

TEST_CASE("perimeter of a dilated shape scales linearly") {
  const ShapeSpec sq = shape_by_name("square");
  const double p1 = perimeter(rasterize_shape(sq, 1.0 / 64.0));
  const double p3 = perimeter(rasterize_shape(scaled(sq, 3.0), 3.0 / 64.0));
  CHECK(p3 == doctest::Approx(3.0 * p1).epsilon(1e-9));
}

TEST_CASE("summaries are stable under refinement") {
  for (const auto& spec : standard_catalog()) {
    CAPTURE(spec.display_label());
    const double h = 1.0 / 32.0;
    const GeometrySummary a = geometry_summary(rasterize_shape(spec, h));
    const GeometrySummary b = geometry_summary(rasterize_shape(spec, h / 2));
    CHECK(std::abs(a.area - b.area) < 3 * h);
    CHECK(std::abs(a.perimeter - b.perimeter) < 3 * h);
    CHECK(std::abs(a.inradius - b.inradius) < 3 * h);
    CHECK(std::abs(a.circumradius - b.circumradius) < 3 * h);
    // Isoperimetric sanity.
    CHECK(b.perimeter * b.perimeter >= 0.95 * 4 * std::numbers::pi * b.area);
    CHECK(std::numbers::pi * b.inradius * b.inradius <= b.area);
    CHECK(b.area <= std::numbers::pi * b.circumradius * b.circumradius);
  }
}

TEST_CASE("inclusion monotonicity of area and inradius") {
  const GridDomain small = raster("ell_shape");
  const GridDomain big = raster("square");
  REQUIRE(small.shape() == big.shape());
  for (std::size_t i = 0; i < small.size(); ++i)
    if (small.inside(i)) REQUIRE(big.inside(i));
  CHECK(inradius(small) <= inradius(big));
  CHECK(small.count() <= big.count());
}
