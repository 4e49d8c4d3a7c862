#include <cmath>

#include "../oracles.hpp"
#include "doctest.h"
#include "pspec/eigensolver.hpp"
#include "pspec/error.hpp"
#include "pspec/nodal.hpp"

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

TEST_CASE("glued square pair") {
  const GluedEigenpair g = glued_antisymmetric_eigenpair(shape_by_name("square"), 2.0, 1.0 / 64.0);
  CHECK(g.lambda == doctest::Approx(oracle::glued_square_lambda2()).epsilon(0.02));
  // Odd under the reflection.
  const GridDomain& d = g.domain;
  for (int j = 0; j < d.ny(); ++j)
    for (int i = 0; i < d.nx(); ++i) {
      const int mi = g.axis == 0 ? d.nx() - 1 - i : i;
      const int mj = g.axis == 1 ? d.ny() - 1 - j : j;
      CHECK(g.field.values[d.index(i, j)] == doctest::Approx(-g.field.values[d.index(mi, mj)]));
    }
  const NodalMeasurement m = nodal_length(d, g.field);
  CHECK(m.length == doctest::Approx(1.0).epsilon(0.04));
  CHECK(m.contour_segments > 0);
}

TEST_CASE("glued disk pair") {
  const GluedEigenpair g = glued_antisymmetric_eigenpair(shape_by_name("disk"), 2.0, 1.0 / 64.0);
  CHECK(g.lambda == doctest::Approx(oracle::glued_disk_lambda2()).epsilon(0.03));
  CHECK(nodal_length(g.domain, g.field).length == doctest::Approx(2.0).epsilon(0.04));
}

TEST_CASE("vanishing balls") {
  const double h = 1.0 / 64.0;
  const ShapeSpec sq = shape_by_name("square");
  const double lb = solve_first_eigen(rasterize_shape(shape_by_name("disk"), h), 2.0).lambda;
  const GluedEigenpair g = glued_antisymmetric_eigenpair(sq, 2.0, h);
  const double R = vanishing_ball_radius(g.lambda, 2.0, lb, 1.05);
  CHECK(R == doctest::Approx(std::sqrt(1.05 * lb / g.lambda)));
  CHECK(vanishing_ball_radius(100.0, 2.0, 5.7832, 1.05) == doctest::Approx(0.2464).epsilon(1e-3));
  CHECK(vanishing_ball_radius(2.0 * g.lambda, 2.0, lb, 1.05) == doctest::Approx(R / std::sqrt(2.0)));
  CHECK(kind_of([&] { vanishing_ball_radius(g.lambda, 2.0, lb, 0.5); }) == ErrorKind::DomainError);
  CHECK(check_vanishing(g.domain, g.field, R));
  const GridDomain d = rasterize_shape(sq, h);
  const EigenResult ground = solve_first_eigen(d, 2.0);
  CHECK_FALSE(check_vanishing(d, ground.field, inradius(d) / 2.0));
  CHECK(kind_of([&] { check_vanishing(d, ground.field, 5.0); }) == ErrorKind::NoInteriorBall);
}

TEST_CASE("nodal errors") {
  const double h = 1.0 / 32.0;
  const GridDomain d = rasterize_shape(shape_by_name("square"), h);
  const EigenResult ground = solve_first_eigen(d, 2.0);
  CHECK(kind_of([&] { nodal_length(d, ground.field); }) == ErrorKind::NoSignChange);
  CHECK(kind_of([&] { glued_antisymmetric_eigenpair(shape_by_name("ell_shape"), 2.0, h); }) ==
        ErrorKind::NotSymmetric);
  CHECK(kind_of([&] { nodal_scaling_check(shape_by_name("square"), 2.0, {1.0, 2.0}, h); }) ==
        ErrorKind::InvalidConfig);
}

TEST_CASE("nodal length scaling on glued squares") {
  const NodalScalingResult r = nodal_scaling_check(shape_by_name("square"), 2.0, {0.5, 1.0, 2.0}, 1.0 / 32.0);
  CHECK(r.scales.size() == 3);
  CHECK(r.slope == doctest::Approx(-0.5).epsilon(0.06));
  for (std::size_t i = 1; i < r.scales.size(); ++i) {
    CHECK(r.lambdas[i] < r.lambdas[i - 1]);
    CHECK(r.lengths[i] > r.lengths[i - 1]);
  }
}
