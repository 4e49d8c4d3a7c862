#include "pspec/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "pspec/eigensolver.hpp"
#include "pspec/error.hpp"

namespace pspec {

double vanishing_ball_radius(double lambda, double p, double lambda_ball1, double safety) {
  if (!(lambda > 0.0) || !(lambda_ball1 > 0.0)) throw Error(ErrorKind::DomainError, "eigenvalues must be positive");
  if (!(safety > 1.0)) throw Error(ErrorKind::DomainError, "safety must exceed 1");
  return std::pow(safety * lambda_ball1 / lambda, 1.0 / p);
}

bool check_vanishing(const GridDomain& d, const ScalarField& u, double R) {
  const double h = d.h();
  if (!(R > 2.0 * h)) throw Error(ErrorKind::DomainError, "radius must exceed two cells");
  if (u.values.size() != d.size()) throw Error(ErrorKind::InvalidDomain, "field does not match domain");
  double umax = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.inside(i)) umax = std::max(umax, std::abs(u.values[i]));
  std::vector<std::uint8_t> zero(d.size(), 0);
  for (std::size_t idx = 0; idx < d.size(); ++idx) {
    if (!d.inside(idx)) continue;
    const double v = u.values[idx];
    bool flag = std::abs(v) < 1e-9 * umax;
    const auto c = d.coords(idx);
    for (int a = 0; a < d.dim() && !flag; ++a)
      for (int s : {-1, 1}) {
        auto n = c;
        n[a] += s;
        if (d.inside(n[0], n[1], n[2]) && v * u.values[d.index(n[0], n[1], n[2])] < 0.0) flag = true;
      }
    zero[idx] = flag ? 1 : 0;
  }
  const auto to_zero = distance_to_features(d.shape(), h, zero, d.dim());
  const auto to_outside = distance_to_complement(d);
  bool any_center = false;
  for (std::size_t idx = 0; idx < d.size(); ++idx) {
    if (!d.inside(idx) || to_outside[idx] - 0.5 * h < R) continue;
    any_center = true;
    if (to_zero[idx] > R) return false;
  }
  if (!any_center) throw Error(ErrorKind::NoInteriorBall, "no ball of this radius fits in the domain");
  return true;
}

GluedEigenpair glued_antisymmetric_eigenpair(const ShapeSpec& spec, double p, double h) {
  GluedEigenpair out;
  out.domain = rasterize_shape(spec, h);
  const GridDomain& d = out.domain;
  if (d.dim() != 2) throw Error(ErrorKind::DimensionUnsupported, "glued construction is planar");
  int axis = -1;
  for (int a = 0; a < 2 && axis < 0; ++a)
    if (d.shape()[a] % 2 == 1 && is_mirror_symmetric(d, a)) axis = a;
  if (axis < 0) throw Error(ErrorKind::NotSymmetric, spec.display_label() + " has no mirror line on the grid");
  out.axis = axis;
  const int mid = (d.shape()[axis] - 1) / 2;

  GridDomain half = GridDomain::blank(2, d.shape(), h, d.origin());
  for (std::size_t idx = 0; idx < d.size(); ++idx)
    if (d.inside(idx) && d.coords(idx)[axis] > mid) half.set(idx, true);
  half.validate();
  const EigenResult r = solve_first_eigen(half, p);
  out.lambda = r.lambda;
  out.field = ScalarField::zeros(d);
  for (std::size_t idx = 0; idx < d.size(); ++idx) {
    if (!d.inside(idx)) continue;
    auto c = d.coords(idx);
    if (c[axis] > mid) {
      out.field.values[idx] = r.field.values[idx];
    } else if (c[axis] < mid) {
      c[axis] = 2 * mid - c[axis];
      out.field.values[idx] = -r.field.values[d.index(c[0], c[1], c[2])];
    }
  }
  return out;
}

NodalMeasurement nodal_length(const GridDomain& d, const ScalarField& u) {
  if (d.dim() != 2) throw Error(ErrorKind::DimensionUnsupported, "nodal length is planar");
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!d.inside(i)) continue;
    pos = pos || u.values[i] > 0.0;
    neg = neg || u.values[i] < 0.0;
  }
  if (!pos || !neg) throw Error(ErrorKind::NoSignChange, "field does not change sign");
  NodalMeasurement m;
  m.segments = contour_segments(d.shape(), d.h(), d.origin(), u.values, 0.0, [&](int i, int j) {
    return d.inside(i, j) && d.inside(i + 1, j) && d.inside(i, j + 1) && d.inside(i + 1, j + 1);
  });
  for (const auto& s : m.segments) m.length += std::hypot(s.b[0] - s.a[0], s.b[1] - s.a[1]);
  m.contour_segments = static_cast<int>(m.segments.size());
  return m;
}

NodalScalingResult nodal_scaling_check(const ShapeSpec& spec, double p, const std::vector<double>& scales, double h) {
  if (scales.size() < 3) throw Error(ErrorKind::InvalidConfig, "nodal scaling needs at least three scales");
  NodalScalingResult res;
  res.scales = scales;
  for (double t : scales) {
    const GluedEigenpair g = glued_antisymmetric_eigenpair(scaled(spec, t), p, h);
    res.lambdas.push_back(g.lambda);
    res.lengths.push_back(nodal_length(g.domain, g.field).length);
  }
  // Least-squares slope of log(length) on log(lambda).
  const double k = static_cast<double>(scales.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    const double x = std::log(res.lambdas[i]), y = std::log(res.lengths[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  res.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return res;
}

void write_contour_csv(const NodalMeasurement& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << "x,y,segment_id\n";
  char buf[128];
  for (std::size_t i = 0; i < m.segments.size(); ++i) {
    const auto& s = m.segments[i];
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%zu\n%.12g,%.12g,%zu\n", s.a[0], s.a[1], i, s.b[0], s.b[1], i);
    out << buf;
  }
}

}  // namespace pspec
