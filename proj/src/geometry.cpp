#include "pspec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "pspec/error.hpp"

namespace pspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Squared-distance lower envelope of parabolas along one line (Felzenszwalb & Huttenlocher).
void edt_1d(const double* f, double* out, int n, std::vector<int>& v, std::vector<double>& z) {
  v.resize(n);
  z.resize(n + 1);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s;
    while (true) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    if (s <= z[k]) {
      v[k] = q;
      z[k + 1] = kInf;
    } else {
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = kInf;
    }
  }
  if (k < 0) {
    std::fill(out, out + n, kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double d = q - v[j];
    out[q] = d * d + f[v[j]];
  }
}

}  // namespace

std::vector<double> distance_to_features(const Extent& shape, double h,
                                         const std::vector<std::uint8_t>& feature, int dim) {
  const std::size_t total = static_cast<std::size_t>(shape[0]) * shape[1] * shape[2];
  std::vector<double> g(total);
  for (std::size_t idx = 0; idx < total; ++idx) g[idx] = feature[idx] ? 0.0 : kInf;
  const std::ptrdiff_t strides[3] = {1, shape[0], static_cast<std::ptrdiff_t>(shape[0]) * shape[1]};
  std::vector<double> line, out;
  std::vector<int> v;
  std::vector<double> z;
  for (int axis = 0; axis < dim; ++axis) {
    const int n = shape[axis];
    line.resize(n);
    out.resize(n);
    for (std::size_t base = 0; base < total; ++base) {
      // visit each line once, from its first element
      std::size_t rest = base;
      int c[3];
      c[0] = static_cast<int>(rest % shape[0]);
      rest /= shape[0];
      c[1] = static_cast<int>(rest % shape[1]);
      c[2] = static_cast<int>(rest / shape[1]);
      if (c[axis] != 0) continue;
      for (int q = 0; q < n; ++q) line[q] = g[base + q * strides[axis]];
      edt_1d(line.data(), out.data(), n, v, z);
      for (int q = 0; q < n; ++q) g[base + q * strides[axis]] = out[q];
    }
  }
  for (auto& x : g) x = x == kInf ? kInf : std::sqrt(x) * h;
  return g;
}

std::vector<double> distance_to_complement(const GridDomain& d) {
  std::vector<std::uint8_t> feature(d.size());
  for (std::size_t idx = 0; idx < d.size(); ++idx) feature[idx] = d.inside(idx) ? 0 : 1;
  return distance_to_features(d.shape(), d.h(), feature, d.dim());
}

double inradius(const GridDomain& d) {
  const auto dt = distance_to_complement(d);
  double best = 0.0;
  for (std::size_t idx = 0; idx < d.size(); ++idx)
    if (d.inside(idx)) best = std::max(best, dt[idx]);
  return best - 0.5 * d.h();
}

std::vector<Segment> contour_segments(const Extent& shape, double h, const Point& origin,
                                      const std::vector<double>& values, double level,
                                      const std::function<bool(int, int)>& keep_square) {
  std::vector<Segment> segs;
  const int nx = shape[0], ny = shape[1];
  auto at = [&](int i, int j) { return values[static_cast<std::size_t>(j) * nx + i]; };
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const double v00 = at(i, j), v10 = at(i + 1, j), v11 = at(i + 1, j + 1), v01 = at(i, j + 1);
      const bool a00 = v00 > level, a10 = v10 > level, a11 = v11 > level, a01 = v01 > level;
      const int code = a00 | (a10 << 1) | (a11 << 2) | (a01 << 3);
      if (code == 0 || code == 15) continue;
      if (keep_square && !keep_square(i, j)) continue;
      const double x0 = origin[0] + i * h, y0 = origin[1] + j * h;
      auto lerp = [&](double va, double vb) {
        const double den = vb - va;
        return den == 0.0 ? 0.5 : std::clamp((level - va) / den, 0.0, 1.0);
      };
      // Crossing points on edges: 0 bottom, 1 right, 2 top, 3 left.
      std::array<std::array<double, 2>, 4> p{};
      p[0] = {x0 + lerp(v00, v10) * h, y0};
      p[1] = {x0 + h, y0 + lerp(v10, v11) * h};
      p[2] = {x0 + lerp(v01, v11) * h, y0 + h};
      p[3] = {x0, y0 + lerp(v00, v01) * h};
      const bool cut[4] = {a00 != a10, a10 != a11, a01 != a11, a00 != a01};
      int edges[4];
      int ne = 0;
      for (int e = 0; e < 4; ++e)
        if (cut[e]) edges[ne++] = e;
      if (ne == 2) {
        segs.push_back({p[edges[0]], p[edges[1]]});
      } else if (ne == 4) {
        const bool center_above = 0.25 * (v00 + v10 + v11 + v01) > level;
        const bool diag00 = a00;  // 00 and 11 share a state
        // Isolate the corners that do not share the center's state.
        if (diag00 == center_above) {
          segs.push_back({p[0], p[1]});
          segs.push_back({p[2], p[3]});
        } else {
          segs.push_back({p[0], p[3]});
          segs.push_back({p[1], p[2]});
        }
      }
    }
  }
  return segs;
}

double contour_length(const Extent& shape, double h, const std::vector<double>& values,
                      double level, const std::function<bool(int, int)>& keep_square) {
  double total = 0.0;
  for (const auto& s : contour_segments(shape, h, {0.0, 0.0, 0.0}, values, level, keep_square))
    total += std::hypot(s.b[0] - s.a[0], s.b[1] - s.a[1]);
  return total;
}

double perimeter(const GridDomain& d) {
  if (d.dim() != 2) throw Error(ErrorKind::DimensionUnsupported, "perimeter is planar");
  std::vector<double> ind(d.size());
  for (std::size_t idx = 0; idx < d.size(); ++idx) ind[idx] = d.inside(idx) ? 1.0 : 0.0;
  return contour_length(d.shape(), d.h(), ind, 0.5);
}

int connectivity(const Extent& shape, const std::vector<std::uint8_t>& inside) {
  const int nx = shape[0], ny = shape[1];
  std::vector<int> label(inside.size(), -1);
  std::vector<std::size_t> stack;
  int components = 0;
  int bounded = 0;
  for (std::size_t start = 0; start < inside.size(); ++start) {
    if (inside[start] || label[start] >= 0) continue;
    bool touches = false;
    stack.push_back(start);
    label[start] = components;
    while (!stack.empty()) {
      const std::size_t idx = stack.back();
      stack.pop_back();
      const int i = static_cast<int>(idx % nx), j = static_cast<int>(idx / nx);
      if (i == 0 || j == 0 || i == nx - 1 || j == ny - 1) touches = true;
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          const int a = i + di, b = j + dj;
          if ((di == 0 && dj == 0) || a < 0 || b < 0 || a >= nx || b >= ny) continue;
          const std::size_t n = static_cast<std::size_t>(b) * nx + a;
          if (inside[n] || label[n] >= 0) continue;
          label[n] = components;
          stack.push_back(n);
        }
    }
    if (!touches) ++bounded;
    ++components;
  }
  return 1 + bounded;
}

int connectivity(const GridDomain& d) {
  if (d.dim() != 2) throw Error(ErrorKind::DimensionUnsupported, "connectivity is planar");
  return connectivity(d.shape(), std::vector<std::uint8_t>(d.mask().begin(), d.mask().end()));
}

namespace {

using IPoint = std::array<long long, 2>;

long long icross(const IPoint& o, const IPoint& a, const IPoint& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Convex hull (counter-clockwise, no collinear points) of the true cells, in index units.
std::vector<IPoint> hull_of_mask(const GridDomain& d) {
  std::vector<IPoint> pts;
  for (int j = 0; j < d.ny(); ++j) {
    int lo = -1, hi = -1;
    for (int i = 0; i < d.nx(); ++i)
      if (d.inside(i, j)) {
        if (lo < 0) lo = i;
        hi = i;
      }
    if (lo < 0) continue;
    pts.push_back({lo, j});
    if (hi != lo) pts.push_back({hi, j});
  }
  std::sort(pts.begin(), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<IPoint> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && icross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && icross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

struct Circle {
  double x, y, r;
  bool contains(double px, double py) const { return std::hypot(px - x, py - y) <= r * (1 + 1e-12) + 1e-12; }
};

Circle circle2(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return {(a[0] + b[0]) / 2, (a[1] + b[1]) / 2, std::hypot(a[0] - b[0], a[1] - b[1]) / 2};
}

Circle circle3(const std::array<double, 2>& a, const std::array<double, 2>& b,
               const std::array<double, 2>& c) {
  const double bx = b[0] - a[0], by = b[1] - a[1], cx = c[0] - a[0], cy = c[1] - a[1];
  const double den = 2 * (bx * cy - by * cx);
  if (std::abs(den) < 1e-300) {
    Circle best = circle2(a, b);
    for (const Circle& cand : {circle2(a, c), circle2(b, c)})
      if (cand.r > best.r) best = cand;
    return best;
  }
  const double ux = (cy * (bx * bx + by * by) - by * (cx * cx + cy * cy)) / den;
  const double uy = (bx * (cx * cx + cy * cy) - cx * (bx * bx + by * by)) / den;
  return {a[0] + ux, a[1] + uy, std::hypot(ux, uy)};
}

}  // namespace

std::array<double, 3> min_enclosing_circle(const GridDomain& d) {
  const auto hull = hull_of_mask(d);
  std::vector<std::array<double, 2>> p;
  for (const auto& q : hull) {
    const Point c = d.center(static_cast<int>(q[0]), static_cast<int>(q[1]));
    p.push_back({c[0], c[1]});
  }
  if (p.size() == 1) return {p[0][0], p[0][1], 0.0};
  Circle c{p[0][0], p[0][1], 0.0};
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (c.contains(p[i][0], p[i][1])) continue;
    c = {p[i][0], p[i][1], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (c.contains(p[j][0], p[j][1])) continue;
      c = circle2(p[i], p[j]);
      for (std::size_t k = 0; k < j; ++k)
        if (!c.contains(p[k][0], p[k][1])) c = circle3(p[i], p[j], p[k]);
    }
  }
  return {c.x, c.y, c.r};
}

bool is_convex(const GridDomain& d) {
  const auto hull = hull_of_mask(d);
  if (hull.size() < 3) return true;
  std::vector<std::uint8_t> hull_mask(d.size(), 0);
  for (int j = 0; j < d.ny(); ++j)
    for (int i = 0; i < d.nx(); ++i) {
      const IPoint q{i, j};
      bool in = true;
      for (std::size_t e = 0; e < hull.size() && in; ++e)
        if (icross(hull[e], hull[(e + 1) % hull.size()], q) < 0) in = false;
      hull_mask[d.index(i, j)] = in ? 1 : 0;
    }
  for (int j = 0; j < d.ny(); ++j)
    for (int i = 0; i < d.nx(); ++i) {
      const std::size_t idx = d.index(i, j);
      if (!hull_mask[idx] || d.inside(idx)) continue;
      bool outer_layer = false;
      for (int dj = -1; dj <= 1 && !outer_layer; ++dj)
        for (int di = -1; di <= 1; ++di) {
          const int a = i + di, b = j + dj;
          if (a < 0 || b < 0 || a >= d.nx() || b >= d.ny() || !hull_mask[d.index(a, b)]) {
            outer_layer = true;
            break;
          }
        }
      if (!outer_layer) return false;
    }
  return true;
}

double reduced_inradius(double rho, double area) {
  return rho / (1.0 + std::numbers::pi * rho * rho / area);
}

GeometrySummary geometry_summary(const GridDomain& d) {
  if (d.dim() != 2)
    throw Error(ErrorKind::DimensionUnsupported, "reduced inradius is only defined for n = 2");
  GeometrySummary g;
  g.area = static_cast<double>(d.count()) * d.cell_volume();
  g.perimeter = perimeter(d);
  g.inradius = inradius(d);
  g.reduced_inradius = reduced_inradius(g.inradius, g.area);
  g.circumradius = min_enclosing_circle(d)[2] + 0.5 * d.h();
  g.connectivity = connectivity(d);
  g.convex = is_convex(d);
  return g;
}

double ball_deficiency(const GridDomain& d, const Point& center, double r) {
  const double h = d.h();
  const int dim = d.dim();
  std::array<long, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    lo[a] = static_cast<long>(std::floor((center[a] - r - d.origin()[a]) / h));
    hi[a] = static_cast<long>(std::ceil((center[a] + r - d.origin()[a]) / h));
  }
  const double r2 = r * r;
  std::size_t outside = 0;
  for (long k = lo[2]; k <= hi[2]; ++k) {
    const double z = dim == 3 ? d.origin()[2] + k * h - center[2] : 0.0;
    for (long j = lo[1]; j <= hi[1]; ++j) {
      const double y = d.origin()[1] + j * h - center[1];
      const double yz = y * y + z * z;
      if (yz > r2) continue;
      for (long i = lo[0]; i <= hi[0]; ++i) {
        const double x = d.origin()[0] + i * h - center[0];
        if (x * x + yz > r2) continue;
        if (!d.inside(static_cast<int>(i), static_cast<int>(j), static_cast<int>(k))) ++outside;
      }
    }
  }
  return static_cast<double>(outside) * d.cell_volume();
}

GridDomain schwarz_symmetrize(const GridDomain& d) {
  if (d.dim() != 2) throw Error(ErrorKind::DimensionUnsupported, "Schwarz symmetrization is planar here");
  const double area = static_cast<double>(d.count()) * d.cell_volume();
  const double radius = std::sqrt(area / std::numbers::pi);
  const double h = d.h();
  // Grid center in lattice units (may be a half-integer).
  const double ci = 0.5 * (d.nx() - 1), cj = 0.5 * (d.ny() - 1);
  const double rc = radius / h;
  const int i0 = static_cast<int>(std::floor(ci - rc)) - 2, i1 = static_cast<int>(std::ceil(ci + rc)) + 2;
  const int j0 = static_cast<int>(std::floor(cj - rc)) - 2, j1 = static_cast<int>(std::ceil(cj + rc)) + 2;
  GridDomain out = GridDomain::blank(2, {i1 - i0 + 1, j1 - j0 + 1, 1}, h,
                                     {d.origin()[0] + i0 * h, d.origin()[1] + j0 * h, 0.0});
  for (int j = 0; j < out.ny(); ++j)
    for (int i = 0; i < out.nx(); ++i)
      if (std::hypot(i0 + i - ci, j0 + j - cj) < rc - 1e-12) out.set(out.index(i, j), true);
  out.validate();
  return out;
}

}  // namespace pspec
