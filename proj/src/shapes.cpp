#include "pspec/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pspec/error.hpp"

namespace pspec {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct Box {
  double xmin, xmax, ymin, ymax;
};

Box bounding_box(const ShapeSpec& spec) {
  return std::visit(
      overloaded{
          [](const shape::Disk& s) { return Box{-s.r, s.r, -s.r, s.r}; },
          [](const shape::Square& s) { return Box{-s.a / 2, s.a / 2, -s.a / 2, s.a / 2}; },
          [](const shape::Rectangle& s) { return Box{-s.a / 2, s.a / 2, -s.b / 2, s.b / 2}; },
          [](const shape::Annulus& s) { return Box{-s.r_out, s.r_out, -s.r_out, s.r_out}; },
          [](const shape::EllShape& s) { return Box{-s.a / 2, s.a / 2, -s.a / 2, s.a / 2}; },
          [](const shape::Polygon& s) {
            Box b{1e300, -1e300, 1e300, -1e300};
            for (const auto& v : s.vertices) {
              b.xmin = std::min(b.xmin, v[0]);
              b.xmax = std::max(b.xmax, v[0]);
              b.ymin = std::min(b.ymin, v[1]);
              b.ymax = std::max(b.ymax, v[1]);
            }
            return b;
          },
          [](const shape::SpikyDisk& s) { return Box{-s.r, s.r, -s.r, s.r}; },
          [](const shape::DiskWithHoles& s) { return Box{-s.r, s.r, -s.r, s.r}; },
      },
      spec.variant);
}

double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

bool segments_cross(const std::array<double, 2>& p1, const std::array<double, 2>& p2,
                    const std::array<double, 2>& q1, const std::array<double, 2>& q2) {
  auto orient = [](const std::array<double, 2>& a, const std::array<double, 2>& b,
                   const std::array<double, 2>& c) {
    const double v = cross(b[0] - a[0], b[1] - a[1], c[0] - a[0], c[1] - a[1]);
    return (v > 0) - (v < 0);
  };
  auto on_segment = [](const std::array<double, 2>& a, const std::array<double, 2>& b,
                       const std::array<double, 2>& c) {
    return std::min(a[0], b[0]) <= c[0] && c[0] <= std::max(a[0], b[0]) &&
           std::min(a[1], b[1]) <= c[1] && c[1] <= std::max(a[1], b[1]);
  };
  const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

bool point_in_polygon(const std::vector<std::array<double, 2>>& v, double x, double y) {
  bool in = false;
  const std::size_t n = v.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = v[i];
    const auto& b = v[j];
    if ((a[1] > y) != (b[1] > y)) {
      const double xc = a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
      if (x < xc) in = !in;
    }
  }
  return in;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw Error(ErrorKind::InvalidSpec, std::string(what) + " must be positive");
}

void require_thick(double width, double h, const char* what) {
  if (width < 3.0 * h - 1e-12) {
    std::ostringstream os;
    os << what << " width " << width << " spans fewer than 3 cells at h = " << h;
    throw Error(ErrorKind::FeatureTooThin, os.str());
  }
}

// Strict interior margin so that lattice points exactly on the boundary are excluded.
constexpr double kEdge = 1e-12;

}  // namespace

std::string ShapeSpec::name() const {
  return std::visit(overloaded{
                        [](const shape::Disk&) { return std::string("disk"); },
                        [](const shape::Square&) { return std::string("square"); },
                        [](const shape::Rectangle&) { return std::string("rectangle"); },
                        [](const shape::Annulus&) { return std::string("annulus"); },
                        [](const shape::EllShape&) { return std::string("ell_shape"); },
                        [](const shape::Polygon&) { return std::string("polygon"); },
                        [](const shape::SpikyDisk&) { return std::string("spiky_disk"); },
                        [](const shape::DiskWithHoles&) { return std::string("disk_with_holes"); },
                    },
                    variant);
}

void validate(const ShapeSpec& spec) {
  std::visit(
      overloaded{
          [](const shape::Disk& s) { require_positive(s.r, "r"); },
          [](const shape::Square& s) { require_positive(s.a, "a"); },
          [](const shape::Rectangle& s) {
            require_positive(s.a, "a");
            require_positive(s.b, "b");
          },
          [](const shape::Annulus& s) {
            require_positive(s.r_in, "r_in");
            require_positive(s.r_out, "r_out");
            if (s.r_in >= s.r_out) throw Error(ErrorKind::InvalidSpec, "annulus needs r_in < r_out");
          },
          [](const shape::EllShape& s) {
            require_positive(s.a, "a");
            require_positive(s.notch, "notch");
            if (s.notch >= s.a) throw Error(ErrorKind::InvalidSpec, "notch must be smaller than a");
          },
          [](const shape::Polygon& s) {
            const std::size_t n = s.vertices.size();
            if (n < 3) throw Error(ErrorKind::InvalidSpec, "polygon needs at least 3 vertices");
            double area2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
              const auto& a = s.vertices[i];
              const auto& b = s.vertices[(i + 1) % n];
              area2 += cross(a[0], a[1], b[0], b[1]);
            }
            if (std::abs(area2) <= 0.0) throw Error(ErrorKind::InvalidSpec, "degenerate polygon");
            for (std::size_t i = 0; i < n; ++i) {
              for (std::size_t j = i + 1; j < n; ++j) {
                const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if (adjacent) continue;
                if (segments_cross(s.vertices[i], s.vertices[(i + 1) % n], s.vertices[j],
                                   s.vertices[(j + 1) % n]))
                  throw Error(ErrorKind::InvalidSpec, "polygon is self-intersecting");
              }
            }
          },
          [](const shape::SpikyDisk& s) {
            require_positive(s.r, "r");
            require_positive(s.spike_width, "spike_width");
            require_positive(s.spike_depth, "spike_depth");
            if (s.n_spikes < 1) throw Error(ErrorKind::InvalidSpec, "n_spikes must be >= 1");
            if (s.spike_depth >= s.r) throw Error(ErrorKind::InvalidSpec, "spike_depth must be < r");
          },
          [](const shape::DiskWithHoles& s) {
            require_positive(s.r, "r");
            for (std::size_t i = 0; i < s.holes.size(); ++i) {
              const auto& hl = s.holes[i];
              require_positive(hl.r, "hole r");
              if (std::hypot(hl.x, hl.y) + hl.r >= s.r)
                throw Error(ErrorKind::InvalidSpec, "hole leaves the disk");
              for (std::size_t j = 0; j < i; ++j) {
                const auto& o = s.holes[j];
                if (std::hypot(hl.x - o.x, hl.y - o.y) <= hl.r + o.r)
                  throw Error(ErrorKind::InvalidSpec, "holes overlap");
              }
            }
          },
      },
      spec.variant);
}

ShapeSpec scaled(const ShapeSpec& spec, double t) {
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidSpec, "scale must be positive");
  ShapeSpec out = spec;
  std::visit(overloaded{
                 [t](shape::Disk& s) { s.r *= t; },
                 [t](shape::Square& s) { s.a *= t; },
                 [t](shape::Rectangle& s) {
                   s.a *= t;
                   s.b *= t;
                 },
                 [t](shape::Annulus& s) {
                   s.r_in *= t;
                   s.r_out *= t;
                 },
                 [t](shape::EllShape& s) {
                   s.a *= t;
                   s.notch *= t;
                 },
                 [t](shape::Polygon& s) {
                   for (auto& v : s.vertices) {
                     v[0] *= t;
                     v[1] *= t;
                   }
                 },
                 [t](shape::SpikyDisk& s) {
                   s.r *= t;
                   s.spike_width *= t;
                   s.spike_depth *= t;
                 },
                 [t](shape::DiskWithHoles& s) {
                   s.r *= t;
                   for (auto& hl : s.holes) {
                     hl.x *= t;
                     hl.y *= t;
                     hl.r *= t;
                   }
                 },
             },
             out.variant);
  return out;
}

bool contains(const ShapeSpec& spec, double x, double y) {
  return std::visit(
      overloaded{
          [&](const shape::Disk& s) { return std::hypot(x, y) < s.r - kEdge; },
          [&](const shape::Square& s) {
            return std::abs(x) < s.a / 2 - kEdge && std::abs(y) < s.a / 2 - kEdge;
          },
          [&](const shape::Rectangle& s) {
            return std::abs(x) < s.a / 2 - kEdge && std::abs(y) < s.b / 2 - kEdge;
          },
          [&](const shape::Annulus& s) {
            const double r = std::hypot(x, y);
            return r > s.r_in + kEdge && r < s.r_out - kEdge;
          },
          [&](const shape::EllShape& s) {
            const double half = s.a / 2;
            if (!(std::abs(x) < half - kEdge && std::abs(y) < half - kEdge)) return false;
            const double cut = half - s.notch;
            return !(x > cut - kEdge && y > cut - kEdge);
          },
          [&](const shape::Polygon& s) { return point_in_polygon(s.vertices, x, y); },
          [&](const shape::SpikyDisk& s) {
            if (!(std::hypot(x, y) < s.r - kEdge)) return false;
            for (int k = 0; k < s.n_spikes; ++k) {
              const double theta = 2.0 * std::numbers::pi * k / s.n_spikes;
              const double ex = std::cos(theta), ey = std::sin(theta);
              const double along = x * ex + y * ey;
              const double across = std::abs(-x * ey + y * ex);
              if (along > s.r - s.spike_depth - kEdge && across < s.spike_width / 2 + kEdge)
                return false;
            }
            return true;
          },
          [&](const shape::DiskWithHoles& s) {
            if (!(std::hypot(x, y) < s.r - kEdge)) return false;
            for (const auto& hl : s.holes)
              if (std::hypot(x - hl.x, y - hl.y) <= hl.r + kEdge) return false;
            return true;
          },
      },
      spec.variant);
}

namespace {

void check_features(const ShapeSpec& spec, double h) {
  std::visit(overloaded{
                 [h](const shape::Disk& s) { require_thick(2 * s.r, h, "disk"); },
                 [h](const shape::Square& s) { require_thick(s.a, h, "square"); },
                 [h](const shape::Rectangle& s) {
                   require_thick(std::min(s.a, s.b), h, "rectangle");
                 },
                 [h](const shape::Annulus& s) { require_thick(s.r_out - s.r_in, h, "annulus"); },
                 [h](const shape::EllShape& s) {
                   require_thick(s.a - s.notch, h, "ell arm");
                   require_thick(s.notch, h, "ell notch");
                 },
                 [](const shape::Polygon&) {},
                 [h](const shape::SpikyDisk& s) {
                   require_thick(s.spike_width, h, "spike");
                   const double gap = 2.0 * std::numbers::pi * (s.r - s.spike_depth) / s.n_spikes;
                   require_thick(gap - s.spike_width, h, "gap between spikes");
                 },
                 [h](const shape::DiskWithHoles& s) {
                   for (const auto& hl : s.holes) {
                     require_thick(2 * hl.r, h, "hole");
                     require_thick(s.r - std::hypot(hl.x, hl.y) - hl.r, h, "rim around hole");
                   }
                 },
             },
             spec.variant);
}

}  // namespace

GridDomain rasterize_shape(const ShapeSpec& spec, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidSpec, "spacing must be positive");
  validate(spec);
  check_features(spec, h);
  const Box b = bounding_box(spec);
  const int i0 = static_cast<int>(std::floor(b.xmin / h)) - 2;
  const int i1 = static_cast<int>(std::ceil(b.xmax / h)) + 2;
  const int j0 = static_cast<int>(std::floor(b.ymin / h)) - 2;
  const int j1 = static_cast<int>(std::ceil(b.ymax / h)) + 2;
  GridDomain d = GridDomain::blank(2, {i1 - i0 + 1, j1 - j0 + 1, 1}, h, {i0 * h, j0 * h, 0.0});
  for (int j = 0; j < d.ny(); ++j)
    for (int i = 0; i < d.nx(); ++i)
      if (contains(spec, (i0 + i) * h, (j0 + j) * h)) d.set(d.index(i, j), true);
  if (d.count() == 0) throw Error(ErrorKind::FeatureTooThin, "shape contains no cell center");
  d.validate();
  return d;
}

GridDomain rasterize_ball(const Point& center, double r, double h, int dim) {
  if (!(r > 0.0) || !(h > 0.0)) throw Error(ErrorKind::InvalidSpec, "ball radius and spacing must be positive");
  if (dim != 2 && dim != 3) throw Error(ErrorKind::DimensionUnsupported, "ball dimension must be 2 or 3");
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    lo[a] = static_cast<int>(std::floor((center[a] - r) / h)) - 2;
    hi[a] = static_cast<int>(std::ceil((center[a] + r) / h)) + 2;
  }
  Extent shape{hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, dim == 3 ? hi[2] - lo[2] + 1 : 1};
  GridDomain d = GridDomain::blank(dim, shape, h, {lo[0] * h, lo[1] * h, lo[2] * h});
  for (std::size_t idx = 0; idx < d.size(); ++idx) {
    const Point c = d.center(idx);
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += (c[a] - center[a]) * (c[a] - center[a]);
    if (std::sqrt(s) <= r) d.set(idx, true);
  }
  if (d.count() == 0) throw Error(ErrorKind::FeatureTooThin, "ball contains no cell center");
  d.validate();
  return d;
}

std::vector<ShapeSpec> standard_catalog() {
  std::vector<ShapeSpec> c;
  c.push_back({shape::Disk{1.0}, "disk"});
  c.push_back({shape::Square{1.0}, "square"});
  c.push_back({shape::Rectangle{2.0, 1.0}, "rectangle"});
  c.push_back({shape::Annulus{0.5, 1.0}, "annulus"});
  c.push_back({shape::EllShape{1.0, 0.5}, "ell_shape"});
  c.push_back({shape::DiskWithHoles{1.0, {shape::Hole{0.35, 0.0, 0.25}}}, "disk_with_hole"});
  c.push_back({shape::DiskWithHoles{1.0, {shape::Hole{-0.4, 0.0, 0.2}, shape::Hole{0.4, 0.0, 0.2}}},
               "disk_with_two_holes"});
  c.push_back({shape::SpikyDisk{1.0, 8, 0.1, 0.75}, "spiky_disk"});
  return c;
}

ShapeSpec shape_by_name(const std::string& name) {
  for (auto& s : standard_catalog())
    if (s.label == name) return s;
  if (name == "polygon")
    return {shape::Polygon{{{1.0, 0.0}, {0.5, 0.866025403784}, {-0.5, 0.866025403784},
                            {-1.0, 0.0}, {-0.5, -0.866025403784}, {0.5, -0.866025403784}}},
            "polygon"};
  if (name == "disk_with_holes") return shape_by_name("disk_with_hole");
  throw Error(ErrorKind::InvalidSpec, "unknown shape '" + name + "'");
}

}  // namespace pspec
