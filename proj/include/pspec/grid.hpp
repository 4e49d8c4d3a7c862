#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pspec {

using Point = std::array<double, 3>;
using Extent = std::array<int, 3>;

// Boolean occupancy raster of a bounded open set. Cell (i,j,k) has its center at
// origin + (i,j,k)*h. Storage is row-major with x fastest: index = (k*ny + j)*nx + i.
// For dim == 2 the z extent is 1.
class GridDomain {
 public:
  GridDomain() = default;
  GridDomain(int dim, Extent shape, double h, Point origin, std::vector<std::uint8_t> mask);

  // Empty (all false) grid; callers fill the mask and then call validate().
  static GridDomain blank(int dim, Extent shape, double h, Point origin);

  // Throws Error(InvalidDomain) unless h > 0, at least one cell is true, and all
  // true cells keep a one-cell false margin to the array border.
  void validate() const;

  int dim() const { return dim_; }
  const Extent& shape() const { return shape_; }
  int nx() const { return shape_[0]; }
  int ny() const { return shape_[1]; }
  int nz() const { return shape_[2]; }
  double h() const { return h_; }
  const Point& origin() const { return origin_; }
  std::size_t size() const { return mask_.size(); }

  std::size_t index(int i, int j, int k = 0) const {
    return (static_cast<std::size_t>(k) * shape_[1] + j) * shape_[0] + i;
  }
  std::array<int, 3> coords(std::size_t idx) const {
    const int i = static_cast<int>(idx % shape_[0]);
    const std::size_t rest = idx / shape_[0];
    return {i, static_cast<int>(rest % shape_[1]), static_cast<int>(rest / shape_[1])};
  }
  bool in_bounds(int i, int j, int k = 0) const {
    return i >= 0 && j >= 0 && k >= 0 && i < shape_[0] && j < shape_[1] && k < shape_[2];
  }

  bool inside(std::size_t idx) const { return mask_[idx] != 0; }
  bool inside(int i, int j, int k = 0) const {
    return in_bounds(i, j, k) && mask_[index(i, j, k)] != 0;
  }
  void set(std::size_t idx, bool v) { mask_[idx] = v ? 1 : 0; }

  Point center(std::size_t idx) const;
  Point center(int i, int j, int k = 0) const {
    return {origin_[0] + i * h_, origin_[1] + j * h_, dim_ == 3 ? origin_[2] + k * h_ : 0.0};
  }

  std::span<const std::uint8_t> mask() const { return mask_; }
  std::size_t count() const;
  double cell_volume() const;

  // Stride of a unit step along `axis` in flat storage.
  std::ptrdiff_t stride(int axis) const {
    return axis == 0 ? 1 : axis == 1 ? shape_[0] : static_cast<std::ptrdiff_t>(shape_[0]) * shape_[1];
  }

  bool operator==(const GridDomain&) const = default;

 private:
  int dim_ = 2;
  Extent shape_{0, 0, 1};
  double h_ = 0.0;
  Point origin_{0.0, 0.0, 0.0};
  std::vector<std::uint8_t> mask_;
};

// Nodal values congruent with a GridDomain; zero on every false cell.
struct ScalarField {
  Extent shape{0, 0, 1};
  double h = 0.0;
  std::vector<double> values;

  static ScalarField zeros(const GridDomain& d) {
    return ScalarField{d.shape(), d.h(), std::vector<double>(d.size(), 0.0)};
  }
};

// Mirror image of the mask across the central column (axis 0) or row (axis 1).
bool is_mirror_symmetric(const GridDomain& d, int axis);

}  // namespace pspec
