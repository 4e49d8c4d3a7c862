#include "pspec/grid.hpp"

#include <algorithm>
#include <string>

#include "pspec/error.hpp"

namespace pspec {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDomain: return "InvalidDomain";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::FeatureTooThin: return "FeatureTooThin";
    case ErrorKind::DimensionUnsupported: return "DimensionUnsupported";
    case ErrorKind::ZeroTrialFunction: return "ZeroTrialFunction";
    case ErrorKind::InvalidExponent: return "InvalidExponent";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::EmptySuperlevel: return "EmptySuperlevel";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::ConformalCase: return "ConformalCase";
    case ErrorKind::ExponentOutOfRange: return "ExponentOutOfRange";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::MissingParam: return "MissingParam";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NoInteriorBall: return "NoInteriorBall";
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

GridDomain::GridDomain(int dim, Extent shape, double h, Point origin,
                       std::vector<std::uint8_t> mask)
    : dim_(dim), shape_(shape), h_(h), origin_(origin), mask_(std::move(mask)) {
  if (dim_ == 2) shape_[2] = 1;
  validate();
}

GridDomain GridDomain::blank(int dim, Extent shape, double h, Point origin) {
  GridDomain d;
  d.dim_ = dim;
  d.shape_ = shape;
  if (dim == 2) d.shape_[2] = 1;
  d.h_ = h;
  d.origin_ = origin;
  d.mask_.assign(static_cast<std::size_t>(d.shape_[0]) * d.shape_[1] * d.shape_[2], 0);
  return d;
}

void GridDomain::validate() const {
  if (dim_ != 2 && dim_ != 3) throw Error(ErrorKind::InvalidDomain, "dimension must be 2 or 3");
  if (!(h_ > 0.0)) throw Error(ErrorKind::InvalidDomain, "spacing must be positive");
  const std::size_t expected = static_cast<std::size_t>(shape_[0]) * shape_[1] * shape_[2];
  if (mask_.size() != expected || expected == 0)
    throw Error(ErrorKind::InvalidDomain, "mask size does not match shape");
  bool any = false;
  for (std::size_t idx = 0; idx < mask_.size(); ++idx) {
    if (!mask_[idx]) continue;
    any = true;
    const auto [i, j, k] = coords(idx);
    const bool border = i == 0 || j == 0 || i == shape_[0] - 1 || j == shape_[1] - 1 ||
                        (dim_ == 3 && (k == 0 || k == shape_[2] - 1));
    if (border)
      throw Error(ErrorKind::InvalidDomain,
                  "true cell on the array border (one-cell false margin required)");
  }
  if (!any) throw Error(ErrorKind::InvalidDomain, "mask has no true cell");
}

Point GridDomain::center(std::size_t idx) const {
  const auto [i, j, k] = coords(idx);
  return center(i, j, k);
}

std::size_t GridDomain::count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

double GridDomain::cell_volume() const { return dim_ == 3 ? h_ * h_ * h_ : h_ * h_; }

bool is_mirror_symmetric(const GridDomain& d, int axis) {
  const int n = d.shape()[axis];
  for (std::size_t idx = 0; idx < d.size(); ++idx) {
    auto c = d.coords(idx);
    c[axis] = n - 1 - c[axis];
    if (d.inside(idx) != d.inside(c[0], c[1], c[2])) return false;
  }
  return true;
}

}  // namespace pspec
