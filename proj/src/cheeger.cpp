#include "pspec/cheeger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pspec/eigensolver.hpp"
#include "pspec/error.hpp"
#include "pspec/geometry.hpp"

namespace pspec {

CheegerEstimate level_set_sweep(const GridDomain& d, const ScalarField& u, int levels, double p) {
  if (d.dim() != 2) throw Error(ErrorKind::DimensionUnsupported, "level-set sweep is planar");
  if (levels < 16) throw Error(ErrorKind::InvalidConfig, "levels must be at least 16");
  if (u.values.size() != d.size()) throw Error(ErrorKind::InvalidDomain, "field does not match domain");

  std::vector<double> g(d.size(), 0.0);
  std::vector<double> positive;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!d.inside(i)) continue;
    const double v = u.values[i];
    if (v < 0.0) throw Error(ErrorKind::InvalidDomain, "level-set sweep needs a nonnegative field");
    g[i] = std::pow(v, p);
    if (g[i] > 0.0) positive.push_back(g[i]);
  }
  if (positive.empty()) throw Error(ErrorKind::ZeroTrialFunction, "field vanishes on the domain");
  std::sort(positive.begin(), positive.end());

  const double cell = d.h() * d.h();
  CheegerEstimate best;
  best.h = std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> sup(d.size());
  double prev_t = -1.0;
  for (int k = 0; k < levels; ++k) {
    const auto pos = static_cast<std::size_t>(
        std::floor(static_cast<double>(k) / levels * static_cast<double>(positive.size())));
    // Quantile k/levels; the lowest rung sits just below the smallest positive value.
    const double t = k == 0 ? 0.5 * positive.front() : positive[std::min(pos, positive.size() - 1)];
    if (t == prev_t) continue;
    prev_t = t;
    std::size_t count = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      sup[i] = g[i] > t ? 1 : 0;
      count += sup[i];
    }
    if (count == 0) continue;
    const double area = static_cast<double>(count) * cell;
    const double len = contour_length(d.shape(), d.h(), g, t);
    const double ratio = len / area;
    if (ratio < best.h) {
      best.h = ratio;
      best.best_level = t;
      best.cut_perimeter = len;
      best.cut_area = area;
      best.connectivity_of_cut = connectivity(d.shape(), sup);
    }
  }
  if (!std::isfinite(best.h)) throw Error(ErrorKind::EmptySuperlevel, "every sampled superlevel set is empty");
  return best;
}

CheegerEstimate cheeger_constant(const GridDomain& d, double p_probe) {
  if (d.dim() != 2) throw Error(ErrorKind::DimensionUnsupported, "Cheeger estimate is planar");
  const EigenResult r = solve_first_eigen(d, p_probe);
  return level_set_sweep(d, r.field, 128, p_probe);
}

double cheeger_lambda_bound(double h, double p) {
  if (!(h > 0.0)) throw Error(ErrorKind::DomainError, "h must be positive");
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidExponent, "p must be at least 1");
  return std::pow(h / p, p);
}

}  // namespace pspec
