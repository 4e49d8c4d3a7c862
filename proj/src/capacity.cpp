#include "pspec/capacity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <tuple>

#include <Eigen/IterativeLinearSolvers>

#include "pspec/error.hpp"
#include "pspec/geometry.hpp"
#include "spd_solver.hpp"

namespace pspec {

namespace {

using detail::SparseMatrix;
using Eigen::VectorXd;

constexpr double kPi = std::numbers::pi;
// Above this many unknowns a 3D Cholesky factor no longer fits comfortably.
constexpr Eigen::Index kDirectLimit3d = 150000;

// Tensor-product node grid: uniform spacing h around the set, geometric outside.
struct NodeGrid {
  int dim = 2;
  std::array<int, 3> n{1, 1, 1};
  std::array<std::vector<double>, 3> x;
  std::array<int, 3> uniform_first{0, 0, 0};  // node index of the first uniform node

  std::size_t size() const { return static_cast<std::size_t>(n[0]) * n[1] * n[2]; }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * n[1] + j) * n[0] + i;
  }
};

std::vector<double> graded_axis(double lo, double hi, double h, double box_lo, double box_hi,
                                double growth, int& first_uniform) {
  auto extension = [&](double gap) {
    std::vector<double> steps;
    double s = h, total = 0.0;
    while (total < gap) {
      s *= growth;
      steps.push_back(s);
      total += s;
    }
    const double scale = total > 0.0 ? gap / total : 1.0;
    std::vector<double> offsets;
    double acc = 0.0;
    for (double st : steps) {
      acc += st * scale;
      offsets.push_back(acc);
    }
    if (!offsets.empty()) offsets.back() = gap;
    return offsets;
  };
  const auto below = extension(lo - box_lo);
  const auto above = extension(box_hi - hi);
  std::vector<double> x;
  for (auto it = below.rbegin(); it != below.rend(); ++it) x.push_back(lo - *it);
  first_uniform = static_cast<int>(x.size());
  const int count = static_cast<int>(std::llround((hi - lo) / h));
  for (int i = 0; i <= count; ++i) x.push_back(lo + i * h);
  for (double off : above) x.push_back(hi + off);
  return x;
}

struct Bounds {
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
};

Bounds true_bounds(const GridDomain& F) {
  Bounds b;
  b.lo = {F.nx(), F.ny(), F.nz()};
  b.hi = {-1, -1, -1};
  for (std::size_t idx = 0; idx < F.size(); ++idx) {
    if (!F.inside(idx)) continue;
    const auto c = F.coords(idx);
    for (int a = 0; a < 3; ++a) {
      b.lo[a] = std::min(b.lo[a], c[a]);
      b.hi[a] = std::max(b.hi[a], c[a]);
    }
  }
  return b;
}

class CapacityProblem {
 public:
  CapacityProblem(const GridDomain& F, double p, const CapacityOptions& opts) : p_(p), opts_(opts) {
    const int dim = F.dim();
    const double h = F.h();
    const Bounds b = true_bounds(F);
    Point c{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) c[a] = F.origin()[a] + h * 0.5 * (b.lo[a] + b.hi[a]);
    double rmax = 0.0;
    for (std::size_t idx = 0; idx < F.size(); ++idx) {
      if (!F.inside(idx)) continue;
      const Point x = F.center(idx);
      double r2 = 0.0;
      for (int a = 0; a < dim; ++a) r2 += (x[a] - c[a]) * (x[a] - c[a]);
      rmax = std::max(rmax, std::sqrt(r2));
    }
    diam_ = 2.0 * rmax + h;
    center_ = c;

    grid_.dim = dim;
    double half = 0.5 * opts.box_factor * diam_;
    const int m = opts.margin_cells;
    for (int a = 0; a < dim; ++a) {
      const double lo = F.origin()[a] + h * (b.lo[a] - m);
      const double hi = F.origin()[a] + h * (b.hi[a] + m);
      half = std::max(half, std::max(c[a] - lo, hi - c[a]) + 2.0 * h);
    }
    for (int a = 0; a < 3; ++a) {
      if (a >= dim) {
        grid_.x[a] = {0.0};
        grid_.n[a] = 1;
        continue;
      }
      const double lo = F.origin()[a] + h * (b.lo[a] - m);
      const double hi = F.origin()[a] + h * (b.hi[a] + m);
      grid_.x[a] = graded_axis(lo, hi, h, c[a] - half, c[a] + half, opts.growth, grid_.uniform_first[a]);
      grid_.n[a] = static_cast<int>(grid_.x[a].size());
    }
    box_half_ = half;

    const int n = dim;
    asymptotic_ = opts.far_field == FarField::asymptotic && p < n;
    eps_ = p == 2.0 ? 0.0 : 1e-6 / diam_;
    eps_u_ = p < 2.0 ? 1e-6 : 0.0;

    // Node classification.
    const std::size_t N = grid_.size();
    value_.assign(N, 0.0);
    unknown_.assign(N, -1);
    boundary_coef_.assign(N, 0.0);
    for (int k = 0; k < grid_.n[2]; ++k)
      for (int j = 0; j < grid_.n[1]; ++j)
        for (int i = 0; i < grid_.n[0]; ++i) {
          const std::size_t id = grid_.index(i, j, k);
          const std::array<int, 3> node{i, j, k};
          bool on_boundary = false;
          for (int a = 0; a < dim; ++a) on_boundary = on_boundary || node[a] == 0 || node[a] == grid_.n[a] - 1;
          // Matching cell of F, when the node lies in the uniform zone.
          std::array<int, 3> cell{0, 0, 0};
          bool in_f = true;
          for (int a = 0; a < dim; ++a) {
            cell[a] = b.lo[a] - m + (node[a] - grid_.uniform_first[a]);
            if (cell[a] < 0 || cell[a] >= F.shape()[a]) in_f = false;
          }
          if (in_f) in_f = F.inside(cell[0], cell[1], cell[2]);
          if (in_f) {
            value_[id] = 1.0;
          } else if (on_boundary && !asymptotic_) {
            value_[id] = 0.0;
          } else {
            unknown_[id] = static_cast<int>(unknown_nodes_.size());
            unknown_nodes_.push_back(id);
            if (on_boundary) boundary_coef_[id] = far_field_coefficient(node);
          }
        }
    build_pattern();
  }

  CapacityResult solve() {
    CapacityResult res;
    res.p = p_;
    res.n = grid_.dim;
    res.box_factor = opts_.box_factor;
    std::vector<double> u = value_;
    // Start from the capped radial profile min(1, (r_F / |x - c|)^s).
    const double s = asymptotic_ ? (grid_.dim - p_) / (p_ - 1.0) : 1.0;
    for (std::size_t id : unknown_nodes_) {
      const double r = distance_to_center(id);
      u[id] = std::min(1.0, std::pow(0.5 * diam_ / std::max(r, 1e-300), s));
    }
    double energy = evaluate(u, nullptr, false);
    VectorXd grad, delta;
    std::vector<double> trial(u.size());
    for (int it = 0; it < opts_.max_iter; ++it) {
      evaluate(u, &grad, true);
      if (!solve_linear(-grad, delta)) throw Error(ErrorKind::NonConvergence, "capacity Newton system is singular");
      const double slope = grad.dot(delta);
      ++res.iterations;
      if (!(slope < 0.0)) break;
      double step = 1.0, e_new = energy;
      bool accepted = false;
      for (int ls = 0; ls < 50; ++ls) {
        trial = u;
        for (std::size_t q = 0; q < unknown_nodes_.size(); ++q)
          trial[unknown_nodes_[q]] += step * delta[static_cast<Eigen::Index>(q)];
        e_new = evaluate(trial, nullptr, false);
        if (e_new <= energy + 1e-4 * step * slope) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      u.swap(trial);
      const double decrement = -0.5 * slope;
      res.residual = (energy - e_new) / std::max(e_new, 1e-300);
      energy = e_new;
      if (decrement <= opts_.tol * energy && res.residual <= opts_.tol) break;
      // The quadratic energy is minimized by one full Newton step.
      if (p_ == 2.0 && step == 1.0) break;
      if (it + 1 == opts_.max_iter)
        throw Error(ErrorKind::NonConvergence, "capacity Newton iteration did not converge");
    }
    res.value = energy;
    return res;
  }

 private:
  double distance_to_center(std::size_t id) const {
    const auto node = node_coords(id);
    double r2 = 0.0;
    for (int a = 0; a < grid_.dim; ++a) {
      const double dx = grid_.x[a][node[a]] - center_[a];
      r2 += dx * dx;
    }
    return std::sqrt(r2);
  }

  std::array<int, 3> node_coords(std::size_t id) const {
    const int i = static_cast<int>(id % grid_.n[0]);
    const std::size_t rest = id / grid_.n[0];
    return {i, static_cast<int>(rest % grid_.n[1]), static_cast<int>(rest / grid_.n[1])};
  }

  // Energy of the radial continuation beyond the box, per unit |u|^p, of the boundary
  // area attached to this node: A s^{p-1} (x.nu) / |x|^p with s = (n-p)/(p-1).
  double far_field_coefficient(const std::array<int, 3>& node) const {
    const int dim = grid_.dim;
    const double s = (dim - p_) / (p_ - 1.0);
    Point rel{0.0, 0.0, 0.0};
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      rel[a] = grid_.x[a][node[a]] - center_[a];
      r2 += rel[a] * rel[a];
    }
    const double r = std::sqrt(r2);
    double coef = 0.0;
    for (int a = 0; a < dim; ++a) {
      if (node[a] != 0 && node[a] != grid_.n[a] - 1) continue;
      double area = 1.0;
      for (int b = 0; b < dim; ++b) {
        if (b == a) continue;
        const auto& xs = grid_.x[b];
        const int i = node[b];
        const double left = i > 0 ? xs[i] - xs[i - 1] : 0.0;
        const double right = i + 1 < static_cast<int>(xs.size()) ? xs[i + 1] - xs[i] : 0.0;
        area *= 0.5 * (left + right);
      }
      coef += area * std::pow(s, p_ - 1.0) * std::abs(rel[a]) / std::pow(r, p_);
    }
    return coef;
  }

  void build_pattern() {
    const int dim = grid_.dim;
    const long nx = grid_.n[0], nxy = static_cast<long>(grid_.n[0]) * grid_.n[1];
    struct Off {
      std::array<int, 3> d;
      long delta;
    };
    std::vector<Off> offs;
    for (int dz = (dim == 3 ? -1 : 0); dz <= (dim == 3 ? 1 : 0); ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const long delta = dx + nx * dy + nxy * dz;
          if (delta < 0) continue;
          const int nonzero = (dx != 0) + (dy != 0) + (dz != 0);
          if (p_ == 2.0 && nonzero > 1) continue;  // cross couplings vanish at p = 2
          offs.push_back({{dx, dy, dz}, delta});
        }
    std::sort(offs.begin(), offs.end(), [](const Off& a, const Off& b) { return a.delta < b.delta; });
    offset_slot_.fill(-1);
    for (std::size_t k = 0; k < offs.size(); ++k) {
      const auto& d = offs[k].d;
      offset_slot_[(d[0] + 1) + 3 * (d[1] + 1) + 9 * (d[2] + 1)] = static_cast<int>(k);
    }
    const int nu = static_cast<int>(unknown_nodes_.size());
    col_mask_.assign(nu, 0);
    std::vector<int> outer(nu + 1, 0);
    std::vector<int> inner;
    for (int q = 0; q < nu; ++q) {
      const auto node = node_coords(unknown_nodes_[q]);
      std::uint32_t mask = 0;
      for (std::size_t k = 0; k < offs.size(); ++k) {
        std::array<int, 3> nb{node[0] + offs[k].d[0], node[1] + offs[k].d[1], node[2] + offs[k].d[2]};
        bool ok = true;
        for (int a = 0; a < 3; ++a) ok = ok && nb[a] >= 0 && nb[a] < grid_.n[a];
        if (!ok) continue;
        const int u = unknown_[grid_.index(nb[0], nb[1], nb[2])];
        if (u < 0) continue;
        mask |= 1u << k;
        inner.push_back(u);
      }
      col_mask_[q] = mask;
      outer[q + 1] = static_cast<int>(inner.size());
    }
    matrix_.resize(nu, nu);
    matrix_.resizeNonZeros(static_cast<Eigen::Index>(inner.size()));
    std::copy(outer.begin(), outer.end(), matrix_.outerIndexPtr());
    std::copy(inner.begin(), inner.end(), matrix_.innerIndexPtr());
    std::fill(matrix_.valuePtr(), matrix_.valuePtr() + inner.size(), 0.0);
  }

  int slot(std::size_t ga, const std::array<int, 3>& ca, std::size_t gb, const std::array<int, 3>& cb) const {
    if (ga > gb) return slot(gb, cb, ga, ca);
    const int k = offset_slot_[(cb[0] - ca[0] + 1) + 3 * (cb[1] - ca[1] + 1) + 9 * (cb[2] - ca[2] + 1)];
    if (k < 0) return -1;
    const int q = unknown_[ga];
    return matrix_.outerIndexPtr()[q] + std::popcount(col_mask_[q] & ((1u << k) - 1u));
  }

  // Energy; with grad != nullptr also the gradient and (when hess) the Hessian values.
  double evaluate(const std::vector<double>& u, VectorXd* grad, bool hess) {
    const int dim = grid_.dim;
    const int corners = 1 << dim;
    const double eps2 = eps_ * eps_, eps_p = std::pow(eps_, p_);
    if (grad) grad->setZero(static_cast<Eigen::Index>(unknown_nodes_.size()));
    double* val = matrix_.valuePtr();
    if (hess) std::fill(val, val + matrix_.nonZeros(), 0.0);
    double energy = 0.0;
    const int ez = dim == 3 ? grid_.n[2] - 1 : 1;
    for (int k = 0; k < ez; ++k)
      for (int j = 0; j < grid_.n[1] - 1; ++j)
        for (int i = 0; i < grid_.n[0] - 1; ++i) {
          const std::array<double, 3> dx{grid_.x[0][i + 1] - grid_.x[0][i], grid_.x[1][j + 1] - grid_.x[1][j],
                                         dim == 3 ? grid_.x[2][k + 1] - grid_.x[2][k] : 1.0};
          const double weight = dx[0] * dx[1] * dx[2] / corners;
          for (int c = 0; c < corners; ++c) {
            std::array<std::array<int, 3>, 4> nc;
            std::array<std::size_t, 4> ng;
            nc[0] = {i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1)};
            ng[0] = grid_.index(nc[0][0], nc[0][1], nc[0][2]);
            std::array<double, 3> g{0.0, 0.0, 0.0};
            std::array<double, 3> sgn{0.0, 0.0, 0.0};
            double g2 = 0.0;
            bool any_unknown = unknown_[ng[0]] >= 0;
            for (int a = 0; a < dim; ++a) {
              const int flipped = c ^ (1 << a);
              nc[a + 1] = {i + (flipped & 1), j + ((flipped >> 1) & 1), k + ((flipped >> 2) & 1)};
              ng[a + 1] = grid_.index(nc[a + 1][0], nc[a + 1][1], nc[a + 1][2]);
              any_unknown = any_unknown || unknown_[ng[a + 1]] >= 0;
              sgn[a] = 1.0 / dx[a];
              g[a] = (u[ng[a + 1]] - u[ng[0]]) * sgn[a];
              g2 += g[a] * g[a];
            }
            const double q = g2 + eps2;
            if (p_ == 2.0) {
              energy += weight * g2;
            } else {
              energy += weight * (std::pow(q, 0.5 * p_) - eps_p);
            }
            if (!grad || !any_unknown) continue;
            const double w = p_ == 2.0 ? 1.0 : std::pow(q, 0.5 * (p_ - 2.0));
            const double coef = weight * p_;
            // d g_a / d node: corner -1/dx_a, flipped_a +1/dx_a.
            for (int a = 0; a < dim; ++a) {
              const double fa = coef * w * g[a] * sgn[a];
              if (unknown_[ng[a + 1]] >= 0) (*grad)[unknown_[ng[a + 1]]] += fa;
              if (unknown_[ng[0]] >= 0) (*grad)[unknown_[ng[0]]] -= fa;
            }
            if (!hess) continue;
            // K = coef (w I + (p-2) w / q g g^T) in gradient coordinates.
            double K[3][3];
            const double cross = p_ == 2.0 ? 0.0 : (p_ - 2.0) * w / q;
            for (int a = 0; a < dim; ++a)
              for (int bb = 0; bb < dim; ++bb) K[a][bb] = coef * ((a == bb ? w : 0.0) + cross * g[a] * g[bb]);
            // B: row a has -sgn_a at local 0 and +sgn_a at local a+1.
            double B[3][4] = {};
            for (int a = 0; a < dim; ++a) {
              B[a][0] = -sgn[a];
              B[a][a + 1] = sgn[a];
            }
            const int nl = dim + 1;
            for (int al = 0; al < nl; ++al) {
              if (unknown_[ng[al]] < 0) continue;
              for (int be = 0; be <= al; ++be) {
                if (unknown_[ng[be]] < 0) continue;
                double hv = 0.0;
                for (int a = 0; a < dim; ++a) {
                  if (B[a][al] == 0.0) continue;
                  for (int bb = 0; bb < dim; ++bb) hv += B[a][al] * K[a][bb] * B[bb][be];
                }
                if (hv == 0.0) continue;
                const int s = slot(ng[al], nc[al], ng[be], nc[be]);
                if (s >= 0) val[s] += hv;
              }
            }
          }
        }
    if (asymptotic_) {
      const double e2 = eps_u_ * eps_u_, ep = std::pow(eps_u_, p_);
      for (std::size_t q = 0; q < unknown_nodes_.size(); ++q) {
        const std::size_t id = unknown_nodes_[q];
        const double cb = boundary_coef_[id];
        if (cb == 0.0) continue;
        const double v = u[id];
        const double m = v * v + e2;
        energy += cb * (std::pow(m, 0.5 * p_) - ep);
        if (grad) (*grad)[static_cast<Eigen::Index>(q)] += cb * p_ * v * std::pow(m, 0.5 * p_ - 1.0);
        if (hess) {
          const double hv = cb * p_ * std::pow(m, 0.5 * p_ - 2.0) * ((p_ - 1.0) * v * v + e2);
          val[matrix_.outerIndexPtr()[q]] += hv;
        }
      }
    }
    return energy;
  }

  bool solve_linear(const VectorXd& rhs, VectorXd& x) {
    if (grid_.dim == 2 || (p_ != 2.0 && matrix_.rows() <= kDirectLimit3d)) {
      if (!direct_.factorize(matrix_)) return false;
      x = direct_.solve(rhs);
      return x.allFinite();
    }
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower> cg;
    // Inexact Newton away from p = 2; the outer line search absorbs the slack.
    cg.setTolerance(p_ == 2.0 ? 1e-9 : 1e-5);
    cg.setMaxIterations(p_ == 2.0 ? 20000 : 2000);
    cg.compute(matrix_);
    if (cg.info() != Eigen::Success) return false;
    x = cg.solve(rhs);
    return x.allFinite();
  }

  double p_;
  CapacityOptions opts_;
  NodeGrid grid_;
  Point center_{};
  double diam_ = 0.0;
  double box_half_ = 0.0;
  bool asymptotic_ = false;
  double eps_ = 0.0, eps_u_ = 0.0;
  std::vector<double> value_;
  std::vector<int> unknown_;
  std::vector<std::size_t> unknown_nodes_;
  std::vector<double> boundary_coef_;
  std::array<int, 27> offset_slot_{};
  std::vector<std::uint32_t> col_mask_;
  SparseMatrix matrix_;
  detail::SpdSolver direct_;
};

void check_ratio(double v, const char* what) {
  if (!(v > 0.0 && v < 1.0)) throw Error(ErrorKind::DomainError, std::string(what) + " must lie in (0, 1)");
}

bool lex_less(const Point& a, const Point& b) {
  return std::tie(a[0], a[1], a[2]) < std::tie(b[0], b[1], b[2]);
}

// Centres on every second lattice cell, phased so that the cell nearest the
// coordinate origin is a centre.
struct CenterLattice {
  int dim;
  std::array<int, 3> phase{0, 0, 0};
  std::array<int, 3> count{1, 1, 1};

  explicit CenterLattice(const GridDomain& d) : dim(d.dim()) {
    for (int a = 0; a < dim; ++a) {
      const long zero = std::lround(-d.origin()[a] / d.h());
      phase[a] = static_cast<int>(((zero % 2) + 2) % 2);
      count[a] = (d.shape()[a] - 1 - phase[a]) / 2 + 1;
    }
  }
  std::array<int, 3> cell(const std::array<int, 3>& c) const {
    return {phase[0] + 2 * c[0], dim >= 2 ? phase[1] + 2 * c[1] : 0, dim == 3 ? phase[2] + 2 * c[2] : 0};
  }
};

}  // namespace

double unit_sphere_area(int n) {
  if (n == 2) return 2.0 * kPi;
  if (n == 3) return 4.0 * kPi;
  return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

double unit_ball_volume(int n) { return unit_sphere_area(n) / n; }

CapacityResult p_capacity(const GridDomain& F, double p, const CapacityOptions& opts) {
  if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorKind::InvalidExponent, "capacity needs 1 < p < inf");
  if (opts.box_factor < 4.0) throw Error(ErrorKind::InvalidConfig, "box_factor must be at least 4");
  if (F.dim() != 2 && F.dim() != 3) throw Error(ErrorKind::DimensionUnsupported, "capacity needs n = 2 or 3");
  if (F.count() == 0) throw Error(ErrorKind::EmptySet, "capacity of an empty set");
  CapacityProblem problem(F, p, opts);
  return problem.solve();
}

CapacityResult p_capacity(const GridDomain& F, double p, int n, double box_factor) {
  if (n != F.dim()) throw Error(ErrorKind::DimensionUnsupported, "n must match the grid dimension");
  CapacityOptions opts;
  opts.box_factor = box_factor;
  return p_capacity(F, p, opts);
}

double ball_capacity_exact(double r, int n, double p) {
  if (!(p > 1.0)) throw Error(ErrorKind::InvalidExponent, "ball capacity needs p > 1");
  if (p == n) throw Error(ErrorKind::ConformalCase, "ball capacity formula does not apply at p = n");
  if (r < 0.0) throw Error(ErrorKind::DomainError, "radius must be nonnegative");
  return std::pow(r, n - p) * unit_sphere_area(n) * std::pow(std::abs(n - p) / (p - 1.0), p - 1.0);
}

double isocapacity_lower_bound(double volume, int n, double p) {
  if (!(p > 1.0)) throw Error(ErrorKind::InvalidExponent, "isocapacity bound needs p > 1");
  if (p >= n) throw Error(ErrorKind::ExponentOutOfRange, "isocapacity bound needs p < n");
  if (volume < 0.0) throw Error(ErrorKind::DomainError, "volume must be nonnegative");
  const double w = unit_sphere_area(n);
  return std::pow(w, p / n) * std::pow(static_cast<double>(n), (n - p) / n) *
         std::pow((n - p) / (p - 1.0), p - 1.0) * std::pow(volume, (n - p) / n);
}

bool is_negligible(double f_cap, double r, int n, double p, double gamma) {
  check_ratio(gamma, "gamma");
  return f_cap <= gamma * ball_capacity_exact(r, n, p);
}

bool ball_complement(const GridDomain& d, const Point& center, double r, GridDomain& out) {
  const int dim = d.dim();
  const double h = d.h();
  std::array<int, 3> lo{0, 0, 0}, n{1, 1, 1};
  for (int a = 0; a < dim; ++a) {
    lo[a] = static_cast<int>(std::floor((center[a] - r - d.origin()[a]) / h)) - 2;
    const int hi = static_cast<int>(std::ceil((center[a] + r - d.origin()[a]) / h)) + 2;
    n[a] = hi - lo[a] + 1;
  }
  Point origin{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) origin[a] = d.origin()[a] + h * lo[a];
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n[0]) * n[1] * n[2], 0);
  const double r2 = r * r * (1.0 + 1e-12);
  bool any = false;
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) {
        const std::array<int, 3> g{lo[0] + i, lo[1] + j, lo[2] + k};
        double s = 0.0;
        for (int a = 0; a < dim; ++a) {
          const double x = d.origin()[a] + h * g[a] - center[a];
          s += x * x;
        }
        if (s > r2 || d.inside(g[0], g[1], g[2])) continue;
        mask[(static_cast<std::size_t>(k) * n[1] + j) * n[0] + i] = 1;
        any = true;
      }
  if (!any) return false;
  out = GridDomain(dim, {n[0], n[1], n[2]}, h, origin, std::move(mask));
  return true;
}

namespace {

class CapacitySearch {
 public:
  CapacitySearch(const GridDomain& d, double gamma, double p, const RadiusSearchOptions& opts)
      : d_(d), gamma_(gamma), p_(p), n_(d.dim()), opts_(opts), lattice_(d) {}

  RadiusSearchResult run() {
    RadiusSearchResult res;
    res.kind = RadiusKind::capacity_gamma;
    res.parameter = gamma_;
    const double h = d_.h();
    const auto dt = distance_to_complement(d_);

    // Best inscribed centre on the lattice.
    double best_r = 0.0;
    const auto first = lattice_.cell({0, 0, 0});
    Point best_c = d_.center(first[0], first[1], first[2]);
    bool have = false;
    for_each_center([&](const Point& c, const std::array<int, 3>& cell) {
      const std::size_t idx = d_.index(cell[0], cell[1], cell[2]);
      const double r0 = d_.inside(idx) ? dt[idx] - 0.5 * h : 0.0;
      if (!have || r0 > best_r || (r0 == best_r && lex_less(c, best_c))) {
        best_r = r0;
        best_c = c;
        have = true;
      }
    });
    best_r = expand(best_c, best_r);

    for (;;) {
      const double target = best_r + 0.5 * h;
      std::vector<Point> found;
      find_all(target, found);
      if (found.empty()) break;
      const Point c = *std::min_element(found.begin(), found.end(), lex_less);
      const double r = expand(c, target);
      if (r > best_r) {
        best_r = r;
        best_c = c;
      }
    }
    std::vector<Point> ties;
    find_all(best_r, ties);
    if (!ties.empty()) best_c = *std::min_element(ties.begin(), ties.end(), lex_less);

    res.radius = best_r;
    res.center = best_c;
    res.capacity_solves = solves_;
    res.trace = std::move(trace_);
    return res;
  }

 private:
  template <class Fn>
  void for_each_center(Fn&& fn) const {
    for (int k = 0; k < lattice_.count[2]; ++k)
      for (int j = 0; j < lattice_.count[1]; ++j)
        for (int i = 0; i < lattice_.count[0]; ++i) {
          const auto cell = lattice_.cell({i, j, k});
          fn(d_.center(cell[0], cell[1], cell[2]), cell);
        }
  }

  double threshold(double r) const { return gamma_ * ball_capacity_exact(r, n_, p_); }

  // Whether cap(B_r(c) \ Omega) exceeds `limit`; cap < 0 marks a screened decision.
  std::pair<bool, double> exceeds(const Point& c, double r, double limit) {
    GridDomain F;
    if (r <= 0.0 || !ball_complement(d_, c, r, F)) return {false, 0.0};
    const double h = d_.h();
    // Enclosing ball of F bounds its capacity from above.
    double enclosing = 0.0;
    if (n_ == 2) {
      enclosing = min_enclosing_circle(F)[2];
    } else {
      for (std::size_t idx = 0; idx < F.size(); ++idx) {
        if (!F.inside(idx)) continue;
        const Point x = F.center(idx);
        double s = 0.0;
        for (int a = 0; a < n_; ++a) s += (x[a] - c[a]) * (x[a] - c[a]);
        enclosing = std::max(enclosing, std::sqrt(s));
      }
    }
    if (ball_capacity_exact(enclosing + h, n_, p_) <= limit) return {false, -1.0};
    // A ball inside F bounds it from below.
    const auto inner = distance_to_complement(F);
    const double s = *std::max_element(inner.begin(), inner.end()) - h;
    if (s > 0.0 && ball_capacity_exact(s, n_, p_) > limit) return {true, -1.0};

    const auto key = std::make_tuple(c[0], c[1], c[2], r);
    auto it = cache_.find(key);
    double cap;
    if (it != cache_.end()) {
      cap = it->second;
    } else {
      cap = p_capacity(F, p_, opts_.capacity).value;
      ++solves_;
      cache_.emplace(key, cap);
    }
    return {cap > limit, cap};
  }

  bool negligible_at(const Point& c, double r) {
    const auto [over, cap] = exceeds(c, r, threshold(r));
    if (opts_.record_trace) trace_.push_back({c, r, cap, !over});
    return !over;
  }

  double expand(const Point& c, double r_ok) {
    const double h = d_.h();
    double limit = 0.0;
    for (int a = 0; a < n_; ++a) limit += std::pow(d_.shape()[a] * h, 2);
    limit = std::sqrt(limit);
    double step = 0.5 * h, r_fail = -1.0;
    while (r_ok < limit) {
      const double r = r_ok + step;
      if (!negligible_at(c, r)) {
        r_fail = r;
        break;
      }
      r_ok = r;
      step *= 2.0;
    }
    if (r_fail < 0.0) return r_ok;
    while (r_fail - r_ok > 0.5 * h) {
      const double mid = 0.5 * (r_ok + r_fail);
      if (negligible_at(c, mid)) r_ok = mid;
      else r_fail = mid;
    }
    return r_ok;
  }

  void find_all(double target, std::vector<Point>& found) {
    std::array<int, 3> lo{0, 0, 0}, hi{lattice_.count[0] - 1, lattice_.count[1] - 1, lattice_.count[2] - 1};
    visit(lo, hi, target, found);
  }

  void visit(const std::array<int, 3>& lo, const std::array<int, 3>& hi, double target, std::vector<Point>& found) {
    const auto cell_lo = lattice_.cell(lo), cell_hi = lattice_.cell(hi);
    const Point a = d_.center(cell_lo[0], cell_lo[1], cell_lo[2]);
    const Point b = d_.center(cell_hi[0], cell_hi[1], cell_hi[2]);
    if (lo == hi) {
      if (negligible_at(a, target)) found.push_back(a);
      return;
    }
    Point mid{0.0, 0.0, 0.0};
    double half_diag = 0.0;
    for (int ax = 0; ax < n_; ++ax) {
      mid[ax] = 0.5 * (a[ax] + b[ax]);
      half_diag += 0.25 * (b[ax] - a[ax]) * (b[ax] - a[ax]);
    }
    half_diag = std::sqrt(half_diag);
    // Every ball B_target(c) with c in the block contains B_{target - half_diag}(mid).
    const double inner = target - half_diag;
    if (inner > 0.0 && exceeds(mid, inner, threshold(target)).first) return;
    std::array<std::array<int, 2>, 3> split;
    for (int ax = 0; ax < 3; ++ax) {
      const int m = (lo[ax] + hi[ax]) / 2;
      split[ax] = {m, hi[ax]};
    }
    for (int zk = 0; zk < (lo[2] < hi[2] ? 2 : 1); ++zk)
      for (int yk = 0; yk < (lo[1] < hi[1] ? 2 : 1); ++yk)
        for (int xk = 0; xk < (lo[0] < hi[0] ? 2 : 1); ++xk) {
          std::array<int, 3> clo, chi;
          const std::array<int, 3> pick{xk, yk, zk};
          for (int ax = 0; ax < 3; ++ax) {
            if (lo[ax] == hi[ax]) {
              clo[ax] = lo[ax];
              chi[ax] = hi[ax];
            } else if (pick[ax] == 0) {
              clo[ax] = lo[ax];
              chi[ax] = split[ax][0];
            } else {
              clo[ax] = split[ax][0] + 1;
              chi[ax] = hi[ax];
            }
          }
          visit(clo, chi, target, found);
        }
  }

  const GridDomain& d_;
  double gamma_, p_;
  int n_;
  RadiusSearchOptions opts_;
  CenterLattice lattice_;
  std::map<std::tuple<double, double, double, double>, double> cache_;
  int solves_ = 0;
  std::vector<SearchTraceRow> trace_;
};

}  // namespace

RadiusSearchResult capacity_radius(const GridDomain& d, double gamma, double p, int n,
                                   const RadiusSearchOptions& opts) {
  check_ratio(gamma, "gamma");
  if (n != d.dim()) throw Error(ErrorKind::DimensionUnsupported, "n must match the grid dimension");
  if (!(p > 1.0) || p >= n) throw Error(ErrorKind::ExponentOutOfRange, "capacity radius needs 1 < p < n");
  d.validate();
  return CapacitySearch(d, gamma, p, opts).run();
}

RadiusSearchResult lieb_radius(const GridDomain& d, double alpha) {
  check_ratio(alpha, "alpha");
  d.validate();
  const int n = d.dim();
  const double h = d.h();
  const double cell = std::pow(h, n);
  const double area = static_cast<double>(d.count()) * cell;
  // Beyond this radius more than alpha of any ball lies outside.
  const double r_max = 1.05 * std::pow(area / ((1.0 - alpha) * unit_ball_volume(n)), 1.0 / n) + 3.0 * h;
  const int m = static_cast<int>(std::ceil(r_max / h));

  struct Offset {
    std::array<int, 3> v;
    long q;
  };
  std::vector<Offset> offsets;
  for (int k = (n == 3 ? -m : 0); k <= (n == 3 ? m : 0); ++k)
    for (int j = -m; j <= m; ++j)
      for (int i = -m; i <= m; ++i) {
        const long q = static_cast<long>(i) * i + static_cast<long>(j) * j + static_cast<long>(k) * k;
        if (q <= static_cast<long>(m) * m) offsets.push_back({{i, j, k}, q});
      }
  std::stable_sort(offsets.begin(), offsets.end(), [](const Offset& a, const Offset& b) { return a.q < b.q; });

  RadiusSearchResult res;
  res.kind = RadiusKind::lieb_alpha;
  res.parameter = alpha;
  bool have = false;
  const CenterLattice lattice(d);
  const double budget = alpha * unit_ball_volume(n) / cell;  // in cells per unit r^n
  for (int ck = 0; ck < lattice.count[2]; ++ck)
    for (int cj = 0; cj < lattice.count[1]; ++cj)
      for (int ci = 0; ci < lattice.count[0]; ++ci) {
        const auto cc = lattice.cell({ci, cj, ck});
        long outside = 0;
        double best = 0.0;
        std::size_t g = 0;
        while (g < offsets.size()) {
          const long q = offsets[g].q;
          const double r = h * std::sqrt(static_cast<double>(q));
          // Radii just below r see the count accumulated so far.
          if (q > 0 && outside <= budget * std::pow(r, n)) best = r;
          for (; g < offsets.size() && offsets[g].q == q; ++g) {
            const auto& v = offsets[g].v;
            if (!d.inside(cc[0] + v[0], cc[1] + v[1], cc[2] + v[2])) ++outside;
          }
          if (q > 0 && outside <= budget * std::pow(r, n)) best = r;
        }
        const Point c = d.center(cc[0], cc[1], cc[2]);
        if (!have || best > res.radius || (best == res.radius && lex_less(c, res.center))) {
          res.radius = best;
          res.center = c;
          have = true;
        }
      }
  return res;
}

double lieb_sigma(int n, double p, double alpha, double lambda_ball1) {
  check_ratio(alpha, "alpha");
  return lambda_ball1 * std::pow(1.0 / unit_ball_volume(n), p / n) * std::pow(std::pow(alpha, -1.0 / n) - 1.0, p);
}

double covering_multiplicity_bound(int n) {
  if (n < 2) throw Error(ErrorKind::DomainError, "covering bound needs n >= 2");
  const double x = n;
  return x * std::log(x) + x * std::log(std::log(x)) + 5.0 * x;
}

void write_trace_csv(const RadiusSearchResult& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << "center_x,center_y,r,cap,negligible\n";
  char buf[256];
  for (const auto& row : r.trace) {
    if (row.cap < 0.0)
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,,%d\n", row.center[0], row.center[1], row.r, row.negligible ? 1 : 0);
    else
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%d\n", row.center[0], row.center[1], row.r, row.cap,
                    row.negligible ? 1 : 0);
    out << buf;
  }
}

}  // namespace pspec
