#include "pspec/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pspec/cheeger.hpp"
#include "pspec/geometry.hpp"
#include "spd_solver.hpp"

namespace pspec {

namespace {

using detail::SparseMatrix;
using Eigen::VectorXd;

// Forward-difference p-Dirichlet energy restricted to the interior unknowns.
class DirichletEnergy {
 public:
  explicit DirichletEnergy(const GridDomain& d) : dim_(d.dim()), h_(d.h()) {
    unknown_.assign(d.size(), -1);
    for (std::size_t idx = 0; idx < d.size(); ++idx)
      if (d.inside(idx)) {
        unknown_[idx] = static_cast<int>(cells_of_unknown_.size());
        cells_of_unknown_.push_back(idx);
      }
    // A cell carries a gradient term when it or one of its forward neighbours is interior.
    for (std::size_t idx = 0; idx < d.size(); ++idx) {
      const auto c = d.coords(idx);
      Cell cell;
      cell.self = unknown_[idx];
      bool any = cell.self >= 0;
      for (int a = 0; a < dim_; ++a) {
        auto n = c;
        ++n[a];
        cell.next[a] = d.in_bounds(n[0], n[1], n[2]) ? unknown_[d.index(n[0], n[1], n[2])] : -1;
        any = any || cell.next[a] >= 0;
      }
      if (any) cells_.push_back(cell);
    }
    build_pattern();
  }

  int unknowns() const { return static_cast<int>(cells_of_unknown_.size()); }
  const std::vector<std::size_t>& cells_of_unknown() const { return cells_of_unknown_; }
  const std::vector<int>& unknown_of_cell() const { return unknown_; }
  double volume() const { return dim_ == 3 ? h_ * h_ * h_ : h_ * h_; }

  // Squared gradient norm per stencil cell.
  void gradient_squares(const VectorXd& u, std::vector<double>& s) const {
    s.resize(cells_.size());
    const double inv_h2 = 1.0 / (h_ * h_);
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      const Cell& cell = cells_[c];
      const double base = cell.self >= 0 ? u[cell.self] : 0.0;
      double acc = 0.0;
      for (int a = 0; a < dim_; ++a) {
        const double nb = cell.next[a] >= 0 ? u[cell.next[a]] : 0.0;
        acc += (nb - base) * (nb - base);
      }
      s[c] = acc * inv_h2;
    }
  }

  double energy(const std::vector<double>& s, double p, double eps) const {
    const double eps2 = eps * eps, offset = std::pow(eps, p);
    double e = 0.0;
    for (double v : s) e += std::pow(v + eps2, 0.5 * p) - offset;
    return e * volume();
  }

  static double norm_p(const VectorXd& u, double p, double vol) {
    double n = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) n += std::pow(std::abs(u[i]), p);
    return n * vol;
  }

  // y = A(w) u with A(w) = sum_cells w_c h^(n-2) G_c^T G_c.
  void apply(const std::vector<double>& w, const VectorXd& u, VectorXd& y) const {
    y.setZero(u.size());
    const double scale = dim_ == 3 ? h_ : 1.0;
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      const Cell& cell = cells_[c];
      const double base = cell.self >= 0 ? u[cell.self] : 0.0;
      const double wc = w[c] * scale;
      for (int a = 0; a < dim_; ++a) {
        const int nb_id = cell.next[a];
        const double diff = (nb_id >= 0 ? u[nb_id] : 0.0) - base;
        if (nb_id >= 0) y[nb_id] += wc * diff;
        if (cell.self >= 0) y[cell.self] -= wc * diff;
      }
    }
  }

  const SparseMatrix& assemble(const std::vector<double>& w) {
    double* val = matrix_.valuePtr();
    std::fill(val, val + matrix_.nonZeros(), 0.0);
    const double scale = dim_ == 3 ? h_ : 1.0;
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      const double wc = w[c] * scale;
      for (int a = 0; a < dim_; ++a) {
        const Slots& sl = slots_[c * 3 + a];
        if (sl.diag_self >= 0) val[sl.diag_self] += wc;
        if (sl.diag_next >= 0) val[sl.diag_next] += wc;
        if (sl.off >= 0) val[sl.off] -= wc;
      }
    }
    return matrix_;
  }

  std::size_t cell_count() const { return cells_.size(); }

 private:
  struct Cell {
    int self = -1;
    std::array<int, 3> next{-1, -1, -1};
  };
  struct Slots {
    int diag_self = -1, diag_next = -1, off = -1;
  };

  void build_pattern() {
    const int n = unknowns();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * (dim_ + 1));
    for (int i = 0; i < n; ++i) trip.emplace_back(i, i, 1.0);
    for (const Cell& cell : cells_)
      for (int a = 0; a < dim_; ++a)
        if (cell.self >= 0 && cell.next[a] >= 0)
          trip.emplace_back(std::max(cell.self, cell.next[a]), std::min(cell.self, cell.next[a]), 1.0);
    matrix_.resize(n, n);
    matrix_.setFromTriplets(trip.begin(), trip.end());
    matrix_.makeCompressed();
    slots_.assign(cells_.size() * 3, Slots{});
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      const Cell& cell = cells_[c];
      for (int a = 0; a < dim_; ++a) {
        Slots& sl = slots_[c * 3 + a];
        if (cell.self < 0 && cell.next[a] < 0) continue;
        if (cell.self >= 0) sl.diag_self = detail::slot_of(matrix_, cell.self, cell.self);
        if (cell.next[a] >= 0) sl.diag_next = detail::slot_of(matrix_, cell.next[a], cell.next[a]);
        if (cell.self >= 0 && cell.next[a] >= 0)
          sl.off = detail::slot_of(matrix_, std::max(cell.self, cell.next[a]),
                                   std::min(cell.self, cell.next[a]));
      }
    }
  }

  int dim_;
  double h_;
  std::vector<int> unknown_;
  std::vector<std::size_t> cells_of_unknown_;
  std::vector<Cell> cells_;
  std::vector<Slots> slots_;
  SparseMatrix matrix_;
};

double domain_diameter(const GridDomain& d) {
  Point lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
  for (std::size_t idx = 0; idx < d.size(); ++idx) {
    if (!d.inside(idx)) continue;
    const Point c = d.center(idx);
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], c[a]);
      hi[a] = std::max(hi[a], c[a]);
    }
  }
  double s = 0.0;
  for (int a = 0; a < d.dim(); ++a) s += (hi[a] - lo[a] + d.h()) * (hi[a] - lo[a] + d.h());
  return std::sqrt(s);
}

void normalize(VectorXd& u, double p, double vol) {
  const double n = DirichletEnergy::norm_p(u, p, vol);
  u /= std::pow(n, 1.0 / p);
}

ScalarField to_field(const GridDomain& d, const DirichletEnergy& op, const VectorXd& u) {
  ScalarField f = ScalarField::zeros(d);
  const auto& cells = op.cells_of_unknown();
  for (std::size_t i = 0; i < cells.size(); ++i) f.values[cells[i]] = u[static_cast<Eigen::Index>(i)];
  return f;
}

struct StageResult {
  double lambda_reg = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Descent at a fixed exponent. Direction: A_pc^{-1} (lambda D(u) - A(u) u), where A(u) is
// the weighted forward-difference Laplacian of the regularized energy and A_pc the same
// operator with a floor on the weights; with A_pc = A and unit step this is the
// nonlinear inverse iteration, and at p = 2 the linear inverse power method.
StageResult descend(DirichletEnergy& op, VectorXd& u, double p, double eps, double tol,
                    int max_iter, std::vector<double>* history) {
  const double vol = op.volume();
  const bool linear = p == 2.0;
  std::vector<double> s, w, w_pc, s_trial;
  detail::SpdSolver solver;
  bool factored = false;
  VectorXd Au, Du, r, trial;
  StageResult out;

  normalize(u, p, vol);
  op.gradient_squares(u, s);
  double lambda = op.energy(s, p, eps);  // unit p-norm
  if (history) history->push_back(lambda);

  for (int it = 0; it < max_iter; ++it) {
    const double eps2 = eps * eps;
    w.resize(s.size());
    if (linear) {
      std::fill(w.begin(), w.end(), 1.0);
    } else {
      double wmax = 0.0;
      for (std::size_t c = 0; c < s.size(); ++c) {
        w[c] = std::pow(s[c] + eps2, 0.5 * (p - 2.0));
        wmax = std::max(wmax, w[c]);
      }
      w_pc = w;
      // The preconditioner must stay definite where the true weight degenerates (p > 2).
      const double floor = 1e-6 * wmax;
      for (double& x : w_pc) x = std::max(x, floor);
    }
    if (!linear || !factored) {
      solver.factorize(op.assemble(linear ? w : w_pc));
      factored = true;
    }
    op.apply(w, u, Au);
    Du.resize(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i)
      Du[i] = std::copysign(std::pow(std::abs(u[i]), p - 1.0), u[i]) * vol;
    r = lambda * Du - Au;
    const VectorXd dir = solver.solve(r);

    double step = 1.0;
    bool accepted = false;
    double lambda_new = lambda;
    for (int ls = 0; ls < 40; ++ls) {
      trial = u + step * dir;
      normalize(trial, p, vol);
      op.gradient_squares(trial, s_trial);
      lambda_new = op.energy(s_trial, p, eps);
      if (lambda_new <= lambda) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++out.iterations;
    if (!accepted) {
      // No representable decrease along a descent direction: stationary to round-off.
      out.converged = true;
      out.residual = 0.0;
      break;
    }
    u.swap(trial);
    s.swap(s_trial);
    const double rel = (lambda - lambda_new) / lambda_new;
    lambda = lambda_new;
    if (history) history->push_back(lambda);
    out.residual = rel;
    if (rel < tol) {
      out.converged = true;
      break;
    }
  }
  out.lambda_reg = lambda;
  return out;
}

std::vector<double> p_ladder(double p, double step) {
  std::vector<double> ladder{2.0};
  if (p == 2.0) return ladder;
  const double dir = p > 2.0 ? 1.0 : -1.0;
  double q = 2.0;
  while (std::abs(p - q) > step + 1e-12) {
    q += dir * step;
    ladder.push_back(q);
  }
  ladder.push_back(p);
  return ladder;
}

}  // namespace

double rayleigh_quotient(const GridDomain& d, const ScalarField& u, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorKind::InvalidExponent, "p must lie in [1, inf)");
  if (u.values.size() != d.size()) throw Error(ErrorKind::InvalidDomain, "field does not match domain");
  const double h = d.h();
  double num = 0.0, den = 0.0;
  auto val = [&](int i, int j, int k) {
    return d.inside(i, j, k) ? u.values[d.index(i, j, k)] : 0.0;
  };
  for (std::size_t idx = 0; idx < d.size(); ++idx) {
    const auto c = d.coords(idx);
    const double base = d.inside(idx) ? u.values[idx] : 0.0;
    double g2 = 0.0;
    bool touches = d.inside(idx);
    for (int a = 0; a < d.dim(); ++a) {
      auto n = c;
      ++n[a];
      const double nb = val(n[0], n[1], n[2]);
      touches = touches || d.inside(n[0], n[1], n[2]);
      g2 += (nb - base) * (nb - base);
    }
    if (touches) num += std::pow(std::sqrt(g2) / h, p);
    if (d.inside(idx)) den += std::pow(std::abs(base), p);
  }
  if (den == 0.0) throw Error(ErrorKind::ZeroTrialFunction, "trial function vanishes on the domain");
  return num / den;
}

double default_epsilon(const GridDomain& d, double p) {
  if (p >= 2.0) return 0.0;
  return 1e-8 * domain_diameter(d) / d.h();
}

EigenResult solve_first_eigen(const GridDomain& d, double p, const SolveOptions& opts) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw Error(ErrorKind::InvalidExponent, "solve_first_eigen needs 1 < p < inf");
  if (!(opts.tol > 0.0) || !(opts.continuation_step > 0.0))
    throw Error(ErrorKind::InvalidConfig, "tol and continuation_step must be positive");
  d.validate();
  DirichletEnergy op(d);
  VectorXd u = VectorXd::Ones(op.unknowns());

  EigenResult res;
  res.p = p;
  res.h = d.h();
  const auto ladder = p_ladder(p, opts.continuation_step);
  int budget = opts.max_iter;
  StageResult last;
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const double q = ladder[k];
    const bool final_stage = k + 1 == ladder.size();
    const double eps = opts.epsilon_reg >= 0.0 ? opts.epsilon_reg : default_epsilon(d, q);
    last = descend(op, u, q, eps, final_stage ? opts.tol : std::max(opts.tol, opts.ladder_tol),
                   budget, final_stage && opts.record_history ? &res.history : nullptr);
    budget -= last.iterations;
    res.iterations += last.iterations;
    if (final_stage) res.epsilon_reg = eps;
    if (!last.converged) break;
  }
  if (u.sum() < 0.0) u = -u;
  normalize(u, p, op.volume());
  res.field = to_field(d, op, u);
  res.lambda = rayleigh_quotient(d, res.field, p);
  res.residual = last.residual;
  if (!last.converged) {
    std::ostringstream os;
    os << "no convergence within " << opts.max_iter << " iterations at p = " << p
       << " (last relative change " << last.residual << ")";
    throw NonConvergence(os.str(), res);
  }
  return res;
}

double eigen_limit_case(const GridDomain& d, LimitCase which) {
  if (which == LimitCase::p_infinity) return 1.0 / inradius(d);
  if (d.dim() != 2) throw Error(ErrorKind::DimensionUnsupported, "p = 1 limit is planar here");
  return cheeger_constant(d).h;
}

double rescale_lambda(double lambda, double p, double t) {
  if (!(t > 0.0)) throw Error(ErrorKind::DomainError, "scale must be positive");
  return lambda * std::pow(t, -p);
}

}  // namespace pspec
