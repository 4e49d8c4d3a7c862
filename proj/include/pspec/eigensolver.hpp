#pragma once

#include <vector>

#include "pspec/error.hpp"
#include "pspec/grid.hpp"

namespace pspec {

struct SolveOptions {
  // Regularization scale of the degenerate gradient weight; negative selects the
  // default (1e-8 * diameter / h for p < 2, zero otherwise).
  double epsilon_reg = -1.0;
  double tol = 1e-7;
  int max_iter = 50000;
  double continuation_step = 0.25;
  // Relative tolerance for the intermediate rungs of the p-ladder.
  double ladder_tol = 1e-5;
  bool record_history = false;
};

struct EigenResult {
  double p = 2.0;
  double lambda = 0.0;
  ScalarField field;  // unit discrete p-norm, nonnegative
  int iterations = 0;
  double residual = 0.0;
  double h = 0.0;
  double epsilon_reg = 0.0;
  // Regularized quotient after every accepted step at the target exponent.
  std::vector<double> history;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, EigenResult last)
      : Error(ErrorKind::NonConvergence, what), last_(std::move(last)) {}
  const EigenResult& last_iterate() const { return last_; }

 private:
  EigenResult last_;
};

// sum |grad u|^p h^n / sum |u|^p h^n with forward differences and zero ghost values
// outside the mask. Values of u on false cells are ignored (treated as zero).
double rayleigh_quotient(const GridDomain& d, const ScalarField& u, double p);

// Principal frequency by normalized descent on the regularized discrete quotient,
// warm-started from the linear ground state through a ladder in p.
EigenResult solve_first_eigen(const GridDomain& d, double p, const SolveOptions& opts = {});

enum class LimitCase { p_one, p_infinity };

// p_one: Cheeger constant estimate (level-set sweep); p_infinity: 1 / inradius.
double eigen_limit_case(const GridDomain& d, LimitCase which);

// lambda * t^(-p): the principal frequency of the domain dilated by t.
double rescale_lambda(double lambda, double p, double t);

double default_epsilon(const GridDomain& d, double p);

}  // namespace pspec
