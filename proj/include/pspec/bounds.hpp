#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pspec/capacity.hpp"
#include "pspec/eigensolver.hpp"
#include "pspec/geometry.hpp"
#include "pspec/grid.hpp"
#include "pspec/shapes.hpp"

namespace pspec {

enum class BoundId {
  DOMAIN_MONOTONICITY_UPPER,
  FABER_KRAHN,
  CHEEGER_LOWER,
  OSSERMAN_CROKE_SIMPLE,
  OSSERMAN_CROKE_K,
  MAKAI_P1,
  LIEB_LOWER,
  CONVEX_LOWER,
  INFTY_IDENTITY,
  MAZYA_SHUBIN_RATIO,
  LIEB_VS_CAPACITY_RADIUS,
  HIGH_P_INRADIUS,
};

const std::vector<BoundId>& all_bound_ids();
std::string to_string(BoundId id);
// Throws ConfigParse naming the bad id.
BoundId bound_id_from_string(const std::string& name);

// Ids whose reports describe a whole catalog rather than a single domain.
bool is_family_bound(BoundId id);

struct BoundReport {
  BoundId id = BoundId::FABER_KRAHN;
  double p = 0.0;  // 1 for MAKAI_P1, +inf for INFTY_IDENTITY
  std::string domain;
  double lhs = 0.0;
  double rhs = 0.0;
  // Allowance in the units of lhs and rhs for discretization error.
  double tolerance = 0.0;
  bool equality = false;  // identity checks: |lhs - rhs| <= tolerance
  bool satisfied = false;
  double slack = 0.0;
  bool skipped = false;
  std::string skip_reason;
  std::string error;  // solver failure; counts as unsatisfied
  std::string property_level = "instance";
  std::vector<std::pair<std::string, double>> inputs;
};

struct BoundParams {
  std::optional<double> alpha;
  std::optional<double> gamma;
  std::string label;
  // Lattice for the radius searches; defaults to the eigen lattice.
  std::optional<GridDomain> search_domain;
  SolveOptions solve;
  RadiusSearchOptions search;
};

// Shared caches of eigen solves, geometry and radius searches keyed by domain content.
class BoundEngine {
 public:
  BoundEngine();
  ~BoundEngine();
  BoundEngine(const BoundEngine&) = delete;
  BoundEngine& operator=(const BoundEngine&) = delete;

  EigenResult eigen(const GridDomain& d, double p, const SolveOptions& opts = {});
  double lambda_ball1(double p, double h, const SolveOptions& opts = {});
  GeometrySummary geometry(const GridDomain& d);
  double cheeger(const GridDomain& d);
  RadiusSearchResult capacity_radius(const GridDomain& d, double gamma, double p, const RadiusSearchOptions& opts);
  RadiusSearchResult lieb_radius(const GridDomain& d, double alpha);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Throws PreconditionViolated when the id does not apply to (d, p) and MissingParam
// when a required parameter is absent.
BoundReport evaluate_bound(BoundId id, const GridDomain& d, double p, const BoundParams& params);
BoundReport evaluate_bound(BoundEngine& engine, BoundId id, const GridDomain& d, double p,
                           const BoundParams& params);

struct SuiteConfig {
  double h = 1.0 / 64.0;
  double capacity_h = 1.0 / 32.0;
  std::vector<BoundId> bounds;  // empty selects all
  double gamma = 0.5;
  double alpha = 0.5;
  int threads = 0;  // 0: hardware concurrency capped by PSPEC_THREADS
  SolveOptions solve;
  RadiusSearchOptions search;
};

// Every applicable id on every (shape, p), ordered by catalog, then p, then id;
// family reports follow. Never throws for a single failing item.
std::vector<BoundReport> run_suite(const std::vector<ShapeSpec>& catalog, const std::vector<double>& ps,
                                   const SuiteConfig& config, BoundEngine* engine = nullptr);

// Worker count: hardware concurrency, capped by PSPEC_THREADS when set.
int default_thread_count();

}  // namespace pspec
