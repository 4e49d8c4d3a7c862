// Acceptance checks. Prints one PASS/FAIL line per criterion; exits nonzero on any failure.
// Usage: pspec_acceptance [data_dir] [criterion...]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "../oracles.hpp"
#include "pspec/bounds.hpp"
#include "pspec/capacity.hpp"
#include "pspec/cheeger.hpp"
#include "pspec/eigensolver.hpp"
#include "pspec/geometry.hpp"
#include "pspec/nodal.hpp"
#include "pspec/runner.hpp"

using namespace pspec;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    if (!detail.empty()) detail += "; ";
    detail += buf;
    if (!ok) {
      detail += " [x]";
      pass = false;
    }
  }
};

GridDomain raster(const char* name, double h) { return rasterize_shape(shape_by_name(name), h); }

BoundEngine& engine() {
  static BoundEngine e;
  return e;
}

// Suite shared by criteria 3 and 7.
const std::vector<BoundReport>& standard_suite(double* elapsed = nullptr) {
  static double seconds = 0.0;
  static const std::vector<BoundReport> reports = [] {
    const auto t0 = Clock::now();
    SuiteConfig cfg;  // h = 1/64, capacity lattice 1/32, gamma = alpha = 0.5
    auto r = run_suite(standard_catalog(), {1.5, 2.0, 3.0}, cfg, &engine());
    seconds = seconds_since(t0);
    return r;
  }();
  if (elapsed) *elapsed = seconds;
  return reports;
}

Outcome eigen_oracles() {
  Outcome o;
  const double h = 1.0 / 256.0;
  auto t0 = Clock::now();
  const double disk = solve_first_eigen(raster("disk", h), 2.0).lambda;
  const double t_disk = seconds_since(t0);
  t0 = Clock::now();
  const double square = solve_first_eigen(raster("square", h), 2.0).lambda;
  const double t_square = seconds_since(t0);
  o.require(rel(disk, oracle::disk_lambda2()) <= 0.01, "disk %.6f vs %.6f", disk, oracle::disk_lambda2());
  o.require(rel(square, oracle::square_lambda2()) <= 0.01, "square %.6f vs %.6f", square, oracle::square_lambda2());
  o.require(t_disk < 60.0 && t_square < 60.0, "times %.2fs, %.2fs", t_disk, t_square);
  return o;
}

Outcome scaling_law() {
  Outcome o;
  const double h = 1.0 / 64.0;
  double worst = 0.0;
  for (const char* name : {"disk", "square"}) {
    const ShapeSpec spec = shape_by_name(name);
    for (double p : {1.5, 2.0, 3.0}) {
      const double base = engine().eigen(rasterize_shape(spec, h), p).lambda;
      for (double t : {0.5, 2.0}) {
        const double lt = engine().eigen(rasterize_shape(scaled(spec, t), h), p).lambda;
        worst = std::max(worst, rel(lt * std::pow(t, p), base));
      }
    }
  }
  o.require(worst <= 0.02, "max |lambda(t)t^p - lambda|/lambda = %.4f", worst);
  return o;
}

Outcome soundness_sweep() {
  Outcome o;
  double elapsed = 0.0;
  const auto& reports = standard_suite(&elapsed);
  int checked = 0, violated = 0, errors = 0, skipped = 0;
  std::set<std::string> ids_checked;
  for (const auto& r : reports) {
    if (r.skipped) {
      ++skipped;
      continue;
    }
    if (!r.error.empty()) {
      ++errors;
      std::fprintf(stderr, "  error: %s %s p=%g: %s\n", to_string(r.id).c_str(), r.domain.c_str(), r.p,
                   r.error.c_str());
      continue;
    }
    ++checked;
    ids_checked.insert(to_string(r.id));
    if (!r.satisfied) {
      ++violated;
      std::fprintf(stderr, "  violated: %s %s p=%g lhs=%g rhs=%g\n", to_string(r.id).c_str(), r.domain.c_str(), r.p,
                   r.lhs, r.rhs);
    }
  }
  o.require(violated == 0 && errors == 0, "%d checked, %d violated, %d errors, %d skipped", checked, violated, errors,
            skipped);
  o.require(ids_checked.size() == all_bound_ids().size(), "%zu of %zu ids exercised", ids_checked.size(),
            all_bound_ids().size());
  o.require(elapsed < 1800.0, "%.1fs", elapsed);
  return o;
}

Outcome cheeger_accuracy() {
  Outcome o;
  const double h = 1.0 / 128.0;
  const double disk = cheeger_constant(raster("disk", h)).h;
  const double square = cheeger_constant(raster("square", h)).h;
  o.require(disk >= 2.0 && disk <= 2.10, "disk %.4f in [2.0, 2.10]", disk);
  o.require(square >= 3.77 && square <= 4.05, "square %.4f in [3.77, 4.05] (oracle %.4f)", square,
            oracle::square_cheeger(1.0));
  return o;
}

Outcome capacity_oracle() {
  Outcome o;
  const double c3 = p_capacity(rasterize_ball({0, 0, 0}, 1.0, 1.0 / 32.0, 3), 2.0, 3, 8.0).value;
  const double c2 = p_capacity(raster("disk", 1.0 / 64.0), 1.5, 2, 8.0).value;
  o.require(rel(c3, 4 * std::numbers::pi) <= 0.05, "ball n=3 p=2: %.4f vs %.4f", c3, 4 * std::numbers::pi);
  o.require(rel(c2, 2 * std::numbers::pi) <= 0.05, "ball n=2 p=1.5: %.4f vs %.4f", c2, 2 * std::numbers::pi);
  double worst = INFINITY;
  std::string worst_name;
  for (const auto& spec : standard_catalog()) {
    const GridDomain F = rasterize_shape(spec, 1.0 / 32.0);
    for (double p : {1.25, 1.5, 1.75}) {
      const double ratio = p_capacity(F, p, 2, 8.0).value / isocapacity_lower_bound(F.count() * F.cell_volume(), 2, p);
      if (ratio < worst) {
        worst = ratio;
        worst_name = spec.display_label() + " p=" + std::to_string(p).substr(0, 4);
      }
    }
  }
  o.require(worst >= 0.95, "min cap/isocapacity %.4f (%s)", worst, worst_name.c_str());
  return o;
}

Outcome radius_proposition() {
  Outcome o;
  const double gamma = 0.5, p = 1.5, alpha = std::pow(gamma, 4.0);
  const double h = 1.0 / 32.0;
  for (const char* name : {"disk", "square", "annulus"}) {
    const GridDomain d = raster(name, h);
    const double rc = engine().capacity_radius(d, gamma, p, {}).radius;
    const double rl = engine().lieb_radius(d, alpha).radius;
    o.require(rl >= rc - 2 * h, "%s lieb %.4f vs cap %.4f", name, rl, rc);
  }
  const double r = lieb_radius(raster("disk", 1.0 / 64.0), 0.5).radius;
  o.require(rel(r, std::sqrt(2.0)) <= 0.03, "disk lieb(0.5) %.4f vs %.4f", r, std::sqrt(2.0));
  return o;
}

Outcome mazya_family() {
  Outcome o;
  double lo = INFINITY, hi = 0.0;
  int members = 0;
  bool family_ok = false;
  for (const auto& r : standard_suite()) {
    if (r.id != BoundId::MAZYA_SHUBIN_RATIO || r.p != 1.5) continue;
    if (r.domain == "catalog") {
      family_ok = r.satisfied;
      continue;
    }
    if (r.skipped || !r.error.empty()) continue;
    ++members;
    lo = std::min(lo, r.lhs);
    hi = std::max(hi, r.lhs);
  }
  o.require(members == 8, "%d domains", members);
  o.require(hi / lo <= 100.0 && family_ok, "spread max/min %.3f", hi / lo);
  return o;
}

struct GluedCase {
  GluedEigenpair pair;
  double p;
};

std::vector<GluedCase>& glued_pairs() {
  static std::vector<GluedCase> pairs;
  return pairs;
}

Outcome nodal_scaling() {
  Outcome o;
  const double h = 1.0 / 64.0;
  const std::vector<double> scales{0.5, 1.0, 2.0};
  for (double p : {2.0, 3.0}) {
    const NodalScalingResult r = nodal_scaling_check(shape_by_name("square"), p, scales, h);
    o.require(std::abs(r.slope + 1.0 / p) <= 0.03, "p=%g slope %.4f vs %.4f", p, r.slope, -1.0 / p);
    for (double t : scales) glued_pairs().push_back({glued_antisymmetric_eigenpair(scaled(shape_by_name("square"), t), p, h), p});
  }
  const GluedEigenpair disk = glued_antisymmetric_eigenpair(shape_by_name("disk"), 2.0, 1.0 / 128.0);
  o.require(rel(disk.lambda, oracle::glued_disk_lambda2()) <= 0.02, "glued disk %.4f vs %.4f", disk.lambda,
            oracle::glued_disk_lambda2());
  glued_pairs().push_back({disk, 2.0});
  return o;
}

Outcome vanishing_ball() {
  Outcome o;
  if (glued_pairs().empty()) nodal_scaling();
  int passed = 0;
  for (const auto& [g, p] : glued_pairs()) {
    const double lb = engine().lambda_ball1(p, g.domain.h());
    const double R = vanishing_ball_radius(g.lambda, p, lb, 1.05);
    if (check_vanishing(g.domain, g.field, R)) ++passed;
  }
  o.require(passed == static_cast<int>(glued_pairs().size()), "%d of %zu glued pairs", passed, glued_pairs().size());
  const GridDomain sq = raster("square", 1.0 / 64.0);
  const EigenResult ground = engine().eigen(sq, 2.0);
  const bool control = check_vanishing(sq, ground.field, inradius(sq) / 2.0);
  o.require(!control, "ground-state control %s", control ? "true" : "false");
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const fs::path& data_dir) {
  Outcome o;
  const fs::path tmp = fs::temp_directory_path() / "pspec_acceptance_determinism";
  fs::remove_all(tmp);
  RunConfig cfg = load_config((data_dir / "determinism.json").string());
  int status[2];
  for (int run_id = 0; run_id < 2; ++run_id) {
    cfg.output_dir = (tmp / std::to_string(run_id)).string();
    status[run_id] = run(cfg).exit_status;
  }
  int files = 0, identical = 0;
  for (const auto& entry : fs::directory_iterator(tmp / "0")) {
    ++files;
    const fs::path other = tmp / "1" / entry.path().filename();
    if (fs::exists(other) && slurp(entry.path()) == slurp(other)) ++identical;
  }
  o.require(files > 2 && identical == files, "%d of %d files byte-identical", identical, files);
  o.require(status[0] == 0 && status[1] == 0, "exit status %d, %d", status[0], status[1]);
  fs::remove_all(tmp);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path data_dir = argc > 1 ? fs::path(argv[1]) : fs::path("tests/data");
  std::set<int> only;
  for (int i = 2; i < argc; ++i) only.insert(std::atoi(argv[i]));

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"eigensolver oracle accuracy", eigen_oracles},
      {"scaling law", scaling_law},
      {"inequality soundness sweep", soundness_sweep},
      {"cheeger accuracy", cheeger_accuracy},
      {"capacity oracle", capacity_oracle},
      {"radius proposition", radius_proposition},
      {"family spread", mazya_family},
      {"nodal scaling", nodal_scaling},
      {"vanishing ball", vanishing_ball},
      {"determinism", [&] { return determinism(data_dir); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(n)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2d %s: %s (%s) [%.1fs]\n", n, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
