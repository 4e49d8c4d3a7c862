#include "pspec/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "pspec/cheeger.hpp"
#include "pspec/error.hpp"

namespace pspec {

namespace {

struct IdName {
  BoundId id;
  const char* name;
};

constexpr IdName kIds[] = {
    {BoundId::DOMAIN_MONOTONICITY_UPPER, "DOMAIN_MONOTONICITY_UPPER"},
    {BoundId::FABER_KRAHN, "FABER_KRAHN"},
    {BoundId::CHEEGER_LOWER, "CHEEGER_LOWER"},
    {BoundId::OSSERMAN_CROKE_SIMPLE, "OSSERMAN_CROKE_SIMPLE"},
    {BoundId::OSSERMAN_CROKE_K, "OSSERMAN_CROKE_K"},
    {BoundId::MAKAI_P1, "MAKAI_P1"},
    {BoundId::LIEB_LOWER, "LIEB_LOWER"},
    {BoundId::CONVEX_LOWER, "CONVEX_LOWER"},
    {BoundId::INFTY_IDENTITY, "INFTY_IDENTITY"},
    {BoundId::MAZYA_SHUBIN_RATIO, "MAZYA_SHUBIN_RATIO"},
    {BoundId::LIEB_VS_CAPACITY_RADIUS, "LIEB_VS_CAPACITY_RADIUS"},
    {BoundId::HIGH_P_INRADIUS, "HIGH_P_INRADIUS"},
};

// Relative allowance for comparisons that consume a computed eigenvalue.
constexpr double kEigenTolerance = 0.02;

std::string domain_key(const GridDomain& d) {
  std::uint64_t hash = 1469598103934665603ull;
  for (std::uint8_t b : d.mask()) {
    hash ^= b;
    hash *= 1099511628211ull;
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "%d:%d:%d:%d:%.17g:%.17g:%.17g:%.17g:%016llx", d.dim(), d.nx(), d.ny(), d.nz(),
                d.h(), d.origin()[0], d.origin()[1], d.origin()[2], static_cast<unsigned long long>(hash));
  return buf;
}

std::string num_key(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
class FutureCache {
 public:
  template <class Fn>
  T get(const std::string& key, Fn&& compute) {
    std::unique_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      auto f = it->second;
      lock.unlock();
      return f.get();
    }
    std::promise<T> promise;
    auto f = promise.get_future().share();
    entries_.emplace(key, f);
    lock.unlock();
    try {
      promise.set_value(compute());
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
    return f.get();
  }

 private:
  std::mutex mutex_;
  std::map<std::string, std::shared_future<T>> entries_;
};

void finalize(BoundReport& r) {
  if (r.skipped) return;
  if (!r.error.empty()) {
    r.satisfied = false;
  } else if (r.equality) {
    r.satisfied = std::abs(r.lhs - r.rhs) <= r.tolerance;
  } else {
    r.satisfied = r.lhs >= r.rhs - r.tolerance;
  }
  const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
  r.slack = scale > 0.0 ? (r.lhs - r.rhs) / scale : 0.0;
}

[[noreturn]] void precondition(BoundId id, const std::string& reason) {
  throw Error(ErrorKind::PreconditionViolated, to_string(id) + ": " + reason);
}

void require_open_exponent(BoundId id, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) precondition(id, "requires 1 < p < inf");
}

}  // namespace

const std::vector<BoundId>& all_bound_ids() {
  static const std::vector<BoundId> ids = [] {
    std::vector<BoundId> v;
    for (const auto& e : kIds) v.push_back(e.id);
    return v;
  }();
  return ids;
}

std::string to_string(BoundId id) {
  for (const auto& e : kIds)
    if (e.id == id) return e.name;
  return "UNKNOWN";
}

BoundId bound_id_from_string(const std::string& name) {
  for (const auto& e : kIds)
    if (name == e.name) return e.id;
  throw Error(ErrorKind::ConfigParse, "unknown bound id '" + name + "'");
}

bool is_family_bound(BoundId id) {
  return id == BoundId::MAZYA_SHUBIN_RATIO || id == BoundId::HIGH_P_INRADIUS;
}

int default_thread_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("PSPEC_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

struct BoundEngine::Impl {
  FutureCache<EigenResult> eigen;
  FutureCache<GeometrySummary> geometry;
  FutureCache<double> cheeger;
  FutureCache<RadiusSearchResult> radius;
};

BoundEngine::BoundEngine() : impl_(std::make_unique<Impl>()) {}
BoundEngine::~BoundEngine() = default;

EigenResult BoundEngine::eigen(const GridDomain& d, double p, const SolveOptions& opts) {
  const std::string key = domain_key(d) + "|" + num_key(p) + "|" + num_key(opts.tol) + "|" + num_key(opts.epsilon_reg);
  return impl_->eigen.get(key, [&] { return solve_first_eigen(d, p, opts); });
}

double BoundEngine::lambda_ball1(double p, double h, const SolveOptions& opts) {
  return eigen(rasterize_shape(ShapeSpec{shape::Disk{1.0}, ""}, h), p, opts).lambda;
}

GeometrySummary BoundEngine::geometry(const GridDomain& d) {
  return impl_->geometry.get(domain_key(d), [&] { return geometry_summary(d); });
}

double BoundEngine::cheeger(const GridDomain& d) {
  return impl_->cheeger.get(domain_key(d), [&] { return cheeger_constant(d).h; });
}

RadiusSearchResult BoundEngine::capacity_radius(const GridDomain& d, double gamma, double p,
                                                const RadiusSearchOptions& opts) {
  const std::string key = "cap|" + domain_key(d) + "|" + num_key(gamma) + "|" + num_key(p);
  return impl_->radius.get(key, [&] { return pspec::capacity_radius(d, gamma, p, d.dim(), opts); });
}

RadiusSearchResult BoundEngine::lieb_radius(const GridDomain& d, double alpha) {
  const std::string key = "lieb|" + domain_key(d) + "|" + num_key(alpha);
  return impl_->radius.get(key, [&] { return pspec::lieb_radius(d, alpha); });
}

BoundReport evaluate_bound(BoundId id, const GridDomain& d, double p, const BoundParams& params) {
  BoundEngine engine;
  return evaluate_bound(engine, id, d, p, params);
}

BoundReport evaluate_bound(BoundEngine& engine, BoundId id, const GridDomain& d, double p,
                           const BoundParams& params) {
  BoundReport r;
  r.id = id;
  r.p = p;
  r.domain = params.label;
  if (d.dim() != 2) throw Error(ErrorKind::DimensionUnsupported, "bound evaluation uses planar geometry");
  const int n = d.dim();
  const double h = d.h();
  const GridDomain& search = params.search_domain ? *params.search_domain : d;
  auto input = [&](const char* name, double v) { r.inputs.emplace_back(name, v); };
  auto lambda = [&] {
    const double l = engine.eigen(d, p, params.solve).lambda;
    input("eigensolver.lambda", l);
    return l;
  };
  auto lambda_b1 = [&] {
    const double l = engine.lambda_ball1(p, h, params.solve);
    input("eigensolver.lambda_ball1", l);
    return l;
  };
  const GeometrySummary g = engine.geometry(d);

  switch (id) {
    case BoundId::DOMAIN_MONOTONICITY_UPPER: {
      require_open_exponent(id, p);
      const double l = lambda(), lb = lambda_b1();
      input("geometry.inradius", g.inradius);
      r.lhs = std::pow(lb / l, 1.0 / p);
      r.rhs = g.inradius;
      r.tolerance = kEigenTolerance * r.rhs;
      break;
    }
    case BoundId::FABER_KRAHN: {
      require_open_exponent(id, p);
      const double l = lambda(), lb = lambda_b1();
      input("geometry.area", g.area);
      r.lhs = l;
      r.rhs = lb * std::pow(unit_ball_volume(n) / g.area, p / n);
      r.tolerance = kEigenTolerance * r.rhs;
      break;
    }
    case BoundId::CHEEGER_LOWER: {
      require_open_exponent(id, p);
      const double hc = engine.cheeger(d);
      input("cheeger.h", hc);
      input("geometry.connectivity", g.connectivity);
      r.lhs = lambda();
      r.rhs = cheeger_lambda_bound(hc, p);
      r.tolerance = kEigenTolerance * r.rhs;
      break;
    }
    case BoundId::OSSERMAN_CROKE_SIMPLE: {
      require_open_exponent(id, p);
      if (g.connectivity != 1) precondition(id, "connectivity = " + std::to_string(g.connectivity));
      input("geometry.reduced_inradius", g.reduced_inradius);
      r.lhs = lambda();
      r.rhs = std::pow(1.0 / (p * g.reduced_inradius), p);
      r.tolerance = kEigenTolerance * r.rhs;
      break;
    }
    case BoundId::OSSERMAN_CROKE_K: {
      require_open_exponent(id, p);
      if (g.connectivity < 2) precondition(id, "connectivity = " + std::to_string(g.connectivity));
      const double k = g.connectivity;
      input("geometry.connectivity", k);
      input("geometry.inradius", g.inradius);
      r.lhs = lambda();
      r.rhs = std::pow(2.0, p / 2.0) / (std::pow(k, p / 2.0) * std::pow(p, p) * std::pow(g.inradius, p));
      r.tolerance = kEigenTolerance * r.rhs;
      break;
    }
    case BoundId::MAKAI_P1: {
      if (g.connectivity != 1) precondition(id, "connectivity = " + std::to_string(g.connectivity));
      r.p = 1.0;
      const double hc = engine.cheeger(d);
      input("cheeger.h", hc);
      input("geometry.reduced_inradius", g.reduced_inradius);
      r.lhs = hc;
      r.rhs = 1.0 / g.reduced_inradius;
      r.tolerance = kEigenTolerance * r.rhs;
      break;
    }
    case BoundId::LIEB_LOWER: {
      require_open_exponent(id, p);
      if (!params.alpha) throw Error(ErrorKind::MissingParam, "LIEB_LOWER needs alpha");
      const double alpha = *params.alpha;
      const double l = lambda(), lb = lambda_b1();
      const RadiusSearchResult lr = engine.lieb_radius(d, alpha);
      const double sigma = lieb_sigma(n, p, alpha, lb);
      input("params.alpha", alpha);
      input("capacity.lieb_radius", lr.radius);
      input("capacity.sigma", sigma);
      r.lhs = l;
      r.rhs = sigma / std::pow(lr.radius, p);
      r.tolerance = kEigenTolerance * r.rhs;
      break;
    }
    case BoundId::CONVEX_LOWER: {
      require_open_exponent(id, p);
      if (!g.convex) precondition(id, "domain is not convex");
      input("geometry.inradius", g.inradius);
      r.lhs = lambda();
      r.rhs = std::pow(1.0 / (p * g.inradius), p);
      r.tolerance = kEigenTolerance * r.rhs;
      break;
    }
    case BoundId::INFTY_IDENTITY: {
      r.p = std::numeric_limits<double>::infinity();
      r.equality = true;
      r.lhs = eigen_limit_case(d, LimitCase::p_infinity);
      r.rhs = 1.0 / g.inradius;
      input("eigensolver.lambda_infinity", r.lhs);
      input("geometry.inradius", g.inradius);
      r.tolerance = 2.0 * h / (g.inradius * g.inradius);
      break;
    }
    case BoundId::MAZYA_SHUBIN_RATIO: {
      r.property_level = "family";
      if (!params.gamma) throw Error(ErrorKind::MissingParam, "MAZYA_SHUBIN_RATIO needs gamma");
      if (!(p > 1.0 && p < n)) precondition(id, "requires 1 < p < n");
      const double l = lambda();
      const RadiusSearchResult cr = engine.capacity_radius(search, *params.gamma, p, params.search);
      input("params.gamma", *params.gamma);
      input("capacity.capacity_radius", cr.radius);
      // Per-domain member of the family statistic: a finite positive product.
      r.lhs = l * std::pow(cr.radius, p);
      r.rhs = 0.0;
      break;
    }
    case BoundId::LIEB_VS_CAPACITY_RADIUS: {
      if (!params.gamma) throw Error(ErrorKind::MissingParam, "LIEB_VS_CAPACITY_RADIUS needs gamma");
      if (!(p > 1.0 && p < n)) precondition(id, "requires 1 < p < n");
      const double gamma = *params.gamma;
      const double alpha = std::pow(gamma, n / (n - p));
      const RadiusSearchResult cr = engine.capacity_radius(search, gamma, p, params.search);
      const RadiusSearchResult lr = engine.lieb_radius(search, alpha);
      input("params.gamma", gamma);
      input("params.alpha", alpha);
      input("capacity.lieb_radius", lr.radius);
      input("capacity.capacity_radius", cr.radius);
      r.lhs = lr.radius;
      r.rhs = cr.radius;
      r.tolerance = 2.0 * search.h();
      break;
    }
    case BoundId::HIGH_P_INRADIUS: {
      r.property_level = "family";
      if (!(p > n) || !std::isfinite(p)) precondition(id, "requires p > n");
      const double l = lambda();
      input("geometry.inradius", g.inradius);
      r.lhs = l * std::pow(g.inradius, p);
      r.rhs = 0.0;
      break;
    }
  }
  finalize(r);
  if (r.property_level == "family" && !(r.lhs > 0.0 && std::isfinite(r.lhs))) r.satisfied = false;
  return r;
}

namespace {

BoundReport family_report(BoundId id, double p, const std::vector<const BoundReport*>& members) {
  BoundReport r;
  r.id = id;
  r.p = p;
  r.domain = "catalog";
  r.property_level = "family";
  if (members.size() < 2) {
    r.skipped = true;
    r.skip_reason = "fewer than two domains";
    return r;
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, disk = 0.0;
  for (const BoundReport* m : members) {
    lo = std::min(lo, m->lhs);
    hi = std::max(hi, m->lhs);
    if (m->domain == "disk") disk = m->lhs;
  }
  r.inputs = {{"family.min", lo}, {"family.max", hi}, {"family.count", static_cast<double>(members.size())}};
  if (id == BoundId::MAZYA_SHUBIN_RATIO) {
    // Two-sided comparability: max / min <= 100.
    r.lhs = 100.0 * lo;
    r.rhs = hi;
    r.inputs.emplace_back("family.spread", hi / lo);
  } else {
    // Uniform lower bound: min stays above 1e-3 of the disk value.
    r.lhs = lo;
    r.rhs = 1e-3 * disk;
    r.inputs.emplace_back("family.disk", disk);
  }
  finalize(r);
  if (!(lo > 0.0)) r.satisfied = false;
  return r;
}

}  // namespace

std::vector<BoundReport> run_suite(const std::vector<ShapeSpec>& catalog, const std::vector<double>& ps,
                                   const SuiteConfig& config, BoundEngine* engine) {
  if (catalog.empty()) throw Error(ErrorKind::InvalidConfig, "catalog must be nonempty");
  if (ps.empty()) throw Error(ErrorKind::InvalidConfig, "ps must be nonempty");
  const std::vector<BoundId> ids = config.bounds.empty() ? all_bound_ids() : config.bounds;
  BoundEngine local;
  BoundEngine& eng = engine ? *engine : local;

  struct Task {
    std::size_t shape;
    std::size_t pi;
    BoundId id;
  };
  std::vector<Task> tasks;
  for (std::size_t s = 0; s < catalog.size(); ++s)
    for (std::size_t pi = 0; pi < ps.size(); ++pi)
      for (BoundId id : all_bound_ids()) {
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) continue;
        // p-independent checks are reported once per shape.
        if ((id == BoundId::MAKAI_P1 || id == BoundId::INFTY_IDENTITY) && pi != 0) continue;
        tasks.push_back({s, pi, id});
      }

  // Rasterizations are shared by all tasks of a shape.
  struct Domains {
    std::optional<GridDomain> eigen, search;
    std::string error;
  };
  std::vector<Domains> domains(catalog.size());
  for (std::size_t s = 0; s < catalog.size(); ++s) {
    try {
      domains[s].eigen = rasterize_shape(catalog[s], config.h);
      domains[s].search = rasterize_shape(catalog[s], config.capacity_h);
    } catch (const std::exception& e) {
      domains[s].error = e.what();
    }
  }

  std::vector<BoundReport> out(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      const Task& task = tasks[t];
      const ShapeSpec& spec = catalog[task.shape];
      BoundReport& r = out[t];
      r.id = task.id;
      r.p = ps[task.pi];
      r.domain = spec.display_label();
      r.property_level = is_family_bound(task.id) ? "family" : "instance";
      if (task.id == BoundId::MAKAI_P1) r.p = 1.0;
      if (task.id == BoundId::INFTY_IDENTITY) r.p = std::numeric_limits<double>::infinity();
      const Domains& dom = domains[task.shape];
      if (!dom.error.empty()) {
        r.error = dom.error;
        continue;
      }
      BoundParams params;
      params.alpha = config.alpha;
      params.gamma = config.gamma;
      params.label = r.domain;
      params.search_domain = *dom.search;
      params.solve = config.solve;
      params.search = config.search;
      try {
        r = evaluate_bound(eng, task.id, *dom.eigen, ps[task.pi], params);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::PreconditionViolated) {
          r.skipped = true;
          const std::string prefix = to_string(task.id) + ": ";
          r.skip_reason = e.detail().rfind(prefix, 0) == 0 ? e.detail().substr(prefix.size()) : e.detail();
        } else {
          r.error = e.what();
        }
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      finalize(r);
    }
  };
  const int threads = std::max(1, std::min<int>(config.threads > 0 ? config.threads : default_thread_count(),
                                                static_cast<int>(tasks.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (BoundId id : all_bound_ids()) {
    if (!is_family_bound(id) || std::find(ids.begin(), ids.end(), id) == ids.end()) continue;
    for (double p : ps) {
      std::vector<const BoundReport*> members;
      bool applicable = false;
      for (const BoundReport& r : out) {
        if (r.id != id || r.p != p) continue;
        if (!r.skipped) applicable = true;
        if (!r.skipped && r.error.empty()) members.push_back(&r);
      }
      if (!applicable) continue;
      out.push_back(family_report(id, p, members));
    }
  }
  return out;
}

}  // namespace pspec
