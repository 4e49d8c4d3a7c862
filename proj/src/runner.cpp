#include "pspec/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pspec/capacity.hpp"
#include "pspec/error.hpp"
#include "pspec/geometry.hpp"
#include "pspec/nodal.hpp"
#include "pspec/serialize.hpp"

namespace pspec {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::ConfigParse, msg); }

double number_at(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_number()) bad(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::vector<double> numbers_at(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_array()) bad(std::string("'") + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) bad(std::string("'") + key + "' must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

void check_ratio(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) bad(std::string(name) + " must lie in (0, 1)");
}

void check_spacing(double v, const char* name) {
  if (!(v > 0.0)) bad(std::string(name) + " must be positive");
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) bad("unknown key '" + key + "' in " + where);
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

Json run_nodal_study(const NodalStudy& s) {
  Json j;
  j["type"] = "nodal";
  j["shape"] = to_json(s.shape);
  j["p"] = number(s.p);
  j["h"] = number(s.h);
  const NodalScalingResult r = nodal_scaling_check(s.shape, s.p, s.scales, s.h);
  j["expected_slope"] = number(-1.0 / s.p);
  j["result"] = to_json(r);
  return j;
}

Json run_capacity_study(const CapacityStudy& s) {
  Json j;
  j["type"] = "capacity";
  j["shape"] = to_json(s.shape);
  j["gamma"] = number(s.gamma);
  j["p"] = number(s.p);
  j["h"] = number(s.h);
  const GridDomain d = rasterize_shape(s.shape, s.h);
  const int n = d.dim();
  const RadiusSearchResult cap = capacity_radius(d, s.gamma, s.p, n);
  const RadiusSearchResult lieb = lieb_radius(d, std::pow(s.gamma, n / (n - s.p)));
  j["capacity_radius"] = to_json(cap);
  j["lieb_radius"] = to_json(lieb);
  return j;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) bad("config must be a JSON object");
  check_keys(j,
             {"catalog", "ps", "h", "capacity_h", "bounds", "gamma", "alpha", "output_dir", "formats", "threads",
              "studies"},
             "config");
  RunConfig c;
  try {
    if (!j.contains("catalog") || (j["catalog"].is_string() && j["catalog"] == "standard")) {
      c.catalog = standard_catalog();
    } else if (j["catalog"].is_array()) {
      for (const auto& s : j["catalog"]) c.catalog.push_back(shape_from_json(s));
    } else {
      bad("catalog must be \"standard\" or a list of shapes");
    }
    if (c.catalog.empty()) bad("catalog must be nonempty");
    if (j.contains("ps")) c.ps = numbers_at(j, "ps");
    if (c.ps.empty()) bad("ps must be nonempty");
    for (double p : c.ps)
      if (!(p > 1.0) || !std::isfinite(p)) bad("every p must satisfy 1 < p < inf");
    if (j.contains("h")) c.h = number_at(j, "h");
    if (j.contains("capacity_h")) c.capacity_h = number_at(j, "capacity_h");
    check_spacing(c.h, "h");
    check_spacing(c.capacity_h, "capacity_h");
    if (j.contains("bounds")) {
      const Json& b = j["bounds"];
      if (b.is_string() && b == "all") {
      } else if (b.is_array()) {
        for (const auto& id : b) {
          if (!id.is_string()) bad("bounds must be \"all\" or a list of ids");
          c.bounds.push_back(bound_id_from_string(id.get<std::string>()));
        }
        if (c.bounds.empty()) bad("bounds must be nonempty");
      } else {
        bad("bounds must be \"all\" or a list of ids");
      }
    }
    if (j.contains("gamma")) c.gamma = number_at(j, "gamma");
    if (j.contains("alpha")) c.alpha = number_at(j, "alpha");
    check_ratio(c.gamma, "gamma");
    check_ratio(c.alpha, "alpha");
    if (j.contains("output_dir")) {
      if (!j["output_dir"].is_string()) bad("output_dir must be a string");
      c.output_dir = j["output_dir"].get<std::string>();
    }
    if (j.contains("formats")) {
      const Json& f = j["formats"];
      if (!f.is_array() || f.empty()) bad("formats must be a nonempty subset of [\"json\", \"csv\"]");
      c.write_json = c.write_csv = false;
      for (const auto& x : f) {
        if (x == "json") c.write_json = true;
        else if (x == "csv") c.write_csv = true;
        else bad("unknown format " + x.dump());
      }
    }
    if (j.contains("threads")) {
      if (!j["threads"].is_number_integer() || j["threads"].get<int>() < 0) bad("threads must be a nonnegative integer");
      c.threads = j["threads"].get<int>();
    }
    if (j.contains("studies")) {
      const Json& st = j["studies"];
      if (!st.is_object()) bad("studies must be an object");
      check_keys(st, {"nodal", "capacity"}, "studies");
      if (st.contains("nodal")) {
        for (const auto& s : st["nodal"]) {
          check_keys(s, {"shape", "p", "scales", "h"}, "nodal study");
          NodalStudy n;
          n.shape = shape_from_json(s.at("shape"));
          if (s.contains("p")) n.p = number_at(s, "p");
          if (s.contains("scales")) n.scales = numbers_at(s, "scales");
          if (s.contains("h")) n.h = number_at(s, "h");
          if (n.scales.size() < 3) bad("a nodal study needs at least three scales");
          check_spacing(n.h, "nodal h");
          c.nodal.push_back(n);
        }
      }
      if (st.contains("capacity")) {
        for (const auto& s : st["capacity"]) {
          check_keys(s, {"shape", "gamma", "p", "h"}, "capacity study");
          CapacityStudy cs;
          cs.shape = shape_from_json(s.at("shape"));
          if (s.contains("gamma")) cs.gamma = number_at(s, "gamma");
          if (s.contains("p")) cs.p = number_at(s, "p");
          if (s.contains("h")) cs.h = number_at(s, "h");
          check_ratio(cs.gamma, "capacity study gamma");
          check_spacing(cs.h, "capacity study h");
          if (!(cs.p > 1.0 && cs.p < 2.0)) bad("capacity study p must lie in (1, 2)");
          c.capacity.push_back(cs);
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("malformed config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

RunSummary run(const RunConfig& config) {
  namespace fs = std::filesystem;
  const fs::path out_dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + out_dir.string() + ": " + ec.message());

  RunSummary summary;
  SuiteConfig suite;
  suite.h = config.h;
  suite.capacity_h = config.capacity_h;
  suite.bounds = config.bounds;
  suite.gamma = config.gamma;
  suite.alpha = config.alpha;
  suite.threads = config.threads;

  BoundEngine engine;
  std::vector<BoundReport> reports;
  Json studies = Json::array();
  std::string abort_reason;
  try {
    reports = run_suite(config.catalog, config.ps, suite, &engine);
    for (const auto& s : config.nodal) {
      try {
        studies.push_back(run_nodal_study(s));
      } catch (const std::exception& e) {
        studies.push_back({{"type", "nodal"}, {"shape", to_json(s.shape)}, {"error", e.what()}});
        ++summary.errors;
      }
    }
    for (const auto& s : config.capacity) {
      try {
        studies.push_back(run_capacity_study(s));
      } catch (const std::exception& e) {
        studies.push_back({{"type", "capacity"}, {"shape", to_json(s.shape)}, {"error", e.what()}});
        ++summary.errors;
      }
    }
  } catch (const std::exception& e) {
    summary.partial = true;
    abort_reason = e.what();
  }

  Json jr = Json::array();
  std::string csv = csv_header() + "\n";
  for (const auto& r : reports) {
    ++summary.reports;
    if (r.skipped) ++summary.skipped;
    else if (!r.error.empty()) ++summary.errors;
    else if (r.satisfied) ++summary.satisfied;
    else ++summary.violations;
    jr.push_back(to_json(r));
    csv += to_csv_row(r) + "\n";
  }

  Json doc;
  doc["partial"] = summary.partial;
  if (summary.partial) doc["abort_reason"] = abort_reason;
  doc["summary"] = {{"reports", summary.reports},     {"satisfied", summary.satisfied},
                    {"violations", summary.violations}, {"errors", summary.errors},
                    {"skipped", summary.skipped}};
  doc["reports"] = jr;
  doc["studies"] = studies;
  if (config.write_json) write_text(out_dir / "report.json", doc.dump(2) + "\n");
  if (config.write_csv) write_text(out_dir / "report.csv", csv);

  // The suite already solved these; the engine returns them from its cache.
  if (config.write_json && !summary.partial) {
    for (const auto& spec : config.catalog) {
      for (double p : config.ps) {
        try {
          const GridDomain d = rasterize_shape(spec, config.h);
          Json e = to_json(engine.eigen(d, p));
          e["domain"] = spec.display_label();
          write_text(out_dir / ("eigen_" + spec.display_label() + "_" + format_number(p) + ".json"), e.dump(2) + "\n");
        } catch (const Error& e) {
          if (e.kind() == ErrorKind::IoError) throw;
        }
      }
    }
  }

  summary.exit_status = (summary.partial || summary.violations > 0 || summary.errors > 0) ? 1 : 0;
  return summary;
}

std::string describe_catalog() {
  std::string out;
  for (const auto& spec : standard_catalog()) {
    const GridDomain d = rasterize_shape(spec, 1.0 / 64.0);
    const GeometrySummary g = geometry_summary(d);
    Json params = to_json(spec);
    params.erase("variant");
    params.erase("label");
    std::string plist;
    for (const auto& [k, v] : params.items()) plist += (plist.empty() ? "" : ", ") + k + "=" + v.dump();
    out += spec.display_label() + ": connectivity " + std::to_string(g.connectivity) + ", " +
           (g.convex ? "convex" : "not convex") + ", " + spec.name() + "(" + plist + ")\n";
  }
  return out;
}

}  // namespace pspec
