#include "pspec/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "pspec/error.hpp"

namespace pspec {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const char* kind_name(RadiusKind k) { return k == RadiusKind::capacity_gamma ? "capacity_gamma" : "lieb_alpha"; }

Json point(const Point& c, int dim) {
  Json a = Json::array();
  for (int i = 0; i < dim; ++i) a.push_back(number(c[i]));
  return a;
}

double get(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number()) throw Error(ErrorKind::ConfigParse, std::string("shape field '") + key + "' must be a number");
  return v.get<double>();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Json number(double v) {
  if (!std::isfinite(v)) return format_number(v);
  if (v == 0.0) return 0.0;
  return std::strtod(format_number(v).c_str(), nullptr);
}

double number_from(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
  }
  throw Error(ErrorKind::ConfigParse, "expected a number, got " + j.dump());
}

Json to_json(const ShapeSpec& s) {
  Json j;
  j["variant"] = s.name();
  std::visit(overloaded{
                 [&](const shape::Disk& v) { j["r"] = number(v.r); },
                 [&](const shape::Square& v) { j["a"] = number(v.a); },
                 [&](const shape::Rectangle& v) {
                   j["a"] = number(v.a);
                   j["b"] = number(v.b);
                 },
                 [&](const shape::Annulus& v) {
                   j["r_in"] = number(v.r_in);
                   j["r_out"] = number(v.r_out);
                 },
                 [&](const shape::EllShape& v) {
                   j["a"] = number(v.a);
                   j["notch"] = number(v.notch);
                 },
                 [&](const shape::Polygon& v) {
                   Json verts = Json::array();
                   for (const auto& p : v.vertices) verts.push_back({number(p[0]), number(p[1])});
                   j["vertices"] = verts;
                 },
                 [&](const shape::SpikyDisk& v) {
                   j["r"] = number(v.r);
                   j["n_spikes"] = v.n_spikes;
                   j["spike_width"] = number(v.spike_width);
                   j["spike_depth"] = number(v.spike_depth);
                 },
                 [&](const shape::DiskWithHoles& v) {
                   j["r"] = number(v.r);
                   Json holes = Json::array();
                   for (const auto& h : v.holes)
                     holes.push_back({{"x", number(h.x)}, {"y", number(h.y)}, {"r", number(h.r)}});
                   j["holes"] = holes;
                 },
             },
             s.variant);
  j["label"] = s.display_label();
  return j;
}

ShapeSpec shape_from_json(const Json& j) {
  ShapeSpec spec;
  try {
    if (j.is_string()) return shape_by_name(j.get<std::string>());
    if (!j.is_object() || !j.contains("variant") || !j.at("variant").is_string())
      throw Error(ErrorKind::ConfigParse, "shape must be a name or an object with a \"variant\"");
    const std::string type = j.at("variant").get<std::string>();
    if (type == "disk") {
      spec.variant = shape::Disk{get(j, "r", 1.0)};
    } else if (type == "square") {
      spec.variant = shape::Square{get(j, "a", 1.0)};
    } else if (type == "rectangle") {
      spec.variant = shape::Rectangle{get(j, "a", 2.0), get(j, "b", 1.0)};
    } else if (type == "annulus") {
      spec.variant = shape::Annulus{get(j, "r_in", 0.5), get(j, "r_out", 1.0)};
    } else if (type == "ell_shape") {
      spec.variant = shape::EllShape{get(j, "a", 1.0), get(j, "notch", 0.5)};
    } else if (type == "polygon") {
      shape::Polygon poly;
      for (const auto& v : j.at("vertices")) poly.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
      spec.variant = poly;
    } else if (type == "spiky_disk") {
      spec.variant = shape::SpikyDisk{get(j, "r", 1.0), static_cast<int>(get(j, "n_spikes", 8)),
                                      get(j, "spike_width", 0.1), get(j, "spike_depth", 0.75)};
    } else if (type == "disk_with_holes") {
      shape::DiskWithHoles s{get(j, "r", 1.0), {}};
      if (j.contains("holes"))
        for (const auto& h : j.at("holes")) s.holes.push_back({get(h, "x", 0.0), get(h, "y", 0.0), get(h, "r", 0.1)});
      spec.variant = s;
    } else {
      throw Error(ErrorKind::ConfigParse, "unknown shape variant '" + type + "'");
    }
    if (j.contains("label")) spec.label = j.at("label").get<std::string>();
    validate(spec);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigParse, std::string("bad shape: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigParse) throw;
    throw Error(ErrorKind::ConfigParse, e.what());
  }
  return spec;
}

Json to_json(const EigenResult& r) {
  Json j;
  j["p"] = number(r.p);
  j["lambda"] = number(r.lambda);
  j["h"] = number(r.h);
  j["iterations"] = r.iterations;
  j["residual"] = number(r.residual);
  j["epsilon_reg"] = number(r.epsilon_reg);
  return j;
}

Json to_json(const CheegerEstimate& c) {
  return Json{{"h", number(c.h)},
              {"best_level", number(c.best_level)},
              {"cut_perimeter", number(c.cut_perimeter)},
              {"cut_area", number(c.cut_area)},
              {"connectivity_of_cut", c.connectivity_of_cut}};
}

Json to_json(const CapacityResult& c) {
  return Json{{"value", number(c.value)},  {"p", number(c.p)},       {"n", c.n},
              {"box_factor", number(c.box_factor)}, {"iterations", c.iterations}, {"residual", number(c.residual)}};
}

Json to_json(const RadiusSearchResult& r) {
  Json j;
  j["kind"] = kind_name(r.kind);
  j["parameter"] = number(r.parameter);
  j["radius"] = number(r.radius);
  j["center"] = point(r.center, 2);
  j["capacity_solves"] = r.capacity_solves;
  return j;
}

Json to_json(const BoundReport& r) {
  Json j;
  j["id"] = to_string(r.id);
  j["domain"] = r.domain;
  j["p"] = number(r.p);
  j["property_level"] = r.property_level;
  j["lhs"] = number(r.lhs);
  j["rhs"] = number(r.rhs);
  j["tolerance"] = number(r.tolerance);
  j["equality"] = r.equality;
  j["satisfied"] = r.satisfied;
  j["slack"] = number(r.slack);
  j["skipped"] = r.skipped;
  if (r.skipped) j["skip_reason"] = r.skip_reason;
  if (!r.error.empty()) j["error"] = r.error;
  Json inputs = Json::object();
  for (const auto& [k, v] : r.inputs) inputs[k] = number(v);
  j["inputs"] = inputs;
  return j;
}

Json to_json(const NodalMeasurement& m) {
  return Json{{"length", number(m.length)},
              {"lambda", number(m.lambda)},
              {"p", number(m.p)},
              {"contour_segments", m.contour_segments}};
}

Json to_json(const NodalScalingResult& s) {
  Json j;
  j["slope"] = number(s.slope);
  Json rows = Json::array();
  for (std::size_t i = 0; i < s.scales.size(); ++i)
    rows.push_back({{"scale", number(s.scales[i])}, {"lambda", number(s.lambdas[i])}, {"length", number(s.lengths[i])}});
  j["rows"] = rows;
  return j;
}

Json to_json(const GeometrySummary& g) {
  return Json{{"area", number(g.area)},
              {"perimeter", number(g.perimeter)},
              {"inradius", number(g.inradius)},
              {"reduced_inradius", number(g.reduced_inradius)},
              {"circumradius", number(g.circumradius)},
              {"connectivity", g.connectivity},
              {"convex", g.convex}};
}

std::string csv_header() { return "id,domain,p,lhs,rhs,satisfied,slack,skipped,skip_reason"; }

std::string to_csv_row(const BoundReport& r) {
  const std::string reason = r.skipped ? r.skip_reason : (r.error.empty() ? "" : "error: " + r.error);
  return to_string(r.id) + "," + csv_escape(r.domain) + "," + format_number(r.p) + "," + format_number(r.lhs) + "," +
         format_number(r.rhs) + "," + (r.satisfied ? "true" : "false") + "," + format_number(r.slack) + "," +
         (r.skipped ? "true" : "false") + "," + csv_escape(reason);
}

}  // namespace pspec
