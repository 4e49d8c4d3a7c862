#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pspec/bounds.hpp"
#include "pspec/capacity.hpp"
#include "pspec/cheeger.hpp"
#include "pspec/eigensolver.hpp"
#include "pspec/error.hpp"
#include "pspec/geometry.hpp"
#include "pspec/nodal.hpp"
#include "pspec/runner.hpp"
#include "pspec/serialize.hpp"

namespace py = pybind11;
using namespace pspec;

namespace {

py::object to_python(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null:
      return py::none();
    case Json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case Json::value_t::number_integer:
    case Json::value_t::number_unsigned:
      return py::int_(j.get<long long>());
    case Json::value_t::number_float:
      return py::float_(j.get<double>());
    case Json::value_t::string: {
      const auto s = j.get<std::string>();
      if (s == "inf" || s == "-inf" || s == "nan") return py::float_(number_from(j));
      return py::str(s);
    }
    case Json::value_t::array: {
      py::list out;
      for (const auto& x : j) out.append(to_python(x));
      return out;
    }
    default: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = to_python(v);
      return out;
    }
  }
}

// A catalog name or a dict such as {"variant": "annulus", "r_in": 0.4}.
ShapeSpec to_shape(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) return shape_by_name(obj.cast<std::string>());
  const auto text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
  return shape_from_json(Json::parse(text));
}

py::array_t<double> field_array(const ScalarField& f) {
  py::array_t<double> a({f.shape[2] > 1 ? f.shape[2] : 1, f.shape[1], f.shape[0]});
  std::copy(f.values.begin(), f.values.end(), a.mutable_data());
  if (f.shape[2] == 1) return a.reshape({f.shape[1], f.shape[0]});
  return a;
}

py::array_t<bool> mask_array(const GridDomain& d) {
  py::array_t<bool> a({d.ny(), d.nx()});
  auto* out = a.mutable_data();
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = d.inside(i);
  return a;
}

}  // namespace

PYBIND11_MODULE(pspec, m) {
  m.doc() = "Principal frequencies of the p-Laplacian on planar grid domains";

  static py::exception<Error> error_type(m, "PspecError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type.ptr())(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def("catalog", [] {
    std::vector<std::string> names;
    for (const auto& s : standard_catalog()) names.push_back(s.display_label());
    return names;
  });
  m.def("describe_catalog", &describe_catalog);
  m.def("shape", [](const py::object& s) { return to_python(to_json(to_shape(s))); }, py::arg("shape"),
        "Normalized parameters of a shape.");

  m.def(
      "mask",
      [](const py::object& s, double h) { return mask_array(rasterize_shape(to_shape(s), h)); },
      py::arg("shape"), py::arg("h") = 1.0 / 64.0);

  m.def(
      "geometry",
      [](const py::object& s, double h) { return to_python(to_json(geometry_summary(rasterize_shape(to_shape(s), h)))); },
      py::arg("shape"), py::arg("h") = 1.0 / 64.0);

  m.def(
      "eigen",
      [](const py::object& s, double p, double h, bool with_field) {
        const EigenResult r = solve_first_eigen(rasterize_shape(to_shape(s), h), p);
        py::dict out = to_python(to_json(r));
        if (with_field) out["field"] = field_array(r.field);
        return out;
      },
      py::arg("shape"), py::arg("p") = 2.0, py::arg("h") = 1.0 / 64.0, py::arg("with_field") = false);

  m.def(
      "cheeger",
      [](const py::object& s, double h) { return to_python(to_json(cheeger_constant(rasterize_shape(to_shape(s), h)))); },
      py::arg("shape"), py::arg("h") = 1.0 / 64.0);

  m.def(
      "p_capacity",
      [](const py::object& s, double p, double h, double box_factor) {
        const GridDomain F = rasterize_shape(to_shape(s), h);
        return to_python(to_json(p_capacity(F, p, F.dim(), box_factor)));
      },
      py::arg("shape"), py::arg("p") = 1.5, py::arg("h") = 1.0 / 32.0, py::arg("box_factor") = 8.0);
  m.def("ball_capacity_exact", &ball_capacity_exact, py::arg("r"), py::arg("n"), py::arg("p"));
  m.def("isocapacity_lower_bound", &isocapacity_lower_bound, py::arg("volume"), py::arg("n"), py::arg("p"));

  m.def(
      "capacity_radius",
      [](const py::object& s, double gamma, double p, double h) {
        const GridDomain d = rasterize_shape(to_shape(s), h);
        return to_python(to_json(capacity_radius(d, gamma, p, d.dim())));
      },
      py::arg("shape"), py::arg("gamma") = 0.5, py::arg("p") = 1.5, py::arg("h") = 1.0 / 32.0);
  m.def(
      "lieb_radius",
      [](const py::object& s, double alpha, double h) {
        return to_python(to_json(lieb_radius(rasterize_shape(to_shape(s), h), alpha)));
      },
      py::arg("shape"), py::arg("alpha") = 0.5, py::arg("h") = 1.0 / 64.0);

  m.def(
      "nodal_scaling",
      [](const py::object& s, double p, const std::vector<double>& scales, double h) {
        return to_python(to_json(nodal_scaling_check(to_shape(s), p, scales, h)));
      },
      py::arg("shape"), py::arg("p") = 2.0, py::arg("scales") = std::vector<double>{0.5, 1.0, 2.0},
      py::arg("h") = 1.0 / 64.0);

  m.def("bound_ids", [] {
    std::vector<std::string> ids;
    for (BoundId id : all_bound_ids()) ids.push_back(to_string(id));
    return ids;
  });

  m.def(
      "evaluate_bound",
      [](const std::string& id, const py::object& s, double p, double h, std::optional<double> alpha,
         std::optional<double> gamma) {
        const ShapeSpec spec = to_shape(s);
        BoundParams params;
        params.label = spec.display_label();
        params.alpha = alpha;
        params.gamma = gamma;
        return to_python(to_json(evaluate_bound(bound_id_from_string(id), rasterize_shape(spec, h), p, params)));
      },
      py::arg("id"), py::arg("shape"), py::arg("p") = 2.0, py::arg("h") = 1.0 / 64.0, py::arg("alpha") = py::none(),
      py::arg("gamma") = py::none());

  m.def(
      "run_suite",
      [](const std::vector<py::object>& shapes, const std::vector<double>& ps, double h, double capacity_h,
         const std::vector<std::string>& bounds, int threads) {
        std::vector<ShapeSpec> catalog;
        for (const auto& s : shapes) catalog.push_back(to_shape(s));
        SuiteConfig cfg;
        cfg.h = h;
        cfg.capacity_h = capacity_h;
        cfg.threads = threads;
        for (const auto& b : bounds) cfg.bounds.push_back(bound_id_from_string(b));
        std::vector<BoundReport> reports;
        {
          py::gil_scoped_release release;
          reports = run_suite(catalog, ps, cfg);
        }
        py::list out;
        for (const auto& r : reports) out.append(to_python(to_json(r)));
        return out;
      },
      py::arg("shapes"), py::arg("ps"), py::arg("h") = 1.0 / 64.0, py::arg("capacity_h") = 1.0 / 32.0,
      py::arg("bounds") = std::vector<std::string>{}, py::arg("threads") = 0);

  m.def(
      "verify",
      [](const std::string& config_path, std::optional<std::string> output_dir) {
        RunConfig cfg = load_config(config_path);
        if (output_dir) cfg.output_dir = *output_dir;
        RunSummary s;
        {
          py::gil_scoped_release release;
          s = run(cfg);
        }
        py::dict out;
        out["exit_status"] = s.exit_status;
        out["partial"] = s.partial;
        out["reports"] = s.reports;
        out["satisfied"] = s.satisfied;
        out["violations"] = s.violations;
        out["errors"] = s.errors;
        out["skipped"] = s.skipped;
        return out;
      },
      py::arg("config_path"), py::arg("output_dir") = py::none());
}
