// Command-line front end: verify, eigen, capacity, nodal, catalog.
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "pspec/capacity.hpp"
#include "pspec/eigensolver.hpp"
#include "pspec/error.hpp"
#include "pspec/geometry.hpp"
#include "pspec/nodal.hpp"
#include "pspec/runner.hpp"
#include "pspec/serialize.hpp"

using namespace pspec;

namespace {

int print(const Json& j) {
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-Laplacian principal frequency toolkit"};
  app.require_subcommand(1);
  // Frees -h for the grid spacing option.
  app.set_help_flag("--help", "print this help and exit");

  auto* verify = app.add_subcommand("verify", "run the inequality suite from a config file");
  std::string config_path;
  std::vector<double> override_ps;
  double override_h = 0.0;
  std::vector<std::string> override_shapes;
  std::string override_out;
  verify->add_option("--config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  verify->add_option("--p", override_ps, "replace the exponent list")->delimiter(',');
  verify->add_option("--h", override_h, "replace the eigen grid spacing");
  verify->add_option("--shape", override_shapes, "replace the catalog by named shapes")->delimiter(',');
  verify->add_option("--output-dir", override_out, "replace the output directory");

  std::string shape = "disk";
  double p = 2.0, h = 1.0 / 64.0, gamma = 0.5;
  auto* eigen = app.add_subcommand("eigen", "principal frequency of one shape");
  eigen->add_option("--shape", shape)->capture_default_str();
  eigen->add_option("--p", p)->capture_default_str();
  eigen->add_option("--h", h)->capture_default_str();

  double cap_h = 1.0 / 32.0;
  std::string trace_path;
  auto* capacity = app.add_subcommand("capacity", "interior capacity radius and Lieb radius");
  capacity->add_option("--shape", shape)->capture_default_str();
  capacity->add_option("--gamma", gamma)->capture_default_str();
  capacity->add_option("--p", p)->capture_default_str();
  capacity->add_option("--h", cap_h)->capture_default_str();
  capacity->add_option("--trace", trace_path, "CSV of every tested ball");

  std::vector<double> scales{0.5, 1.0, 2.0};
  std::string contour_path;
  auto* nodal = app.add_subcommand("nodal", "nodal length scaling on glued antisymmetric pairs");
  nodal->add_option("--shape", shape)->capture_default_str();
  nodal->add_option("--p", p)->capture_default_str();
  nodal->add_option("--scales", scales)->delimiter(',');
  nodal->add_option("--h", h)->capture_default_str();
  nodal->add_option("--contour", contour_path, "CSV of the unit-scale zero contour");

  app.add_subcommand("catalog", "list the built-in shapes");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      RunConfig cfg = load_config(config_path);
      if (!override_ps.empty()) cfg.ps = override_ps;
      if (override_h > 0.0) cfg.h = override_h;
      if (!override_shapes.empty()) {
        cfg.catalog.clear();
        for (const auto& s : override_shapes) cfg.catalog.push_back(shape_by_name(s));
      }
      if (!override_out.empty()) cfg.output_dir = override_out;
      const RunSummary s = run(cfg);
      std::printf("%zu reports: %zu satisfied, %zu violated, %zu errors, %zu skipped%s\n", s.reports, s.satisfied,
                  s.violations, s.errors, s.skipped, s.partial ? " (partial)" : "");
      return s.exit_status;
    }
    if (*eigen) {
      const ShapeSpec spec = shape_by_name(shape);
      const GridDomain d = rasterize_shape(spec, h);
      Json j = to_json(solve_first_eigen(d, p));
      j["domain"] = spec.display_label();
      return print(j);
    }
    if (*capacity) {
      const ShapeSpec spec = shape_by_name(shape);
      const GridDomain d = rasterize_shape(spec, cap_h);
      RadiusSearchOptions opts;
      opts.record_trace = !trace_path.empty();
      const RadiusSearchResult cr = capacity_radius(d, gamma, p, d.dim(), opts);
      if (!trace_path.empty()) write_trace_csv(cr, trace_path);
      const double alpha = std::pow(gamma, d.dim() / (d.dim() - p));
      Json j;
      j["domain"] = spec.display_label();
      j["capacity_radius"] = to_json(cr);
      j["lieb_radius"] = to_json(lieb_radius(d, alpha));
      return print(j);
    }
    if (*nodal) {
      const ShapeSpec spec = shape_by_name(shape);
      Json j;
      j["domain"] = spec.display_label();
      j["p"] = number(p);
      j["expected_slope"] = number(-1.0 / p);
      j["result"] = to_json(nodal_scaling_check(spec, p, scales, h));
      if (!contour_path.empty()) {
        const GluedEigenpair g = glued_antisymmetric_eigenpair(spec, p, h);
        write_contour_csv(nodal_length(g.domain, g.field), contour_path);
      }
      return print(j);
    }
    std::cout << describe_catalog();
    return 0;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return (e.kind() == ErrorKind::ConfigParse || e.kind() == ErrorKind::IoError) ? 2 : 1;
  }
}
